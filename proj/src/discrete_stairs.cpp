#include "nbrw/discrete_stairs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace nbrw {

DspPath::DspPath(std::size_t N, std::size_t ell) : N_(N), ell_(ell), values_{0.0} {
  if (N == 0) throw std::invalid_argument("DspPath: N must be >= 1");
  if (ell == 0) throw std::invalid_argument("DspPath: ell must be >= 1");
}

double DspPath::operator()(std::int64_t n) const {
  if (n <= 0) return 0.0;
  return values_.at(static_cast<std::size_t>(n));
}

void DspPath::push_max(double max_jump) {
  const std::int64_t n = last();
  const double delayed = (*this)(n - static_cast<std::int64_t>(ell_));
  values_.push_back(std::max(values_.back(), delayed + max_jump));
}

void dsp_step(DspPath& path, std::int64_t n, std::span<const double> jumps) {
  if (jumps.size() != 2 * path.N())
    throw std::invalid_argument("dsp_step: jump array must have length 2N");
  if (n != path.last()) throw std::invalid_argument("dsp_step: path not defined through n");
  path.push_max(*std::max_element(jumps.begin(), jumps.end()));
}

LowerBoundReport coupled_lower_bound_run(const TailModel& model, std::size_t N,
                                         std::size_t steps, std::uint64_t seed,
                                         std::uint64_t run_id) {
  if (N < 2) throw std::invalid_argument("coupled_lower_bound_run: N must be >= 2");
  LowerBoundReport report;
  report.ell = ceil_log2(N);
  report.c_n = scaling_constant(model, static_cast<long>(N));
  const auto ell = static_cast<std::int64_t>(report.ell);

  Rng rng(seed);
  Population pop = init_population(N);
  DspPath dsp(N, report.ell);
  std::vector<double> jumps(2 * N), scaled(2 * N), children;

  auto check = [&](std::int64_t n) {
    const double y_min = pop.min() / report.c_n;
    const double y_max = pop.max() / report.c_n;
    report.brw_min.push_back(y_min);
    report.brw_max.push_back(y_max);
    report.dsp.push_back(dsp(n));
    if (dsp(n - ell) > y_min) report.violations.push_back({run_id, n, dsp(n - ell), y_min, "lower_min"});
    if (dsp(n) > y_max) report.violations.push_back({run_id, n, dsp(n), y_max, "lower_max"});
  };

  check(0);
  for (std::size_t s = 0; s < steps; ++s) {
    sample_jumps(model, rng, jumps);
    for (std::size_t i = 0; i < jumps.size(); ++i) scaled[i] = jumps[i] / report.c_n;
    dsp_step(dsp, static_cast<std::int64_t>(s), scaled);
    advance(pop, jumps, children);
    check(static_cast<std::int64_t>(s + 1));
  }
  return report;
}

std::size_t theta_delay(std::size_t N, double q) {
  if (N < 2 || !std::has_single_bit(N))
    throw std::invalid_argument("theta_trace: N must be a power of two >= 2");
  const double log2n = std::log2(static_cast<double>(N));
  const double m = std::round(log2n - q * std::log2(log2n));
  if (m < 1.0) throw std::invalid_argument("theta_trace: m_N < 1 for this (N, q)");
  return static_cast<std::size_t>(m);
}

ThetaTrace theta_trace(const TailModel& model, std::size_t N, double q,
                       std::size_t steps, std::uint64_t seed,
                       std::span<const double> moment_orders) {
  for (double p : moment_orders)
    if (!(p > 0.0) || !(p < 2.0 * model.alpha()))
      throw std::invalid_argument("theta_trace: moment order must lie in (0, 2 alpha)");

  ThetaTrace trace;
  trace.m = theta_delay(N, q);
  trace.delta = std::pow(std::log2(static_cast<double>(N)), -q);
  const double c_n = scaling_constant(model, static_cast<long>(N));

  Rng rng(seed);
  Population pop = init_population(N);
  DspPath dsp(N, trace.m);
  std::vector<double> jumps(2 * N), scaled(2 * N), children;

  trace.theta.push_back(0.0);
  trace.brw_max.push_back(0.0);
  trace.dsp.push_back(0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    sample_jumps(model, rng, jumps);
    for (std::size_t i = 0; i < jumps.size(); ++i) scaled[i] = jumps[i] / c_n;
    dsp_step(dsp, static_cast<std::int64_t>(s), scaled);
    advance(pop, jumps, children);
    const double y_max = pop.max() / c_n;
    const double r = dsp(static_cast<std::int64_t>(s + 1));
    trace.brw_max.push_back(y_max);
    trace.dsp.push_back(r);
    trace.theta.push_back(std::max(trace.theta.back(), y_max - r));
    trace.increments.push_back(trace.theta.back() - trace.theta[trace.theta.size() - 2]);
  }
  for (double p : moment_orders) {
    double sum = 0.0;
    for (double d : trace.increments) sum += std::pow(d, p);
    trace.moments.push_back(trace.increments.empty() ? 0.0
                                                     : sum / static_cast<double>(trace.increments.size()));
  }
  return trace;
}

SerflingRun serfling_from_atoms(const AtomStream& atoms, std::size_t ell,
                                std::size_t steps, std::uint64_t run_id) {
  if (ell == 0) throw std::invalid_argument("serfling: ell must be >= 1");
  SerflingRun run;
  run.atoms = atoms.atoms.size();

  // Block boundaries b_n = n / ell; block n is (b_n, b_{n+1}].
  std::vector<double> bounds(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n)
    bounds[n] = static_cast<double>(n) / static_cast<double>(ell);
  const double narrow = 1.0 / static_cast<double>(ell + 1);

  std::vector<double> wide(steps, 0.0), thin(steps, 0.0);
  for (const Atom& a : atoms.atoms) {
    auto it = std::lower_bound(bounds.begin(), bounds.end(), a.t);  // first b >= t
    if (it == bounds.begin() || it == bounds.end()) continue;
    const auto n = static_cast<std::size_t>(it - bounds.begin()) - 1;
    wide[n] = std::max(wide[n], a.x);
    if (a.t > bounds[n + 1] - narrow) thin[n] = std::max(thin[n], a.x);
  }

  const StairsPath path = build_path(atoms);
  DspPath dsp(1, ell), lower(1, ell);
  for (std::size_t n = 0; n < steps; ++n) {
    dsp.push_max(wide[n]);
    lower.push_max(thin[n]);
  }
  for (std::size_t n = 0; n <= steps; ++n) {
    const auto k = static_cast<std::int64_t>(n);
    run.stairs.push_back(path.value_at(bounds[n]));
    run.dsp.push_back(dsp(k));
    run.lower.push_back(lower(k));
    if (run.stairs[n] < run.dsp[n])
      run.violations.push_back({run_id, k, run.stairs[n], run.dsp[n], "stairs_ge_dsp"});
    if (run.dsp[n] < run.lower[n])
      run.violations.push_back({run_id, k, run.dsp[n], run.lower[n], "dsp_ge_lower"});
  }
  return run;
}

double default_serfling_epsilon(const TailModel& model, std::size_t N) {
  return 2.0 * model.x_min() / scaling_constant(model, static_cast<long>(N));
}

SerflingRun serfling_coupled_run(const TailModel& model, std::size_t N, std::size_t ell,
                                 std::size_t steps, std::uint64_t seed, double eps,
                                 std::uint64_t run_id) {
  if (ell == 0) throw std::invalid_argument("serfling_coupled_run: ell must be >= 1");
  const auto measure = StairsMeasure::mu_nl(model, static_cast<long>(N), static_cast<long>(ell));
  if (eps <= 0.0) eps = default_serfling_epsilon(model, N);
  Rng rng(seed, Stream::Serfling, 0);
  const double horizon = static_cast<double>(steps) / static_cast<double>(ell);
  AtomStream atoms = horizon > 0.0 ? simulate_atoms(measure, horizon, eps, rng)
                                   : AtomStream{0.0, eps, {}};
  return serfling_from_atoms(atoms, ell, steps, run_id);
}

SerflingSamples serfling_samples(const TailModel& model, std::size_t N, std::size_t ell,
                                 std::size_t samples, std::uint64_t seed, double eps,
                                 std::size_t window_ell) {
  if (window_ell == 0) throw std::invalid_argument("serfling_samples: window_ell must be >= 1");
  const auto measure = StairsMeasure::mu_nl(model, static_cast<long>(N), static_cast<long>(ell));
  const double c_n = measure.scale();
  if (eps <= 0.0) eps = default_serfling_epsilon(model, N);

  SerflingSamples out;
  Rng jump_rng(seed, Stream::Jumps, 0);
  std::vector<double> jumps(2 * N);
  for (std::size_t s = 0; s < samples; ++s) {
    sample_jumps(model, jump_rng, jumps);
    const double m = *std::max_element(jumps.begin(), jumps.end()) / c_n;
    out.jump_maxima.push_back(m > eps ? m : 0.0);
  }

  Rng atom_rng(seed, Stream::Serfling, 0);
  const double window_mass = measure.tail(eps) / static_cast<double>(window_ell);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto count = atom_rng.poisson(window_mass);
    double m = 0.0;
    for (std::uint64_t k = 0; k < count; ++k)
      m = std::max(m, measure.sample_mark_above(eps, atom_rng));
    out.window_maxima.push_back(m);
  }
  return out;
}

}  // namespace nbrw
