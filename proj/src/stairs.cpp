#include "nbrw/stairs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nbrw/parallel.hpp"

namespace nbrw {

// ---------------------------------------------------------------------------
// StairsMeasure

StairsMeasure StairsMeasure::mu_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mu_alpha: alpha must be positive");
  StairsMeasure m;
  m.kind_ = Kind::MuAlpha;
  m.alpha_ = alpha;
  return m;
}

StairsMeasure StairsMeasure::mu_n(const TailModel& model, long N,
                                  std::optional<double> gamma) {
  StairsMeasure m;
  m.kind_ = Kind::MuN;
  m.alpha_ = model.alpha();
  m.model_ = model;
  m.N_ = N;
  m.c_n_ = scaling_constant(model, N);
  const double n = static_cast<double>(N);
  m.gamma_ = gamma.value_or(2.0 * n * std::log2(n));
  if (!(m.gamma_ > 0.0)) throw std::invalid_argument("mu_n: gamma must be positive");
  return m;
}

StairsMeasure StairsMeasure::mu_nl(const TailModel& model, long N, long ell) {
  if (ell < 1) throw std::invalid_argument("mu_nl: ell must be >= 1");
  StairsMeasure m;
  m.kind_ = Kind::MuNL;
  m.alpha_ = model.alpha();
  m.model_ = model;
  m.N_ = N;
  m.ell_ = ell;
  m.c_n_ = scaling_constant(model, N);
  m.gamma_ = 2.0 * static_cast<double>(N) * static_cast<double>(ell);
  return m;
}

double StairsMeasure::tail(double x) const {
  if (!(x > 0.0)) return INFINITY;
  if (kind_ == Kind::MuAlpha) {
    if (alpha_ == 2.0) return 1.0 / (x * x);
    return std::pow(x, -alpha_);
  }
  const double y = model_->h(c_n_ * x);
  if (y <= 1.0) return INFINITY;
  return -gamma_ * std::log1p(-1.0 / y);
}

double StairsMeasure::tail_inverse(double m) const {
  if (!(m > 0.0)) return INFINITY;
  if (kind_ == Kind::MuAlpha) {
    if (alpha_ == 2.0) return 1.0 / std::sqrt(m);
    return std::pow(m, -1.0 / alpha_);
  }
  // -gamma ln(1 - 1/h) = m  <=>  h = 1 / (1 - e^{-m/gamma})
  const double q = -std::expm1(-m / gamma_);
  if (!(q > 0.0)) return INFINITY;
  return model_->h_inverse(std::max(1.0, 1.0 / q)) / c_n_;
}

double StairsMeasure::support_floor() const {
  return kind_ == Kind::MuAlpha ? 0.0 : model_->x_min() / c_n_;
}

double StairsMeasure::sample_mark_above(double threshold, Rng& rng) const {
  const double total = tail(threshold);
  if (!std::isfinite(total) || !(total > 0.0))
    throw std::invalid_argument("sample_mark_above: threshold below support floor");
  for (;;) {
    const double x = tail_inverse(total * rng.uniform());
    if (x > threshold) return x;
  }
}

std::string StairsMeasure::label() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::MuAlpha:
      out << "MuAlpha(alpha=" << alpha_ << ")";
      break;
    case Kind::MuN:
      out << "MuN(" << model_->describe() << ";N=" << N_ << ";gamma=" << gamma_ << ")";
      break;
    case Kind::MuNL:
      out << "MuNL(" << model_->describe() << ";N=" << N_ << ";ell=" << ell_ << ")";
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Atom streams

AtomStream simulate_atoms(const StairsMeasure& measure, double T, double eps,
                          Rng& rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("simulate_atoms: epsilon must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("simulate_atoms: horizon must be > 0");
  const double rate = measure.tail(eps);
  if (!std::isfinite(rate))
    throw std::invalid_argument("simulate_atoms: M(epsilon) is infinite");

  AtomStream stream{T, eps, {}};
  const auto count = rng.poisson(T * rate);
  std::vector<double> times(count);
  for (double& t : times) t = T * rng.uniform();
  std::sort(times.begin(), times.end());
  // Ties have probability zero; resample any that appear.
  for (;;) {
    auto dup = std::adjacent_find(times.begin(), times.end());
    if (dup == times.end()) break;
    *dup = T * rng.uniform();
    std::sort(times.begin(), times.end());
  }
  stream.atoms.reserve(count);
  for (double t : times) stream.atoms.push_back({t, measure.sample_mark_above(eps, rng)});
  return stream;
}

// ---------------------------------------------------------------------------
// StairsPath

StairsPath::StairsPath(std::vector<double> jump_times, std::vector<double> values)
    : times_(std::move(jump_times)), values_(std::move(values)) {
  if (times_.size() != values_.size())
    throw std::invalid_argument("StairsPath: times and values differ in length");
}

double StairsPath::value_at(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StairsPath::value_before(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StairsPath::lagged_value(double t) const {
  auto it = std::partition_point(times_.begin(), times_.end(),
                                 [t](double s) { return spaced(s, t); });
  if (it == times_.begin()) return 0.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

void StairsPath::push_jump(double t, double value) {
  times_.push_back(t);
  values_.push_back(value);
}

// ---------------------------------------------------------------------------
// Chain representation and record sweep

ChainEvaluator::ChainEvaluator(const AtomStream& atoms) {
  const std::size_t n = atoms.atoms.size();
  times_.resize(n);
  f_.resize(n);
  prefix_max_.resize(n);
  for (std::size_t i = 0; i < n; ++i) times_[i] = atoms.atoms[i].t;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = times_[i];
    const auto first = times_.begin();
    const auto last = first + static_cast<std::ptrdiff_t>(i);
    const auto it = std::partition_point(first, last, [t](double s) { return spaced(s, t); });
    double best = 0.0;
    if (it != first) best = std::max(0.0, prefix_max_[static_cast<std::size_t>(it - first) - 1]);
    f_[i] = best + atoms.atoms[i].x;
    prefix_max_[i] = i == 0 ? f_[i] : std::max(prefix_max_[i - 1], f_[i]);
  }
}

double ChainEvaluator::operator()(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0.0;
  return std::max(0.0, prefix_max_[static_cast<std::size_t>(it - times_.begin()) - 1]);
}

double chain_value(const AtomStream& atoms, double t) { return ChainEvaluator(atoms)(t); }

StairsPath build_path(const AtomStream& atoms) {
  StairsPath path;
  std::ptrdiff_t lag = -1;  // last jump s with spaced(s, current atom time)
  for (const Atom& a : atoms.atoms) {
    const auto& times = path.jump_times();
    while (lag + 1 < static_cast<std::ptrdiff_t>(times.size()) &&
           spaced(times[static_cast<std::size_t>(lag + 1)], a.t))
      ++lag;
    const double lagged = lag >= 0 ? path.values()[static_cast<std::size_t>(lag)] : 0.0;
    const double candidate = lagged + a.x;
    if (candidate > path.final_value()) path.push_jump(a.t, candidate);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Regenerations

std::optional<double> next_regeneration(const StairsPath& path, double after,
                                        double known_until) {
  const auto& times = path.jump_times();
  double c = after + 1.0;
  for (;;) {
    auto it = std::upper_bound(times.begin(), times.end(), c);
    if (it == times.begin()) break;
    const double s = *(it - 1);
    if (spaced(s, c)) break;  // no jump in (c - 1, c]
    c = s + 1.0;
  }
  if (c > known_until) return std::nullopt;
  return c;
}

RegenerationData detect_regenerations(const StairsPath& path, double T) {
  RegenerationData data;
  data.taus.push_back(0.0);
  double prev_value = 0.0;
  for (;;) {
    auto tau = next_regeneration(path, data.taus.back(), T - 1.0);
    if (!tau) break;
    const double value = path.value_at(*tau);
    data.tau_increments.push_back(*tau - data.taus.back());
    data.r_increments.push_back(value - prev_value);
    data.taus.push_back(*tau);
    prev_value = value;
  }
  return data;
}

// ---------------------------------------------------------------------------
// Threshold simulator

StairsSimulator::StairsSimulator(const StairsMeasure& measure, double eps, Rng& rng)
    : measure_(measure), eps_(eps), eps_tail_(measure.tail(eps)), rng_(rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("StairsSimulator: epsilon must be > 0");
  if (!std::isfinite(eps_tail_))
    throw std::invalid_argument("StairsSimulator: M(epsilon) is infinite");
}

void StairsSimulator::advance_to(double horizon) {
  const auto& times = path_.jump_times();
  const auto& values = path_.values();
  while (now_ < horizon) {
    const double lagged = lag_index_ >= 0 ? values[static_cast<std::size_t>(lag_index_)] : 0.0;
    const double gap = path_.final_value() - lagged;
    const double threshold = std::max(gap, eps_);
    const double rate = gap <= eps_ ? eps_tail_ : measure_.tail(threshold);

    const auto next = static_cast<std::size_t>(lag_index_ + 1);
    const double breakpoint = next < times.size() ? times[next] + 1.0 : INFINITY;
    const double stop = std::min(breakpoint, horizon);

    const double t = now_ + rng_.exponential(rate);
    if (t >= stop) {
      now_ = stop;
      while (static_cast<std::size_t>(lag_index_ + 1) < times.size() &&
             spaced(times[static_cast<std::size_t>(lag_index_ + 1)], now_))
        ++lag_index_;
      continue;
    }
    path_.push_jump(t, lagged + measure_.sample_mark_above(threshold, rng_));
    now_ = t;
  }
}

// ---------------------------------------------------------------------------
// Estimators

namespace {

double bootstrap_se(std::size_t n, std::size_t resamples, std::uint64_t seed,
                    const auto& statistic) {
  if (n < 2 || resamples < 2) return std::numeric_limits<double>::quiet_NaN();
  Rng rng(seed, Stream::Bootstrap, 0);
  std::vector<std::size_t> idx(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& i : idx) i = rng.index(n);
    const double s = statistic(idx);
    sum += s;
    sum_sq += s * s;
  }
  const double mean = sum / static_cast<double>(resamples);
  const double var = (sum_sq - static_cast<double>(resamples) * mean * mean) /
                     static_cast<double>(resamples - 1);
  return std::sqrt(std::max(0.0, var));
}

}  // namespace

RhoEstimate estimate_rho_from_paths(std::span<const StairsPath> paths, double T,
                                    std::uint64_t bootstrap_seed,
                                    std::size_t bootstrap_resamples) {
  RhoEstimate est;
  est.replicas = paths.size();
  if (paths.empty()) throw std::invalid_argument("estimate_rho: no paths");

  std::vector<double> per_replica;
  std::vector<double> dr, dtau;
  for (const auto& p : paths) {
    per_replica.push_back(p.value_at(T) / T);
    auto regen = detect_regenerations(p, T);
    dr.insert(dr.end(), regen.r_increments.begin(), regen.r_increments.end());
    dtau.insert(dtau.end(), regen.tau_increments.begin(), regen.tau_increments.end());
  }
  est.long_run = std::accumulate(per_replica.begin(), per_replica.end(), 0.0) /
                 static_cast<double>(per_replica.size());
  est.long_run_se = bootstrap_se(per_replica.size(), bootstrap_resamples, bootstrap_seed,
                                 [&](const std::vector<std::size_t>& idx) {
                                   double s = 0.0;
                                   for (auto i : idx) s += per_replica[i];
                                   return s / static_cast<double>(idx.size());
                                 });

  est.cycles = dr.size();
  const double sum_dr = std::accumulate(dr.begin(), dr.end(), 0.0);
  const double sum_dtau = std::accumulate(dtau.begin(), dtau.end(), 0.0);
  est.regenerative = est.cycles ? sum_dr / sum_dtau : std::numeric_limits<double>::quiet_NaN();
  est.regenerative_se = bootstrap_se(est.cycles, bootstrap_resamples, bootstrap_seed + 1,
                                     [&](const std::vector<std::size_t>& idx) {
                                       double a = 0.0, b = 0.0;
                                       for (auto i : idx) {
                                         a += dr[i];
                                         b += dtau[i];
                                       }
                                       return a / b;
                                     });
  if (est.cycles < 30)
    est.warnings.push_back("fewer than 30 completed regeneration cycles (" +
                           std::to_string(est.cycles) + ")");
  if (paths.size() < 2)
    est.warnings.push_back("long-run standard error needs at least 2 replicas");
  return est;
}

RhoEstimate estimate_rho(const StairsMeasure& measure, const RhoOptions& options) {
  if (options.replicas == 0) throw std::invalid_argument("estimate_rho: replicas must be >= 1");
  auto paths = parallel_map(options.replicas, options.workers, [&](std::size_t i) {
    Rng rng(options.seed, Stream::Stairs, i);
    StairsSimulator sim(measure, options.epsilon, rng);
    sim.advance_to(options.T);
    return sim.path();
  });
  return estimate_rho_from_paths(paths, options.T, options.seed, options.bootstrap_resamples);
}

FirstCycle simulate_first_cycle(const StairsMeasure& measure, double eps, Rng& rng) {
  StairsSimulator sim(measure, eps, rng);
  double horizon = 4.0;
  std::optional<double> tau;
  for (;;) {
    sim.advance_to(horizon);
    tau = next_regeneration(sim.path(), 0.0, horizon);
    if (tau) break;
    horizon += 4.0;
  }
  const StairsPath& path = sim.path();
  FirstCycle cycle;
  cycle.tau = *tau;
  cycle.r_tau = path.value_at(*tau);
  const auto& times = path.jump_times();
  auto it = std::partition_point(times.begin(), times.end(),
                                 [&](double s) { return spaced(s, *tau); });
  if (it != times.begin()) {
    const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    if (times[k] + 1.0 == *tau)
      cycle.jump_before = path.values()[k] - (k > 0 ? path.values()[k - 1] : 0.0);
  }
  return cycle;
}

TailTable tail_table_from_cycles(std::span<const FirstCycle> cycles,
                                 const StairsMeasure& measure,
                                 std::span<const double> x_grid) {
  TailTable table;
  table.replicas = cycles.size();
  if (cycles.empty()) return table;
  double tau_sum = 0.0;
  for (const auto& c : cycles) {
    tau_sum += c.tau;
    if (c.jump_before > c.r_tau) ++table.dominance_violations;
  }
  table.mean_tau = tau_sum / static_cast<double>(cycles.size());
  for (double x : x_grid) {
    const auto count = static_cast<std::size_t>(std::count_if(
        cycles.begin(), cycles.end(), [x](const FirstCycle& c) { return c.r_tau > x; }));
    TailRow row;
    row.x = x;
    row.exceedances = count;
    row.empirical = static_cast<double>(count) / static_cast<double>(cycles.size());
    row.predicted = table.mean_tau * measure.tail(x);
    row.ratio = row.empirical / row.predicted;
    table.rows.push_back(row);
  }
  return table;
}

TailTable regeneration_tail_table(const StairsMeasure& measure, std::size_t replicas,
                                  std::uint64_t seed, std::span<const double> x_grid,
                                  double eps, std::size_t workers) {
  auto cycles = parallel_map(replicas, workers, [&](std::size_t i) {
    Rng rng(seed, Stream::Stairs, i);
    return simulate_first_cycle(measure, eps, rng);
  });
  return tail_table_from_cycles(cycles, measure, x_grid);
}

}  // namespace nbrw
