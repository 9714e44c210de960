#include "nbrw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nbrw/parallel.hpp"

namespace nbrw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t index_at(double t, double log2n) {
  return static_cast<std::size_t>(std::floor(t * log2n));
}

}  // namespace

FddReport theorem1_fdd_experiment(const TailModel& model, std::size_t N,
                                  const FddOptions& options) {
  if (options.t_grid.empty()) throw std::invalid_argument("theorem1: empty t grid");
  if (options.replicas == 0) throw std::invalid_argument("theorem1: replicas must be >= 1");
  const double log2n = std::log2(static_cast<double>(N));
  const double c_n = scaling_constant(model, static_cast<long>(N));
  const double t_max = *std::max_element(options.t_grid.begin(), options.t_grid.end());
  const std::size_t steps = index_at(t_max, log2n);
  const std::size_t k = options.t_grid.size();

  struct Draw {
    std::vector<double> max, min;
  };
  auto brw = parallel_map(options.replicas, options.workers, [&](std::size_t i) {
    Rng rng(options.seed, Stream::Particles, i);
    const auto traj = run(model, N, steps, rng);
    Draw d;
    for (double t : options.t_grid) {
      const std::size_t n = index_at(t, log2n);
      d.max.push_back(traj.max[n] / c_n);
      d.min.push_back(traj.min[n] / c_n);
    }
    return d;
  });

  const auto measure = StairsMeasure::mu_alpha(model.alpha());
  auto stairs = parallel_map(options.replicas, options.workers, [&](std::size_t i) {
    Rng rng(options.seed, Stream::Stairs, i);
    StairsSimulator sim(measure, options.epsilon, rng);
    sim.advance_to(std::max(t_max, 1e-9));
    Draw d;
    for (double t : options.t_grid) {
      d.max.push_back(sim.path().value_at(t));
      d.min.push_back(sim.path().value_at(t - 1.0));
    }
    return d;
  });

  FddReport report;
  report.N = N;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> a_max, a_min, b_max, b_min;
    for (const auto& d : brw) {
      a_max.push_back(d.max[j]);
      a_min.push_back(d.min[j]);
    }
    for (const auto& d : stairs) {
      b_max.push_back(d.max[j]);
      b_min.push_back(d.min[j]);
    }
    FddRow row;
    row.t = options.t_grid[j];
    row.ks_max = ks_two_sample(EmpiricalSample(a_max), EmpiricalSample(b_max));
    row.ks_min = ks_two_sample(EmpiricalSample(a_min), EmpiricalSample(b_min));
    report.rows.push_back(row);
  }
  return report;
}

ScalingReport theorem2_sweep(const TailModel& model, const SweepOptions& options) {
  if (options.N_grid.empty()) throw std::invalid_argument("theorem2: empty N grid");
  if (options.replicas == 0) throw std::invalid_argument("theorem2: replicas must be >= 1");
  ScalingReport report{regime_of(model), {}};

  for (std::size_t N : options.N_grid) {
    const std::size_t block = ceil_log2(N);
    std::vector<std::size_t> horizons = options.n_grid;
    if (horizons.empty()) horizons.push_back(30 * block);

    for (std::size_t n : horizons) {
      if (n == 0) throw std::invalid_argument("theorem2: horizon must be >= 1");
      const auto prediction = predict_scaling(model, static_cast<long>(N),
                                              static_cast<double>(n), options.rho);
      ScalingRow row{report.regime};
      row.N = N;
      row.n = n;
      row.replicas = options.replicas;
      row.seed = options.seed;
      row.predicted = prediction.value;

      auto trajs = parallel_map(options.replicas, options.workers, [&](std::size_t i) {
        Rng rng(options.seed, Stream::Particles, i);
        return run(model, N, n, rng);
      });

      switch (report.regime) {
        case Regime::AlphaGt1:
        case Regime::AlphaEq1Finite: {
          const double burn = std::min(0.5, options.burn_in_blocks * static_cast<double>(block) /
                                                static_cast<double>(n));
          const auto v = velocity_estimate(trajs, burn);
          row.observed = v.max.mean;
          row.ratio = row.observed / row.predicted;
          row.ci_lo = v.max.ci_lo / row.predicted;
          row.ci_hi = v.max.ci_hi / row.predicted;
          break;
        }
        case Regime::AlphaEq1Infinite: {
          std::vector<double> scaled;
          for (const auto& t : trajs) scaled.push_back(t.max[n] / prediction.value);
          const auto m = mean_ci(scaled);
          row.observed = m.mean;
          row.predicted = 1.0;
          row.ratio = m.mean;
          row.ci_lo = m.ci_lo;
          row.ci_hi = m.ci_hi;
          break;
        }
        case Regime::AlphaLt1: {
          std::vector<double> scaled;
          for (const auto& t : trajs) scaled.push_back(t.max[n] / prediction.value);
          Rng rng(options.seed, Stream::Stable, N);
          std::vector<double> reference;
          for (std::size_t i = 0; i < options.replicas; ++i)
            reference.push_back(sample_stable(model.alpha(), rng));
          const auto ks = ks_two_sample(EmpiricalSample(scaled), EmpiricalSample(reference));
          row.observed = ks.statistic;
          row.predicted = 0.0;
          row.ratio = kNaN;
          row.ci_lo = 0.0;
          row.ci_hi = ks.crit01;
          break;
        }
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

bool spread_event(const ExtremesTrajectory& traj, double c_n, std::size_t n0,
                  std::size_t n1, double eps) {
  if (n1 >= traj.size() || n0 >= traj.size())
    throw std::invalid_argument("spread_event: trajectory too short");
  return traj.min[n1] / c_n < traj.max[n0] / c_n + eps;
}

std::vector<UpperMinRow> upper_min_experiment(const TailModel& model,
                                              std::span<const std::size_t> N_grid,
                                              double eps, std::size_t replicas,
                                              std::uint64_t seed, std::size_t workers) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("upper_min: epsilon must lie in (0, 1)");
  if (replicas == 0) throw std::invalid_argument("upper_min: replicas must be >= 1");
  std::vector<UpperMinRow> rows;
  for (std::size_t N : N_grid) {
    const double log2n = std::log2(static_cast<double>(N));
    const double c_n = scaling_constant(model, static_cast<long>(N));
    UpperMinRow row;
    row.N = N;
    row.n0 = ceil_log2(N);
    row.n1 = row.n0 + static_cast<std::size_t>(std::floor((1.0 - eps) * log2n));
    row.replicas = replicas;
    auto hits = parallel_map(replicas, workers, [&](std::size_t i) {
      Rng rng(seed, Stream::Particles, i);
      const auto traj = run(model, N, row.n1, rng);
      return spread_event(traj, c_n, row.n0, row.n1, eps) ? 1.0 : 0.0;
    });
    const auto m = mean_ci(hits);
    row.probability = m.mean;
    const double half = 1.96 * std::sqrt(m.mean * (1.0 - m.mean) / static_cast<double>(replicas));
    row.ci_lo = std::max(0.0, m.mean - half);
    row.ci_hi = std::min(1.0, m.mean + half);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nbrw
