#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbrw/limit_laws.hpp"
#include "nbrw/particle_system.hpp"
#include "nbrw/stairs.hpp"
#include "nbrw/stats.hpp"
#include "nbrw/tail_model.hpp"

namespace nbrw {

// Finite-dimensional comparison of the rescaled extremes with the mu_alpha
// stairs process at fixed times.

struct FddOptions {
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  std::size_t replicas = 2000;
  std::uint64_t seed = 0;
  double epsilon = 1e-4;  // stairs truncation
  std::size_t workers = 1;
};

struct FddRow {
  double t = 0.0;
  KsResult ks_max;  // c_N^-1 X_N(floor(t log2 N)) vs R(t)
  KsResult ks_min;  // c_N^-1 X_1(floor(t log2 N)) vs R(t - 1)
};

struct FddReport {
  std::size_t N = 0;
  std::vector<FddRow> rows;
};

FddReport theorem1_fdd_experiment(const TailModel& model, std::size_t N,
                                  const FddOptions& options);

// Long-time scaling per regime.

struct ScalingRow {
  Regime regime;
  std::size_t N = 0;
  std::size_t n = 0;
  double observed = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;  // NaN where the prediction is zero
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
};

struct ScalingReport {
  Regime regime;
  std::vector<ScalingRow> rows;
};

struct SweepOptions {
  std::vector<std::size_t> N_grid;
  /// Horizons in steps; empty means 30 * ceil(log2 N) per N.
  std::vector<std::size_t> n_grid;
  std::size_t replicas = 50;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Burn-in in units of ceil(log2 N) steps (velocity regimes).
  double burn_in_blocks = 1.0;
  /// Required for AlphaGt1.
  std::optional<RhoEstimate> rho;
};

/// AlphaGt1 / AlphaEq1Finite: observed = velocity of X_N, ratio to prediction.
/// AlphaEq1Infinite: observed = mean of X_N(n) log2 N / (c_N n b^N_n), predicted 1.
/// AlphaLt1: observed = KS distance between X_N(n) / ((2N)^{1/alpha} h^{-1}(n)) and
///   an equally sized W_alpha sample; predicted 0, ratio NaN, [ci_lo, ci_hi] =
///   [0, 1% critical value].
ScalingReport theorem2_sweep(const TailModel& model, const SweepOptions& options);

// Spread collapse of the rescaled minimum after (1 - eps) log2 N steps.

struct UpperMinRow {
  std::size_t N = 0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double probability = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t replicas = 0;
};

/// Event Y_1(n1) < Y_N(n0) + eps on one trajectory.
bool spread_event(const ExtremesTrajectory& traj, double c_n, std::size_t n0,
                  std::size_t n1, double eps);

/// n0 = ceil(log2 N), n1 = n0 + floor((1 - eps) log2 N).
std::vector<UpperMinRow> upper_min_experiment(const TailModel& model,
                                              std::span<const std::size_t> N_grid,
                                              double eps, std::size_t replicas,
                                              std::uint64_t seed, std::size_t workers = 1);

}  // namespace nbrw
