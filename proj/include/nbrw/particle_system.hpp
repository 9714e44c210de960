#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbrw/rng.hpp"
#include "nbrw/tail_model.hpp"

namespace nbrw {

/// The N particle positions at one time step, ascending.
struct Population {
  std::vector<double> positions;
  std::int64_t time = 0;

  std::size_t size() const { return positions.size(); }
  double min() const { return positions.front(); }
  double max() const { return positions.back(); }
};

Population init_population(std::size_t N);

/// One branching-selection step: particle i (in ascending order) gets children
/// at positions[i] + jumps[2i] and positions[i] + jumps[2i+1]; the N largest
/// children survive. Throws if jumps.size() != 2N.
Population step(const Population& pop, std::span<const double> jumps);

/// In-place variant for the hot loop. `children` is scratch space.
void advance(Population& pop, std::span<const double> jumps,
             std::vector<double>& children);

struct RecorderOptions {
  /// Store a full sorted snapshot every `snapshot_stride` steps (0 = never).
  std::size_t snapshot_stride = 0;
};

struct Snapshot {
  std::int64_t n;
  std::vector<double> positions;
};

/// Extremes per step; entry n holds X_1(n) and X_N(n), n = 0..steps.
struct ExtremesTrajectory {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<Snapshot> snapshots;

  std::size_t size() const { return max.size(); }
};

/// Runs the N-BRW for `steps` steps. Each step draws 2N jumps from `rng` in
/// index order, then applies `advance`.
ExtremesTrajectory run(const TailModel& model, std::size_t N, std::size_t steps,
                       Rng& rng, const RecorderOptions& options = {});

ExtremesTrajectory run(const TailModel& model, std::size_t N, std::size_t steps,
                       std::uint64_t seed, const RecorderOptions& options = {});

/// Trajectory in the scaling window: t = n / log2 N, positions divided by c_N.
struct RescaledTrajectory {
  std::vector<double> t;
  std::vector<double> min;
  std::vector<double> max;
};

RescaledTrajectory rescale_trajectory(const ExtremesTrajectory& traj,
                                      const TailModel& model, std::size_t N);

/// ceil(log2 N), the takeover time scale.
std::size_t ceil_log2(std::size_t N);

}  // namespace nbrw
