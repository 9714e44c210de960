#include "nbrw/particle_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace nbrw {

Population init_population(std::size_t N) {
  if (N == 0) throw std::invalid_argument("init_population: N must be >= 1");
  return Population{std::vector<double>(N, 0.0), 0};
}

void advance(Population& pop, std::span<const double> jumps,
             std::vector<double>& children) {
  const std::size_t n = pop.positions.size();
  if (jumps.size() != 2 * n)
    throw std::invalid_argument("step: jump array must have length 2N");

  children.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    children[2 * i] = pop.positions[i] + jumps[2 * i];
    children[2 * i + 1] = pop.positions[i] + jumps[2 * i + 1];
  }
  // Expected linear-time selection of the top half, then order the survivors.
  const auto mid = children.begin() + static_cast<std::ptrdiff_t>(n);
  std::nth_element(children.begin(), mid, children.end());
  std::sort(mid, children.end());
  std::copy(mid, children.end(), pop.positions.begin());
  ++pop.time;
}

Population step(const Population& pop, std::span<const double> jumps) {
  Population next = pop;
  std::vector<double> children;
  advance(next, jumps, children);
  return next;
}

ExtremesTrajectory run(const TailModel& model, std::size_t N, std::size_t steps,
                       Rng& rng, const RecorderOptions& options) {
  Population pop = init_population(N);
  ExtremesTrajectory traj;
  traj.min.reserve(steps + 1);
  traj.max.reserve(steps + 1);

  auto record = [&] {
    traj.min.push_back(pop.min());
    traj.max.push_back(pop.max());
    if (options.snapshot_stride != 0 &&
        static_cast<std::size_t>(pop.time) % options.snapshot_stride == 0)
      traj.snapshots.push_back({pop.time, pop.positions});
  };

  record();
  std::vector<double> jumps(2 * N);
  std::vector<double> children;
  for (std::size_t s = 0; s < steps; ++s) {
    sample_jumps(model, rng, jumps);
    advance(pop, jumps, children);
    record();
  }
  return traj;
}

ExtremesTrajectory run(const TailModel& model, std::size_t N, std::size_t steps,
                       std::uint64_t seed, const RecorderOptions& options) {
  Rng rng(seed);
  return run(model, N, steps, rng, options);
}

RescaledTrajectory rescale_trajectory(const ExtremesTrajectory& traj,
                                      const TailModel& model, std::size_t N) {
  const double c_n = scaling_constant(model, static_cast<long>(N));
  const double log2n = std::log2(static_cast<double>(N));
  RescaledTrajectory out;
  out.t.resize(traj.size());
  out.min.resize(traj.size());
  out.max.resize(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out.t[n] = static_cast<double>(n) / log2n;
    out.min[n] = traj.min[n] / c_n;
    out.max[n] = traj.max[n] / c_n;
  }
  return out;
}

std::size_t ceil_log2(std::size_t N) {
  if (N <= 1) return 0;
  return static_cast<std::size_t>(std::bit_width(N - 1));
}

}  // namespace nbrw
