#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nbrw/particle_system.hpp"
#include "nbrw/testing/oracles.hpp"

using namespace nbrw;
using doctest::Approx;

TEST_CASE("init_population") {
  CHECK(init_population(3).positions == std::vector<double>{0, 0, 0});
  CHECK(init_population(1).positions == std::vector<double>{0});
  CHECK(init_population(5).time == 0);
  CHECK_THROWS(init_population(0));
}

TEST_CASE("step examples") {
  Population p1{{5.0}, 0};
  CHECK(step(p1, std::vector<double>{2, 3}).positions == std::vector<double>{8});
  Population p2{{0.0, 0.0}, 0};
  CHECK(step(p2, std::vector<double>{1, 3, 2, 5}).positions == std::vector<double>{3, 5});
  Population p3{{0.0, 10.0}, 0};
  auto next = step(p3, std::vector<double>{1, 1, 1, 1});
  CHECK(next.positions == std::vector<double>{11, 11});
  CHECK(next.time == 1);
  CHECK_THROWS(step(p3, std::vector<double>{1, 1, 1}));
}

TEST_CASE("selection matches full sort on random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t N = 1 + rng.index(64);
    std::vector<double> pos(N);
    for (auto& x : pos) x = std::floor(rng.uniform() * 20.0);  // ties on purpose
    std::sort(pos.begin(), pos.end());
    std::vector<double> jumps(2 * N);
    for (auto& y : jumps) y = std::floor(rng.uniform() * 8.0);
    auto got = step(Population{pos, 0}, jumps).positions;
    CHECK(got == oracle::brw_step_full_sort(pos, jumps));
  }
}

TEST_CASE("run: edge cases and determinism") {
  const auto m = TailModel::pure_pareto(2.0);
  auto t0 = run(m, 4, 0, std::uint64_t{1});
  REQUIRE(t0.size() == 1);
  CHECK(t0.min[0] == 0.0);
  CHECK(t0.max[0] == 0.0);

  auto a = run(m, 16, 40, std::uint64_t{77});
  auto b = run(m, 16, 40, std::uint64_t{77});
  CHECK(a.min == b.min);
  CHECK(a.max == b.max);
}

TEST_CASE("run equals straight-line reimplementation") {
  const auto m = TailModel::pure_pareto(1.5);
  const std::size_t N = 2, steps = 3;
  auto traj = run(m, N, steps, std::uint64_t{42});

  Rng rng(42);
  std::vector<double> pos(N, 0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    std::vector<double> jumps(2 * N);
    for (auto& y : jumps) y = std::pow(rng.uniform(), -1.0 / 1.5);
    pos = oracle::brw_step_full_sort(pos, jumps);
    CHECK(traj.min[n] == Approx(pos.front()).epsilon(1e-14));
    CHECK(traj.max[n] == Approx(pos.back()).epsilon(1e-14));
  }
}

TEST_CASE("snapshots are strided") {
  auto traj = run(TailModel::pure_pareto(2.0), 8, 10, std::uint64_t{3}, RecorderOptions{5});
  REQUIRE(traj.snapshots.size() == 3);
  CHECK(traj.snapshots[1].n == 5);
  CHECK(traj.snapshots[1].positions.size() == 8);
  CHECK(traj.snapshots[1].positions.front() == traj.min[5]);
  CHECK(traj.snapshots[1].positions.back() == traj.max[5]);
}

TEST_CASE("extremes are nondecreasing and nonnegative") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    auto traj = run(TailModel::pure_pareto(alpha), 32, 100, std::uint64_t{9});
    for (std::size_t n = 1; n < traj.size(); ++n) {
      CHECK(traj.min[n] >= traj.min[n - 1]);
      CHECK(traj.max[n] >= traj.max[n - 1]);
      CHECK(traj.min[n] <= traj.max[n]);
      CHECK(traj.min[n] >= 0.0);
    }
  }
}

TEST_CASE("rescale_trajectory") {
  const auto m = TailModel::pure_pareto(2.0);
  const std::size_t N = 1024;
  const double c = scaling_constant(m, static_cast<long>(N));
  ExtremesTrajectory traj;
  for (std::size_t n = 0; n <= 12; ++n) {
    traj.min.push_back(0.0);
    traj.max.push_back(n == 10 ? 286.22 : (n == 12 ? c : 0.0));
  }
  auto r = rescale_trajectory(traj, m, N);
  CHECK(r.t[10] == Approx(1.0));
  CHECK(r.max[10] == Approx(2.0).epsilon(1e-4));
  CHECK(r.max[12] == Approx(1.0));
  CHECK(r.min[7] == 0.0);
  CHECK(ceil_log2(1024) == 10);
  CHECK(ceil_log2(1000) == 10);
  CHECK(ceil_log2(2) == 1);
}
