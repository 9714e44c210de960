#include <doctest.h>

#include <cmath>
#include <vector>

#include "nbrw/experiments.hpp"
#include "nbrw/stats.hpp"

using namespace nbrw;
using doctest::Approx;

namespace {

ExtremesTrajectory linear(double slope, double offset, std::size_t steps) {
  ExtremesTrajectory t;
  for (std::size_t n = 0; n <= steps; ++n) {
    t.min.push_back(offset + slope * n);
    t.max.push_back(offset + slope * n + 1.0);
  }
  return t;
}

}  // namespace

TEST_CASE("ks examples") {
  EmpiricalSample a({3.0, 1.0, 2.0});
  CHECK(a.values()[0] == 1.0);
  CHECK(a.cdf(2.0) == Approx(2.0 / 3.0));
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, EmpiricalSample({10.0, 11.0})).statistic == 1.0);
  CHECK(ks_two_sample(a, EmpiricalSample({1.5, 2.5, 3.5})).statistic == Approx(1.0 / 3.0));
  CHECK_THROWS(EmpiricalSample(std::vector<double>{}));
}

TEST_CASE("ks with ties") {
  EmpiricalSample a({1.0, 1.0, 2.0, 2.0});
  EmpiricalSample b({1.0, 2.0, 2.0, 2.0});
  CHECK(ks_two_sample(a, b).statistic == Approx(0.25));
}

TEST_CASE("ks is symmetric and bounded") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + rng.index(50)), y(1 + rng.index(50));
    for (auto& v : x) v = std::floor(rng.uniform() * 10.0);
    for (auto& v : y) v = std::floor(rng.uniform() * 12.0);
    const auto ab = ks_two_sample(EmpiricalSample(x), EmpiricalSample(y));
    const auto ba = ks_two_sample(EmpiricalSample(y), EmpiricalSample(x));
    CHECK(ab.statistic == ba.statistic);
    CHECK(ab.statistic >= 0.0);
    CHECK(ab.statistic <= 1.0);
    CHECK(ab.crit01 > ab.crit05);
  }
}

TEST_CASE("critical values") {
  CHECK(ks_critical_value(0.05, 100, 100) == Approx(1.3581 * std::sqrt(0.02)).epsilon(1e-4));
  CHECK(ks_critical_value(0.01, 10000, 10000) == Approx(1.6276 * std::sqrt(2e-4)).epsilon(1e-4));
}

TEST_CASE("mean_ci") {
  std::vector<double> v{1.0, 2.0, 3.0};
  auto ci = mean_ci(v);
  CHECK(ci.mean == 2.0);
  CHECK(ci.se == Approx(1.0 / std::sqrt(3.0)));
  CHECK(ci.ci_lo < 2.0);
  CHECK(ci.ci_hi > 2.0);
  std::vector<double> one{4.0};
  CHECK(std::isnan(mean_ci(one).se));
}

TEST_CASE("velocity examples") {
  std::vector<ExtremesTrajectory> two{linear(2.0, 0.0, 50)};
  CHECK(velocity_estimate(two, 0.2).max.mean == Approx(2.0));
  std::vector<ExtremesTrajectory> flat{linear(0.0, 3.0, 50)};
  CHECK(velocity_estimate(flat, 0.2).max.mean == 0.0);
  std::vector<ExtremesTrajectory> short_traj{linear(1.0, 0.0, 0)};
  CHECK_THROWS(velocity_estimate(short_traj, 0.0));
}

TEST_CASE("velocity is shift invariant") {
  auto trajs = std::vector<ExtremesTrajectory>{};
  for (std::uint64_t s = 0; s < 5; ++s) trajs.push_back(run(TailModel::pure_pareto(2.0), 16, 80, s));
  auto shifted = trajs;
  for (auto& t : shifted) {
    for (auto& x : t.max) x += 1000.0;
    for (auto& x : t.min) x += 1000.0;
  }
  auto a = velocity_estimate(trajs, 0.25);
  auto b = velocity_estimate(shifted, 0.25);
  CHECK(a.max.mean == Approx(b.max.mean).epsilon(1e-10));
  CHECK(a.min.mean == Approx(b.min.mean).epsilon(1e-10));
}

TEST_CASE("max- and min-based velocities agree on long runs") {
  std::vector<ExtremesTrajectory> trajs;
  for (std::uint64_t s = 0; s < 30; ++s)
    trajs.push_back(run(TailModel::pure_pareto(2.0), 64, 600, derive_seed(3, Stream::Particles, s)));
  auto v = velocity_estimate(trajs, 0.1);
  const double combined = std::hypot(v.max.se, v.min.se);
  CHECK(std::abs(v.max.mean - v.min.mean) <= 2.0 * combined);
}

TEST_CASE("theorem1 at t = 0 is degenerate") {
  FddOptions opts;
  opts.t_grid = {0.0};
  opts.replicas = 500;
  opts.seed = 1;
  auto rep = theorem1_fdd_experiment(TailModel::pure_pareto(2.0), 16, opts);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].ks_max.statistic == 0.0);
  CHECK(rep.rows[0].ks_min.statistic == 0.0);
}

TEST_CASE("theorem2 single-cell grid") {
  SweepOptions opts;
  opts.N_grid = {16};
  opts.n_grid = {60};
  opts.replicas = 10;
  opts.seed = 2;
  auto rep = theorem2_sweep(TailModel::pure_pareto(1.0), opts);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].N == 16);
  CHECK(rep.rows[0].n == 60);
  CHECK(rep.rows[0].predicted == 1.0);
  CHECK(rep.rows[0].replicas == 10);
  CHECK(std::isfinite(rep.rows[0].ratio));

  opts.rho = RhoEstimate{};
  opts.rho->long_run = 1.447;
  auto gt = theorem2_sweep(TailModel::pure_pareto(2.0), opts);
  REQUIRE(gt.rows.size() == 1);
  CHECK(gt.rows[0].ratio == Approx(gt.rows[0].observed / gt.rows[0].predicted));
  opts.rho.reset();
  CHECK_THROWS(theorem2_sweep(TailModel::pure_pareto(2.0), opts));

  auto lt = theorem2_sweep(TailModel::pure_pareto(0.5), opts);
  CHECK(std::isnan(lt.rows[0].ratio));
  CHECK(lt.rows[0].predicted == 0.0);
}

TEST_CASE("upper min: spread event on a tiny fixture") {
  ExtremesTrajectory t;
  t.min = {0.0, 1.0, 2.0, 3.0};
  t.max = {0.0, 1.5, 2.5, 3.5};
  // Y_1(3) = 3 < Y_N(1) + eps needs eps > 1.5 (c = 1).
  CHECK(spread_event(t, 1.0, 1, 3, 1.6));
  CHECK_FALSE(spread_event(t, 1.0, 1, 3, 1.4));

  std::vector<std::size_t> grid{4};
  auto rows = upper_min_experiment(TailModel::pure_pareto(2.0), grid, 0.99, 20, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n0 == 2);
  CHECK(rows[0].n1 == 2 + 0);
  CHECK(rows[0].probability == 1.0);
}
