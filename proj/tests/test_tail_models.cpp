#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nbrw/stats.hpp"
#include "nbrw/tail_model.hpp"

using namespace nbrw;
using doctest::Approx;

namespace {

double bisect_log_pareto(double alpha, double beta, double y) {
  auto h = [&](double x) { return std::pow(x, alpha) * std::pow(1.0 + std::log(x), beta); };
  double lo = 1.0, hi = 2.0;
  while (h(hi) < y) hi *= 2.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < y ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

TEST_CASE("survival examples") {
  const auto p2 = TailModel::pure_pareto(2.0);
  CHECK(p2.survival(2.0) == Approx(0.25));
  CHECK(p2.survival(0.5) == 1.0);
  CHECK(p2.survival(1.0) == 1.0);
  const auto lp = TailModel::log_pareto(1.0, 1.0);
  CHECK(lp.survival(std::exp(1.0)) == Approx(0.18393972058572117).epsilon(1e-12));
}

TEST_CASE("h_inverse examples") {
  CHECK(TailModel::pure_pareto(2.0).h_inverse(4.0) == Approx(2.0));
  for (auto m : {TailModel::pure_pareto(0.5), TailModel::pure_pareto(2.0),
                 TailModel::log_pareto(1.0, 2.0), TailModel::log_pareto(1.5, -1.0)})
    CHECK(m.h_inverse(1.0) == m.x_min());

  const auto lp = TailModel::log_pareto(1.0, 1.0);
  const double x = lp.h_inverse(100.0);
  CHECK(x == Approx(23.947209890401926).epsilon(1e-11));
  CHECK(x == Approx(bisect_log_pareto(1.0, 1.0, 100.0)).epsilon(1e-11));
  CHECK(lp.h(x) == Approx(100.0).epsilon(1e-10));
  CHECK_THROWS(lp.h_inverse(0.5));
}

TEST_CASE("construction rules") {
  CHECK_THROWS(TailModel::pure_pareto(0.0));
  CHECK_THROWS(TailModel::log_pareto(1.0, -1.5));
  CHECK_NOTHROW(TailModel::log_pareto(1.0, -1.0));
  CHECK_FALSE(TailModel::pure_pareto(1.0).has_finite_mean());
  CHECK(TailModel::log_pareto(1.0, 2.0).has_finite_mean());
  CHECK_FALSE(TailModel::log_pareto(1.0, 1.0).has_finite_mean());
  CHECK(TailModel::pure_pareto(2.0).has_finite_mean());
  CHECK_FALSE(TailModel::pure_pareto(0.5).has_finite_mean());
  CHECK(TailModel::pure_pareto(2.0).describe() == "PurePareto(alpha=2)");
}

TEST_CASE("jump from uniform") {
  const auto p2 = TailModel::pure_pareto(2.0);
  CHECK(jump_from_uniform(p2, 0.25) == Approx(2.0));
  CHECK(jump_from_uniform(p2, 1.0 - 1e-15) == Approx(1.0));
  CHECK(jump_from_uniform(TailModel::pure_pareto(1.0), 0.25) == Approx(4.0));
  CHECK(jump_from_uniform(TailModel::pure_pareto(0.5), 0.25) == Approx(16.0));
}

TEST_CASE("scaling constant examples") {
  CHECK(scaling_constant(TailModel::pure_pareto(2.0), 1024) ==
        Approx(143.10835055998654).epsilon(1e-12));
  CHECK(scaling_constant(TailModel::pure_pareto(1.0), 2) == Approx(4.0));
  CHECK(scaling_constant(TailModel::pure_pareto(0.5), 4) == Approx(256.0));
  CHECK(scaling_constant(TailModel::pure_pareto(2.0), 3) ==
        Approx(std::sqrt(6.0 * std::log2(3.0))).epsilon(1e-14));
  CHECK_THROWS(scaling_constant(TailModel::pure_pareto(2.0), 1));
}

TEST_CASE("generalized inverse round trip on a grid") {
  for (auto m : {TailModel::pure_pareto(0.5), TailModel::pure_pareto(1.0),
                 TailModel::pure_pareto(2.0), TailModel::log_pareto(1.0, 2.0),
                 TailModel::log_pareto(0.7, 3.0), TailModel::log_pareto(2.0, -2.0)}) {
    CAPTURE(m.describe());
    for (double y = 1.0; y < 1e9; y *= 1.37) {
      const double x = m.h_inverse(y);
      CHECK(m.h(x) >= y * (1.0 - 1e-11));
      if (x > m.x_min()) CHECK(m.h(x * (1.0 - 1e-9)) < y);
    }
  }
}

TEST_CASE("monotonicity") {
  for (auto m : {TailModel::pure_pareto(0.5), TailModel::log_pareto(1.0, 2.0),
                 TailModel::log_pareto(1.0, -1.0)}) {
    CAPTURE(m.describe());
    double prev_s = 2.0, prev_x = 0.0, prev_h = 0.0;
    for (double x = 0.0; x < 1e6; x = x * 1.1 + 0.01) {
      const double s = m.survival(x);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(s <= prev_s);
      prev_s = s;
      if (x >= 1.0) {
        CHECK(m.h(x) >= prev_h);
        prev_h = m.h(x);
      }
    }
    CHECK(m.h(1.0) == 1.0);
    for (double y = 1.0; y < 1e8; y *= 1.5) {
      const double x = m.h_inverse(y);
      CHECK(x >= prev_x);
      prev_x = x;
    }
  }
}

TEST_CASE("sampler: exceedance frequency and one-sample KS") {
  const auto m = TailModel::pure_pareto(2.0);
  Rng rng(2024);
  const int n = 100000;
  std::vector<double> xs(n);
  sample_jumps(m, rng, xs);
  const double p = 1.0 / 9.0;
  const double frac =
      static_cast<double>(std::count_if(xs.begin(), xs.end(), [](double x) { return x > 3.0; })) / n;
  CHECK(std::abs(frac - p) <= 3.0 * std::sqrt(p * (1 - p) / n));

  for (auto model : {m, TailModel::log_pareto(1.0, 2.0)}) {
    Rng r(99);
    std::vector<double> s(n);
    sample_jumps(model, r, s);
    std::sort(s.begin(), s.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const double F = 1.0 - model.survival(s[i]);
      d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    CAPTURE(model.describe());
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("samples are at least x_min") {
  Rng rng(5);
  for (auto m : {TailModel::pure_pareto(0.3), TailModel::log_pareto(1.0, -1.0)})
    for (int i = 0; i < 10000; ++i) CHECK(sample_jump(m, rng) >= 1.0);
}
