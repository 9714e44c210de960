#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nbrw/limit_laws.hpp"

using namespace nbrw;
using doctest::Approx;

namespace {

// Composite Simpson, split at x = 1: power substitution below, log above.
double simpson_exponent(double alpha, double lambda) {
  auto f = [&](double x) { return -std::expm1(-lambda * x) * std::pow(x, -alpha - 1.0); };
  auto simpson = [](auto g, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = g(a) + g(b);
    for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  // x = v^k on (0,1], k = 1/(1-alpha) removes the singularity.
  const double k = 1.0 / (1.0 - alpha);
  const double low = simpson(
      [&](double v) { return v <= 0.0 ? lambda * k : f(std::pow(v, k)) * k * std::pow(v, k - 1.0); },
      0.0, 1.0, 20000);
  // x = e^s on [0, 60].
  const double high =
      simpson([&](double s) { return f(std::exp(s)) * std::exp(s); }, 0.0, 60.0, 60000);
  return alpha * (low + high);
}

double riemann_log_scale(const TailModel& m, long N, double upper) {
  const double c = scaling_constant(m, N);
  const double hc = m.h(c);
  const int n = 400000;
  const double L = std::log(upper);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = (i + 0.5) * L / n;
    const double x = std::exp(y);
    s += hc / m.h(c * x) * x;
  }
  return s * L / n;
}

}  // namespace

TEST_CASE("stable Laplace closed form") {
  CHECK(stable_laplace(0.5, 0.0) == 1.0);
  CHECK(stable_laplace(0.5, 1.0) == Approx(0.16991552946752621).epsilon(1e-12));
  CHECK(stable_laplace(0.5, 4.0) == Approx(0.028871287154229768).epsilon(1e-12));
}

TEST_CASE("quadrature of the Laplace exponent") {
  for (double alpha : {0.3, 0.5, 0.8})
    for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
      CAPTURE(alpha);
      CAPTURE(lambda);
      const double closed = std::tgamma(1.0 - alpha) * std::pow(lambda, alpha);
      CHECK(stable_laplace_exponent_quadrature(alpha, lambda) == Approx(closed).epsilon(1e-6));
      CHECK(simpson_exponent(alpha, lambda) == Approx(closed).epsilon(1e-5));
    }
}

TEST_CASE("stable sampler") {
  Rng rng(10);
  const int n = 100000;
  std::vector<double> w(n);
  for (auto& x : w) {
    x = sample_stable(0.5, rng);
    REQUIRE(x > 0.0);
  }
  double s = 0.0, s2 = 0.0;
  for (double x : w) {
    const double e = std::exp(-x);
    s += e;
    s2 += e * e;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean - std::exp(-std::sqrt(M_PI))) <= 3.0 * sd / std::sqrt(double(n)));

  // P(W > x) x^alpha settles: the tail constant is 1 under this scaling.
  std::sort(w.begin(), w.end());
  std::vector<double> ratios;
  for (double x : {100.0, 400.0, 1600.0}) {
    const auto above = w.end() - std::upper_bound(w.begin(), w.end(), x);
    ratios.push_back(static_cast<double>(above) / n * std::sqrt(x));
  }
  for (double r : ratios) CHECK(r == Approx(1.0).epsilon(0.15));
}

TEST_CASE("centering integral") {
  const auto p1 = TailModel::pure_pareto(1.0);
  CHECK(centering_integral(p1, 16, 50.0) == Approx(std::log(50.0)));
  CHECK(centering_integral(p1, 16, 1.0) == 0.0);
  CHECK_THROWS(centering_integral(TailModel::pure_pareto(2.0), 16, 5.0));

  const auto lp = TailModel::log_pareto(1.0, 2.0);
  const double upper = lp.h_inverse(1000.0);
  const double got = centering_integral(lp, 16, 1000.0);
  CHECK(got == Approx(1.7905755054303054).epsilon(1e-9));
  CHECK(got == Approx(riemann_log_scale(lp, 16, upper)).epsilon(1e-6));

  const double L = std::log(scaling_constant(lp, 16));
  CHECK(finite_mean_integral(lp, 16) == Approx(1.0 + L).epsilon(1e-8));
  CHECK_THROWS(finite_mean_integral(p1, 16));
}

TEST_CASE("regimes and predictions") {
  CHECK(regime_of(TailModel::pure_pareto(2.0)) == Regime::AlphaGt1);
  CHECK(regime_of(TailModel::pure_pareto(1.0)) == Regime::AlphaEq1Infinite);
  CHECK(regime_of(TailModel::log_pareto(1.0, 2.0)) == Regime::AlphaEq1Finite);
  CHECK(regime_of(TailModel::pure_pareto(0.5)) == Regime::AlphaLt1);

  RhoEstimate rho;
  rho.long_run = 1.447;
  rho.long_run_se = 0.004;
  auto p = predict_scaling(TailModel::pure_pareto(2.0), 1024, 300.0, rho);
  CHECK(p.value == Approx(1.447 * 143.10835055998654 / 10.0));
  CHECK(p.standard_error == Approx(0.004 * 14.310835055998654));
  CHECK_THROWS(predict_scaling(TailModel::pure_pareto(2.0), 1024, 300.0));

  auto q = predict_scaling(TailModel::pure_pareto(1.0), 16, 200.0);
  CHECK(q.value == Approx(200.0 * std::log(200.0) * 128.0 / 4.0));

  auto w = predict_scaling(TailModel::pure_pareto(0.5), 16, 400.0);
  CHECK(w.value == Approx(1024.0 * 160000.0));
}
