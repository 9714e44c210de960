#include "nbrw/limit_laws.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nbrw {

namespace {

void require_stable_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("stable law: alpha must lie in (0, 1)");
}

void require_alpha_one(const TailModel& model) {
  if (model.alpha() != 1.0)
    throw std::invalid_argument("centering integral: requires alpha == 1");
}

double log_h(const TailModel& model, double log_x) {
  if (log_x <= 0.0) return 0.0;
  double v = model.alpha() * log_x;
  if (model.family() == TailFamily::LogPareto) v += model.beta() * std::log1p(log_x);
  return v;
}

/// int over u in [0, upper] of g(e^u) e^u du with g(x) = h(c_N)/h(c_N x),
/// evaluated in log space so that upper = inf is safe.
double log_scale_integral(const TailModel& model, long N, double upper) {
  using boost::math::quadrature::gauss_kronrod;
  const double log_c = std::log(scaling_constant(model, N));
  const double log_hc = log_h(model, log_c);
  auto integrand = [&](double u) { return std::exp(u + log_hc - log_h(model, log_c + u)); };
  double error = 0.0;
  return gauss_kronrod<double, 31>::integrate(integrand, 0.0, upper, 15, 1e-11, &error);
}

}  // namespace

double stable_laplace(double alpha, double lambda) {
  require_stable_alpha(alpha);
  if (lambda < 0.0) throw std::invalid_argument("stable_laplace: lambda must be >= 0");
  return std::exp(-std::tgamma(1.0 - alpha) * std::pow(lambda, alpha));
}

double stable_laplace_exponent_quadrature(double alpha, double lambda) {
  require_stable_alpha(alpha);
  using boost::math::quadrature::gauss_kronrod;
  // Split at 1/lambda. Below: x = v^{1/(1-alpha)} removes the x^{-alpha}
  // singularity. Above: x = split * w^{-1/alpha} maps the tail onto (0, 1]
  // with a bounded integrand.
  if (lambda == 0.0) return 0.0;
  const double split = 1.0 / lambda;
  const double k = 1.0 / (1.0 - alpha);
  auto head = [&](double v) {
    if (v <= 0.0) return lambda * k;
    const double x = std::pow(v, k);
    return -std::expm1(-lambda * x) * std::pow(x, -alpha - 1.0) * k * std::pow(v, k - 1.0);
  };
  const double tail_scale = std::pow(split, -alpha) / alpha;
  auto tail = [&](double w) {
    if (w <= 0.0) return tail_scale;
    return -std::expm1(-lambda * split * std::pow(w, -1.0 / alpha)) * tail_scale;
  };
  double err = 0.0;
  const double a = gauss_kronrod<double, 61>::integrate(head, 0.0, std::pow(split, 1.0 / k), 15, 1e-13, &err);
  const double b = gauss_kronrod<double, 61>::integrate(tail, 0.0, 1.0, 15, 1e-13, &err);
  return alpha * (a + b);
}

double sample_stable(double alpha, Rng& rng) {
  require_stable_alpha(alpha);
  const double u = std::numbers::pi * rng.uniform();
  const double e = -std::log(rng.uniform());
  // Kanter: S = sin(a U) / sin(U)^{1/a} * (sin((1-a) U) / E)^{(1-a)/a}
  // has E[exp(-lambda S)] = exp(-lambda^a).
  const double s = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
                   std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return std::pow(std::tgamma(1.0 - alpha), 1.0 / alpha) * s;
}

double centering_integral(const TailModel& model, long N, double n) {
  require_alpha_one(model);
  if (n < 1.0) throw std::invalid_argument("centering integral: requires n >= 1");
  const double upper = model.h_inverse(n);
  if (upper <= 1.0) return 0.0;
  if (model.family() == TailFamily::PurePareto) return std::log(upper);
  return log_scale_integral(model, N, std::log(upper));
}

double finite_mean_integral(const TailModel& model, long N) {
  require_alpha_one(model);
  if (!model.has_finite_mean())
    throw std::invalid_argument("finite_mean_integral: E[X] is infinite for this model");
  return log_scale_integral(model, N, INFINITY);
}

Regime regime_of(const TailModel& model) {
  if (model.alpha() > 1.0) return Regime::AlphaGt1;
  if (model.alpha() < 1.0) return Regime::AlphaLt1;
  return model.has_finite_mean() ? Regime::AlphaEq1Finite : Regime::AlphaEq1Infinite;
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::AlphaGt1: return "AlphaGt1";
    case Regime::AlphaEq1Finite: return "AlphaEq1Finite";
    case Regime::AlphaEq1Infinite: return "AlphaEq1Infinite";
    case Regime::AlphaLt1: return "AlphaLt1";
  }
  return "unknown";
}

VelocityPrediction predict_scaling(const TailModel& model, long N, double n,
                                   const std::optional<RhoEstimate>& rho) {
  const double c_n = scaling_constant(model, N);
  const double log2n = std::log2(static_cast<double>(N));
  VelocityPrediction p{regime_of(model), 0.0, 0.0, {}};
  switch (p.regime) {
    case Regime::AlphaGt1: {
      if (!rho)
        throw std::invalid_argument("predict_scaling: AlphaGt1 needs a rho_alpha estimate");
      p.value = rho->long_run * c_n / log2n;
      p.standard_error = rho->long_run_se * c_n / log2n;
      p.normalization = "velocity = rho_alpha * c_N / log2(N)";
      break;
    }
    case Regime::AlphaEq1Finite:
      p.value = finite_mean_integral(model, N) * c_n / log2n;
      p.normalization = "velocity = (c_N / log2(N)) * int_1^inf h(c_N)/h(c_N x) dx";
      break;
    case Regime::AlphaEq1Infinite:
      p.value = n * centering_integral(model, N, n) * c_n / log2n;
      p.normalization = "X_i(n) / (n * b_n^N * c_N / log2(N)) -> 1";
      break;
    case Regime::AlphaLt1:
      p.value = std::pow(2.0 * static_cast<double>(N), 1.0 / model.alpha()) * model.h_inverse(n);
      p.normalization = "X_i(n) / ((2N)^(1/alpha) * h^-1(n)) -> W_alpha";
      break;
  }
  return p;
}

}  // namespace nbrw
