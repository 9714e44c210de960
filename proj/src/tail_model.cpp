#include "nbrw/tail_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nbrw {

TailModel TailModel::pure_pareto(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("TailModel: alpha must be positive");
  return TailModel(TailFamily::PurePareto, alpha, 0.0);
}

TailModel TailModel::log_pareto(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("TailModel: alpha must be positive");
  if (!std::isfinite(beta) || beta < -alpha)
    throw std::invalid_argument("TailModel: LogPareto needs beta >= -alpha");
  return TailModel(TailFamily::LogPareto, alpha, beta);
}

double TailModel::h(double x) const {
  if (x <= 1.0) return 1.0;
  switch (family_) {
    case TailFamily::PurePareto:
      return std::pow(x, alpha_);
    case TailFamily::LogPareto:
      return std::pow(x, alpha_) * std::pow(1.0 + std::log(x), beta_);
  }
  return 1.0;
}

double TailModel::survival(double x) const {
  if (x <= 1.0) return 1.0;
  return std::min(1.0, 1.0 / h(x));
}

double TailModel::h_inverse(double y) const {
  if (!(y >= 1.0)) throw std::invalid_argument("h_inverse: requires y >= 1");
  if (y == 1.0) return 1.0;
  if (std::isinf(y)) return INFINITY;
  if (family_ == TailFamily::PurePareto) {
    if (alpha_ == 2.0) return std::sqrt(y);
    if (alpha_ == 1.0) return y;
    return std::pow(y, 1.0 / alpha_);
  }

  // Bisection on [lo, hi] with h(lo) < y <= h(hi).
  double lo = 1.0;
  double hi = std::max(2.0, std::pow(y, 1.0 / alpha_));
  while (h(hi) < y) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) >= y)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

bool TailModel::has_finite_mean() const {
  if (alpha_ > 1.0) return true;
  if (alpha_ < 1.0) return false;
  // alpha == 1: E[X] = 1 + int_1^inf dx / (x (1 + ln x)^beta).
  return family_ == TailFamily::LogPareto && beta_ > 1.0;
}

std::string TailModel::family_name() const {
  return family_ == TailFamily::PurePareto ? "PurePareto" : "LogPareto";
}

std::string TailModel::describe() const {
  std::ostringstream out;
  out << family_name() << "(alpha=" << alpha_;
  if (family_ == TailFamily::LogPareto) out << ";beta=" << beta_;
  out << ")";
  return out.str();
}

double jump_from_uniform(const TailModel& model, double u) {
  if (model.family() == TailFamily::PurePareto) {
    const double a = model.alpha();
    if (a == 2.0) return 1.0 / std::sqrt(u);
    if (a == 1.0) return 1.0 / u;
    return std::exp(-std::log(u) / a);
  }
  return model.h_inverse(1.0 / u);
}

void sample_jumps(const TailModel& model, Rng& rng, std::span<double> out) {
  for (double& x : out) x = jump_from_uniform(model, rng.uniform());
}

double scaling_constant(const TailModel& model, long N) {
  if (N < 2) throw std::invalid_argument("scaling_constant: requires N >= 2");
  const double n = static_cast<double>(N);
  return model.h_inverse(2.0 * n * std::log2(n));
}

}  // namespace nbrw
