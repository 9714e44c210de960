#pragma once

#include <optional>
#include <string>

#include "nbrw/rng.hpp"
#include "nbrw/stairs.hpp"
#include "nbrw/tail_model.hpp"

namespace nbrw {

/// E[exp(-lambda W_alpha)] = exp(-Gamma(1 - alpha) lambda^alpha), 0 < alpha < 1.
double stable_laplace(double alpha, double lambda);

/// The exponent alpha * int_0^inf (1 - e^{-lambda x}) x^{-alpha-1} dx evaluated
/// by adaptive quadrature; equals Gamma(1 - alpha) lambda^alpha.
double stable_laplace_exponent_quadrature(double alpha, double lambda);

/// Positive alpha-stable draw with the Laplace transform above
/// (Kanter's representation, scaled by Gamma(1 - alpha)^{1/alpha}).
double sample_stable(double alpha, Rng& rng);

/// b^N_n = int_1^{h^{-1}(n)} h(c_N) / h(c_N x) dx, alpha = 1 only.
double centering_integral(const TailModel& model, long N, double n);

/// int_1^inf h(c_N) / h(c_N x) dx for alpha = 1 with E[X] < inf.
double finite_mean_integral(const TailModel& model, long N);

enum class Regime { AlphaGt1, AlphaEq1Finite, AlphaEq1Infinite, AlphaLt1 };

Regime regime_of(const TailModel& model);
std::string regime_name(Regime regime);

/// Predicted scaling for one (N, n) cell.
///   AlphaGt1:          value = rho_alpha c_N / log2 N (velocity)
///   AlphaEq1Finite:    value = (c_N / log2 N) int_1^inf h(c_N)/h(c_N x) dx (velocity)
///   AlphaEq1Infinite:  value = n b^N_n c_N / log2 N (normalization of X_i(n))
///   AlphaLt1:          value = (2N)^{1/alpha} h^{-1}(n) (normalization; X_i(n)/value ~ W_alpha)
struct VelocityPrediction {
  Regime regime;
  double value = 0.0;
  double standard_error = 0.0;  // from rho_alpha, AlphaGt1 only
  std::string normalization;
};

VelocityPrediction predict_scaling(const TailModel& model, long N, double n,
                                   const std::optional<RhoEstimate>& rho = std::nullopt);

}  // namespace nbrw
