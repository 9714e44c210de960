#pragma once

#include <span>
#include <string>

#include "nbrw/rng.hpp"

namespace nbrw {

enum class TailFamily { PurePareto, LogPareto };

/// Jump law on [1, inf) described through P(X > x) = 1 / h(x).
///
///   PurePareto: h(x) = x^alpha
///   LogPareto:  h(x) = x^alpha * (1 + ln x)^beta
///
/// and h = 1 below the support edge x_min = 1. The model is immutable after
/// construction and can be shared freely between threads.
class TailModel {
 public:
  static TailModel pure_pareto(double alpha);
  /// Requires beta >= -alpha so that h stays nondecreasing on [1, inf).
  static TailModel log_pareto(double alpha, double beta);

  TailFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double x_min() const { return 1.0; }

  double h(double x) const;
  /// min(1, 1/h(x)); exactly 1 for x <= x_min.
  double survival(double x) const;
  /// Generalized inverse inf{x >= x_min : h(x) >= y}. Throws for y < 1.
  double h_inverse(double y) const;

  /// E[X] < inf. For alpha == 1 this depends on the slowly varying factor.
  bool has_finite_mean() const;

  std::string family_name() const;
  /// Compact provenance string, e.g. "PurePareto(alpha=2)".
  std::string describe() const;

  bool operator==(const TailModel&) const = default;

 private:
  TailModel(TailFamily family, double alpha, double beta)
      : family_(family), alpha_(alpha), beta_(beta) {}

  TailFamily family_;
  double alpha_;
  double beta_;
};

/// Inverse-transform draw from a given uniform u in (0,1): h_inverse(1/u).
double jump_from_uniform(const TailModel& model, double u);

inline double sample_jump(const TailModel& model, Rng& rng) {
  return jump_from_uniform(model, rng.uniform());
}

/// Fills `out` with i.i.d. jumps, in index order.
void sample_jumps(const TailModel& model, Rng& rng, std::span<double> out);

/// c_N = h^{-1}(2 N log2 N), with the exact binary logarithm of N.
double scaling_constant(const TailModel& model, long N);

}  // namespace nbrw
