#pragma once

#include <span>
#include <string>
#include <vector>

#include "nbrw/particle_system.hpp"

namespace nbrw {

/// Sorted sample with provenance.
class EmpiricalSample {
 public:
  EmpiricalSample() = default;
  explicit EmpiricalSample(std::vector<double> values, std::string provenance = {});

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const std::string& provenance() const { return provenance_; }
  /// Fraction of values <= x.
  double cdf(double x) const;

 private:
  std::vector<double> values_;
  std::string provenance_;
};

struct KsResult {
  double statistic = 0.0;
  double crit05 = 0.0;
  double crit01 = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Two-sample KS distance sup_x |F_a(x) - F_b(x)| with asymptotic critical
/// values c(a) sqrt((n + m) / (n m)), c(a) = sqrt(-ln(a/2) / 2).
KsResult ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b);

double ks_critical_value(double level, std::size_t n_a, std::size_t n_b);

struct MeanCi {
  double mean = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t count = 0;
};

/// Mean with normal-theory 95% interval; se is NaN for fewer than 2 values.
MeanCi mean_ci(std::span<const double> values);

struct VelocityEstimate {
  MeanCi max;  // from X_N
  MeanCi min;  // from X_1
  std::size_t burn_in = 0;
};

/// Slope (X(n_final) - X(n_burn)) / (n_final - n_burn) per trajectory,
/// aggregated over replicas, with n_burn = floor(fraction * n_final).
VelocityEstimate velocity_estimate(std::span<const ExtremesTrajectory> trajectories,
                                   double burn_in_fraction);

}  // namespace nbrw
