#include "nbrw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nbrw {

EmpiricalSample::EmpiricalSample(std::vector<double> values, std::string provenance)
    : values_(std::move(values)), provenance_(std::move(provenance)) {
  if (values_.empty()) throw std::invalid_argument("EmpiricalSample: empty sample");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalSample::cdf(double x) const {
  const auto k = std::upper_bound(values_.begin(), values_.end(), x) - values_.begin();
  return static_cast<double>(k) / static_cast<double>(values_.size());
}

double ks_critical_value(double level, std::size_t n_a, std::size_t n_b) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double n = static_cast<double>(n_a), m = static_cast<double>(n_b);
  return c * std::sqrt((n + m) / (n * m));
}

KsResult ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("ks_two_sample: empty sample");
  const auto va = a.values(), vb = b.values();
  const double na = static_cast<double>(va.size()), nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < va.size() && j < vb.size()) {
    const double x = std::min(va[i], vb[j]);
    while (i < va.size() && va[i] <= x) ++i;
    while (j < vb.size() && vb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n_a = va.size();
  r.n_b = vb.size();
  r.crit05 = ks_critical_value(0.05, r.n_a, r.n_b);
  r.crit01 = ks_critical_value(0.01, r.n_a, r.n_b);
  return r;
}

MeanCi mean_ci(std::span<const double> values) {
  MeanCi m;
  m.count = values.size();
  if (values.empty()) {
    m.mean = m.se = m.ci_lo = m.ci_hi = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const double n = static_cast<double>(values.size());
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    m.se = std::numeric_limits<double>::quiet_NaN();
    m.ci_lo = m.ci_hi = m.mean;
    return m;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(ss / (n - 1.0) / n);
  m.ci_lo = m.mean - 1.96 * m.se;
  m.ci_hi = m.mean + 1.96 * m.se;
  return m;
}

VelocityEstimate velocity_estimate(std::span<const ExtremesTrajectory> trajectories,
                                   double burn_in_fraction) {
  if (trajectories.empty()) throw std::invalid_argument("velocity_estimate: no trajectories");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw std::invalid_argument("velocity_estimate: burn-in fraction must lie in [0, 1)");
  VelocityEstimate est;
  std::vector<double> slopes_max, slopes_min;
  for (const auto& traj : trajectories) {
    if (traj.size() < 2) throw std::invalid_argument("velocity_estimate: trajectory too short");
    const std::size_t last = traj.size() - 1;
    const auto burn = static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(last)));
    if (burn >= last) throw std::invalid_argument("velocity_estimate: trajectory not longer than burn-in");
    est.burn_in = burn;
    const double span = static_cast<double>(last - burn);
    slopes_max.push_back((traj.max[last] - traj.max[burn]) / span);
    slopes_min.push_back((traj.min[last] - traj.min[burn]) / span);
  }
  est.max = mean_ci(slopes_max);
  est.min = mean_ci(slopes_min);
  return est;
}

}  // namespace nbrw
