#include "nbrw/testing/oracles.hpp"

#include <algorithm>
#include <stdexcept>

namespace nbrw::oracle {

double exhaustive_chain_value(const std::vector<Atom>& atoms, double t) {
  const std::size_t n = atoms.size();
  if (n > 20) throw std::invalid_argument("exhaustive_chain_value: too many atoms");
  double best = 0.0;
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    double sum = 0.0;
    double prev = 0.0;
    bool first = true, ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1UL)) continue;
      if (atoms[i].t > t) ok = false;
      else if (!first && !(prev + 1.0 <= atoms[i].t)) ok = false;
      sum += atoms[i].x;
      prev = atoms[i].t;
      first = false;
    }
    if (ok) best = std::max(best, sum);
  }
  return best;
}

std::vector<double> brw_step_full_sort(const std::vector<double>& positions,
                                       const std::vector<double>& jumps) {
  std::vector<double> sorted = positions;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> children;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    children.push_back(sorted[i] + jumps[2 * i]);
    children.push_back(sorted[i] + jumps[2 * i + 1]);
  }
  std::sort(children.begin(), children.end());
  return {children.end() - static_cast<std::ptrdiff_t>(sorted.size()), children.end()};
}

std::vector<double> dsp_straight_line(std::size_t ell,
                                      const std::vector<std::vector<double>>& jumps) {
  std::vector<double> r{0.0};
  for (std::size_t n = 0; n < jumps.size(); ++n) {
    const double lagged = n >= ell ? r[n - ell] : 0.0;
    double next = r[n];
    for (double y : jumps[n]) next = std::max(next, lagged + y);
    r.push_back(next);
  }
  return r;
}

double regeneration_scan(const std::vector<double>& jump_times, double after) {
  std::vector<double> candidates{after + 1.0};
  for (double s : jump_times)
    if (s + 1.0 > after + 1.0) candidates.push_back(s + 1.0);
  std::sort(candidates.begin(), candidates.end());
  for (double c : candidates) {
    bool quiet = true;
    for (double s : jump_times)
      if (!(s + 1.0 <= c) && s <= c) quiet = false;
    if (quiet) return c;
  }
  throw std::logic_error("regeneration_scan: no candidate");
}

}  // namespace nbrw::oracle
