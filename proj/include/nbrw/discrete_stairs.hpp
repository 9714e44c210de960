#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbrw/particle_system.hpp"
#include "nbrw/stairs.hpp"
#include "nbrw/tail_model.hpp"

namespace nbrw {

/// Discretised stairs process
///   R(n+1) = R(n) v max_i (R(n - ell) + Y_{n,i}),   R(n) = 0 for n <= 0.
class DspPath {
 public:
  DspPath(std::size_t N, std::size_t ell);

  std::size_t N() const { return N_; }
  std::size_t ell() const { return ell_; }
  /// Last index n with a defined value.
  std::int64_t last() const { return static_cast<std::int64_t>(values_.size()) - 1; }
  /// R(n); zero for n <= 0.
  double operator()(std::int64_t n) const;
  const std::vector<double>& values() const { return values_; }

  /// Appends R(last()+1) from the largest jump of step last().
  void push_max(double max_jump);

 private:
  std::size_t N_;
  std::size_t ell_;
  std::vector<double> values_;  // values_[n] = R(n), n >= 0
};

/// Appends R(n+1); requires n == path.last() and jumps.size() == 2N.
void dsp_step(DspPath& path, std::int64_t n, std::span<const double> jumps);

/// One pathwise inequality failure.
struct Violation {
  std::uint64_t run_id = 0;
  std::int64_t step = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string kind;
};

/// N-BRW against the (N, ceil(log2 N))-DSP on shared rescaled jumps.
struct LowerBoundReport {
  std::size_t ell = 0;
  double c_n = 0.0;
  std::vector<double> brw_min;   // rescaled Y_1(n)
  std::vector<double> brw_max;   // rescaled Y_N(n)
  std::vector<double> dsp;       // R(n)
  std::vector<Violation> violations;
};

/// Checks R(n - ell) <= Y_1(n) ("lower_min") and R(n) <= Y_N(n) ("lower_max")
/// at every n.
LowerBoundReport coupled_lower_bound_run(const TailModel& model, std::size_t N,
                                         std::size_t steps, std::uint64_t seed,
                                         std::uint64_t run_id = 0);

/// m_N = log2 N + log2 delta_N with delta_N = (log2 N)^-q, rounded to an
/// integer. Throws unless N is a power of two and m_N >= 1.
std::size_t theta_delay(std::size_t N, double q);

struct ThetaTrace {
  std::size_t m = 0;
  double delta = 0.0;
  std::vector<double> theta;       // theta_0..theta_steps
  std::vector<double> increments;  // theta_{n+1} - theta_n
  std::vector<double> brw_max;     // Y_N(n)
  std::vector<double> dsp;         // R^{N,m}(n)
  /// mean of increments^p for each requested p.
  std::vector<double> moments;
};

ThetaTrace theta_trace(const TailModel& model, std::size_t N, double q,
                       std::size_t steps, std::uint64_t seed,
                       std::span<const double> moment_orders = {});

/// Three paths driven by one mu_{N,ell} atom stream.
struct SerflingRun {
  std::vector<double> stairs;  // R(n / ell) of the continuous stairs path
  std::vector<double> dsp;     // interval-maxima DSP
  std::vector<double> lower;   // DSP fed by windows of width 1/(ell+1)
  std::size_t atoms = 0;
  std::vector<Violation> violations;
};

/// Pure core: builds the three paths from a given stream and checks
/// stairs(n) >= dsp(n) >= lower(n) for n = 0..steps.
SerflingRun serfling_from_atoms(const AtomStream& atoms, std::size_t ell,
                                std::size_t steps, std::uint64_t run_id = 0);

/// Default truncation for mu_{N,ell} streams: twice the support floor.
double default_serfling_epsilon(const TailModel& model, std::size_t N);

SerflingRun serfling_coupled_run(const TailModel& model, std::size_t N, std::size_t ell,
                                 std::size_t steps, std::uint64_t seed,
                                 double eps = 0.0, std::uint64_t run_id = 0);

struct SerflingSamples {
  std::vector<double> jump_maxima;    // max of 2N rescaled jumps, 0 if <= eps
  std::vector<double> window_maxima;  // max mark in a window, 0 if empty
};

/// `window_ell` sets the window width 1/window_ell; pass ell + 1 for the
/// negative control.
SerflingSamples serfling_samples(const TailModel& model, std::size_t N, std::size_t ell,
                                 std::size_t samples, std::uint64_t seed, double eps,
                                 std::size_t window_ell);

}  // namespace nbrw
