#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbrw/rng.hpp"
#include "nbrw/tail_model.hpp"

namespace nbrw {

/// A stairs measure mu on (0, inf), described by its tail M(x) = mu([x, inf)).
///
///   MuAlpha(alpha):      M(x) = x^-alpha
///   MuN(model, N, g):    M(x) = -g * ln(1 - 1/h(c_N x))
///   MuNL(model, N, l):   same with g = 2 N l
///
/// For the last two M is infinite at and below x_min / c_N, so simulations
/// must truncate strictly above that point.
class StairsMeasure {
 public:
  enum class Kind { MuAlpha, MuN, MuNL };

  static StairsMeasure mu_alpha(double alpha);
  /// gamma defaults to 2 N log2 N.
  static StairsMeasure mu_n(const TailModel& model, long N,
                            std::optional<double> gamma = std::nullopt);
  static StairsMeasure mu_nl(const TailModel& model, long N, long ell);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double scale() const { return c_n_; }
  double gamma() const { return gamma_; }
  long N() const { return N_; }
  long ell() const { return ell_; }
  const std::optional<TailModel>& model() const { return model_; }

  /// M(x); +inf where the measure has infinite mass above x.
  double tail(double x) const;
  /// Generalized inverse inf{x > 0 : M(x) <= m} for m > 0.
  double tail_inverse(double m) const;
  /// Smallest admissible truncation level (exclusive).
  double support_floor() const;

  /// Draw a mark from mu restricted to (threshold, inf).
  double sample_mark_above(double threshold, Rng& rng) const;

  std::string label() const;

 private:
  StairsMeasure() = default;

  Kind kind_ = Kind::MuAlpha;
  double alpha_ = 0.0;
  std::optional<TailModel> model_;
  long N_ = 0;
  long ell_ = 0;
  double gamma_ = 0.0;
  double c_n_ = 1.0;
};

struct Atom {
  double t;
  double x;
};

/// Poisson atoms on (0, T] x (eps, inf), time-ascending with distinct times.
struct AtomStream {
  double horizon = 0.0;
  double epsilon = 0.0;
  std::vector<Atom> atoms;
};

/// The spacing rule of chains: an atom at `later` may follow one at
/// `earlier` iff earlier + 1 <= later. Every construction uses this one
/// predicate so that all of them agree bit for bit.
constexpr bool spaced(double earlier, double later) { return earlier + 1.0 <= later; }

/// Cadlag nondecreasing step function, zero before the first jump.
class StairsPath {
 public:
  StairsPath() = default;
  StairsPath(std::vector<double> jump_times, std::vector<double> values);

  const std::vector<double>& jump_times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t jump_count() const { return times_.size(); }

  /// R(t), right-continuous.
  double value_at(double t) const;
  /// R(t-).
  double value_before(double t) const;
  /// R(t - 1) under the chain spacing rule: last jump s with spaced(s, t).
  double lagged_value(double t) const;
  double final_value() const { return values_.empty() ? 0.0 : values_.back(); }

  void push_jump(double t, double value);

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Draws the truncated Poisson cloud: Poisson(T M(eps)) atoms, times uniform
/// on (0, T] (sorted, equal times resampled), marks by tail inversion.
AtomStream simulate_atoms(const StairsMeasure& measure, double T, double eps,
                          Rng& rng);

/// Reference semantics: best chain with unit spacing ending at or before t,
///   R(t) = max(0, max_{t_i <= t} f(i)),  f(i) = x_i + max(0, max{f(j) : spaced(t_j, t_i)}).
class ChainEvaluator {
 public:
  explicit ChainEvaluator(const AtomStream& atoms);
  double operator()(double t) const;
  /// Best chain value f(i) ending exactly at atom i.
  const std::vector<double>& chain_ends() const { return f_; }

 private:
  std::vector<double> times_;
  std::vector<double> f_;
  std::vector<double> prefix_max_;
};

double chain_value(const AtomStream& atoms, double t);

/// Incremental record sweep: atom (t, x) makes a jump to R(t-1) + x iff that
/// exceeds R(t-).
StairsPath build_path(const AtomStream& atoms);

/// Regeneration times tau_0 = 0 < tau_1 < ... and their i.i.d. increments.
struct RegenerationData {
  std::vector<double> taus;          // starts with tau_0 = 0
  std::vector<double> tau_increments;
  std::vector<double> r_increments;

  std::size_t cycles() const { return tau_increments.size(); }
};

/// First tau > after + 1 with R(tau) = R(tau - 1), provided it is determined by
/// the jumps up to `known_until` (i.e. tau <= known_until). Convention: the
/// infimum is reported even when it equals after + 1 itself.
std::optional<double> next_regeneration(const StairsPath& path, double after,
                                        double known_until);

/// All regenerations tau_n <= T - 1.
RegenerationData detect_regenerations(const StairsPath& path, double T);

/// Exact simulation of the truncated stairs process that draws only the atoms
/// able to create a jump. Between events the gap R(t-) - R(t-1) is constant,
/// so the next jump-creating atom arrives at rate M(max(gap, eps)) with a mark
/// drawn above that threshold. Atoms below the gap never move the path, so the
/// law equals build_path(simulate_atoms(...)).
class StairsSimulator {
 public:
  StairsSimulator(const StairsMeasure& measure, double eps, Rng& rng);

  /// Extends the path to cover [0, horizon].
  void advance_to(double horizon);
  double horizon() const { return now_; }
  const StairsPath& path() const { return path_; }

 private:
  const StairsMeasure& measure_;
  double eps_;
  double eps_tail_;
  Rng& rng_;
  StairsPath path_;
  double now_ = 0.0;
  std::ptrdiff_t lag_index_ = -1;  // last jump s with spaced(s, now_)
};

struct RhoEstimate {
  double long_run = 0.0;        // mean over replicas of R(T) / T
  double long_run_se = 0.0;     // bootstrap standard error
  double regenerative = 0.0;    // sum R-increments / sum tau-increments
  double regenerative_se = 0.0;
  std::size_t cycles = 0;
  std::size_t replicas = 0;
  std::vector<std::string> warnings;
};

struct RhoOptions {
  double T = 2000.0;
  double epsilon = 1e-3;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t bootstrap_resamples = 200;
};

/// Long-run and regenerative estimators of rho = lim R(t)/t from given paths.
RhoEstimate estimate_rho_from_paths(std::span<const StairsPath> paths, double T,
                                    std::uint64_t bootstrap_seed,
                                    std::size_t bootstrap_resamples = 200);

RhoEstimate estimate_rho(const StairsMeasure& measure, const RhoOptions& options);

/// One simulated first regeneration cycle.
struct FirstCycle {
  double tau = 0.0;
  double r_tau = 0.0;      // R(tau_1)
  double jump_before = 0.0;  // Delta R(tau_1 - 1)
};

FirstCycle simulate_first_cycle(const StairsMeasure& measure, double eps, Rng& rng);

struct TailRow {
  double x;
  double empirical;   // P(R(tau_1) > x)
  double predicted;   // E[tau_1] * M(x)
  double ratio;
  std::size_t exceedances;
};

struct TailTable {
  double mean_tau = 0.0;
  std::size_t replicas = 0;
  /// Cycles where Delta R(tau_1 - 1) > R(tau_1); must be zero.
  std::size_t dominance_violations = 0;
  std::vector<TailRow> rows;
};

TailTable tail_table_from_cycles(std::span<const FirstCycle> cycles,
                                 const StairsMeasure& measure,
                                 std::span<const double> x_grid);

TailTable regeneration_tail_table(const StairsMeasure& measure, std::size_t replicas,
                                  std::uint64_t seed, std::span<const double> x_grid,
                                  double eps, std::size_t workers = 1);

}  // namespace nbrw
