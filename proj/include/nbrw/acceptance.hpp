#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nbrw {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 2718;
  std::size_t workers = 1;
  /// Scratch space for the reproducibility reruns.
  std::filesystem::path scratch = "acceptance_scratch";
  /// Criteria to run; empty means all of 1..13.
  std::vector<int> only;
};

/// Number of criteria in the suite.
inline constexpr int kCriteria = 13;

/// Runs the suite. `on_result` (if set) is called as each criterion finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    void (*on_result)(const CriterionResult&) = nullptr);

std::string format_result_line(const CriterionResult& r);

}  // namespace nbrw
