#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nbrw/config.hpp"
#include "nbrw/stairs.hpp"

namespace nbrw {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitConfig = 2 };

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;     // relative to the output directory
  std::vector<std::string> messages;  // warnings and verdict lines
};

/// Runs one experiment and writes its CSVs, plot files and manifest.json into
/// config.out. Only that directory is touched. Throws ConfigError for problems
/// found while loading inputs (e.g. an unreadable rho cache).
RunResult run_experiment(const ExperimentConfig& config);

/// Cached stairs-growth estimate.
nlohmann::ordered_json rho_cache_json(const RhoEstimate& est, double alpha, double epsilon,
                                      double T, std::uint64_t seed);
RhoEstimate read_rho_cache(const std::string& path, double alpha);

/// Versions of the toolchain and libraries, for the manifest.
nlohmann::ordered_json build_versions();

}  // namespace nbrw
