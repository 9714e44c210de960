#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbrw/tail_model.hpp"

namespace nbrw {

enum class ExperimentKind {
  NbrwRun,
  StairsRun,
  RhoEstimate,
  CouplingCheck,
  SerflingCheck,
  Theorem1Fdd,
  Theorem2Sweep,
  UpperMin,
};

std::string kind_name(ExperimentKind kind);
std::optional<ExperimentKind> kind_from_name(const std::string& name);

/// Invalid configuration. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config error [" + key + "]: " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ModelSpec {
  std::string family = "PurePareto";
  double alpha = 2.0;
  double beta = 0.0;

  TailModel build() const;
};

/// Fully resolved configuration: every default is filled in, so the echo in
/// the manifest reproduces the run on its own.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::NbrwRun;
  ModelSpec model;
  std::vector<std::size_t> N;
  std::vector<std::size_t> n;  // one horizon per N
  double T = 0.0;
  double epsilon = 0.0;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 1;
  std::vector<double> t_grid;
  std::size_t ell = 0;  // 0: ceil(log2 N)
  std::size_t samples = 0;
  double burn_in_blocks = 1.0;
  std::string rho_cache;
  double rho_T = 2000.0;
  std::size_t rho_replicas = 64;
  double rho_epsilon = 1e-4;
  std::size_t snapshot_stride = 0;

  nlohmann::ordered_json to_json() const;
};

/// Known top-level keys, in echo order.
const std::vector<std::string>& config_keys();

/// Builds the config for `kind` from a file document and flag overrides.
/// Flags win; "model" merges field by field. A manifest written by a previous
/// run is accepted as a file document (its "config" entry is used). Unknown
/// keys, wrong types and out-of-range values throw ConfigError.
ExperimentConfig parse_config(ExperimentKind kind, const nlohmann::json& file,
                              const nlohmann::json& overrides = nlohmann::json::object());

nlohmann::json load_json_file(const std::string& path);

}  // namespace nbrw
