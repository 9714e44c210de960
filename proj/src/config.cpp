#include "nbrw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "nbrw/discrete_stairs.hpp"
#include "nbrw/particle_system.hpp"

namespace nbrw {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKinds{
    {ExperimentKind::NbrwRun, "nbrw-run"},
    {ExperimentKind::StairsRun, "stairs-run"},
    {ExperimentKind::RhoEstimate, "rho-estimate"},
    {ExperimentKind::CouplingCheck, "coupling-check"},
    {ExperimentKind::SerflingCheck, "serfling-check"},
    {ExperimentKind::Theorem1Fdd, "theorem1-fdd"},
    {ExperimentKind::Theorem2Sweep, "theorem2-sweep"},
    {ExperimentKind::UpperMin, "upper-min"},
};

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigError(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "expected a finite number");
  return x;
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

std::vector<std::size_t> as_size_list(const json& v, const std::string& key) {
  std::vector<std::size_t> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(as_u64(e, key));
  } else {
    out.push_back(as_u64(v, key));
  }
  return out;
}

std::vector<double> as_double_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(as_double(e, key));
  } else {
    out.push_back(as_double(v, key));
  }
  return out;
}

void apply_defaults(ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::NbrwRun:
      c.N = {1024};
      c.replicas = 1;
      break;
    case ExperimentKind::StairsRun:
      c.T = 100.0;
      c.epsilon = 0.01;
      c.replicas = 1;
      break;
    case ExperimentKind::RhoEstimate:
      c.T = 2000.0;
      c.epsilon = 1e-4;
      c.replicas = 64;
      break;
    case ExperimentKind::CouplingCheck:
      c.N = {4, 16, 64, 256};
      c.replicas = 50;
      break;
    case ExperimentKind::SerflingCheck:
      c.N = {64};
      c.n = {200};
      c.replicas = 20;
      c.samples = 10000;
      break;
    case ExperimentKind::Theorem1Fdd:
      c.N = {256, 1024, 4096};
      c.t_grid = {0.5, 1.0, 2.0};
      c.epsilon = 1e-4;
      c.replicas = 2000;
      break;
    case ExperimentKind::Theorem2Sweep:
      c.N = {64, 256, 1024, 4096};
      c.replicas = 50;
      break;
    case ExperimentKind::UpperMin:
      c.N = {256, 1024, 4096};
      c.epsilon = 0.3;
      c.replicas = 500;
      break;
  }
  c.out = "results/" + kind_name(c.kind);
}

std::size_t default_horizon(ExperimentKind kind, std::size_t N) {
  const std::size_t b = ceil_log2(N);
  switch (kind) {
    case ExperimentKind::NbrwRun: return 10 * b;
    case ExperimentKind::CouplingCheck: return 20 * b;
    case ExperimentKind::Theorem2Sweep: return 30 * b;
    default: return 0;
  }
}

bool uses_N(ExperimentKind k) {
  return k != ExperimentKind::StairsRun && k != ExperimentKind::RhoEstimate;
}

bool uses_horizons(ExperimentKind k) {
  return k == ExperimentKind::NbrwRun || k == ExperimentKind::CouplingCheck ||
         k == ExperimentKind::SerflingCheck || k == ExperimentKind::Theorem2Sweep;
}

void validate(ExperimentConfig& c, bool epsilon_given) {
  try {
    c.model.build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  if (c.replicas == 0) throw ConfigError("replicas", "must be >= 1");
  if (c.workers == 0) throw ConfigError("workers", "must be >= 1");
  if (c.out.empty()) throw ConfigError("out", "must not be empty");

  if (uses_N(c.kind)) {
    if (c.N.empty()) throw ConfigError("N", "grid must be nonempty");
    for (auto N : c.N)
      if (N < 2) throw ConfigError("N", "entries must be >= 2");
  }
  if (uses_horizons(c.kind)) {
    if (c.n.empty()) {
      for (auto N : c.N) c.n.push_back(default_horizon(c.kind, N));
    } else if (c.n.size() == 1 && c.N.size() > 1) {
      c.n.assign(c.N.size(), c.n.front());
    }
    if (c.n.size() != c.N.size()) throw ConfigError("n", "needs one entry or one per N");
    for (auto n : c.n)
      if (n == 0) throw ConfigError("n", "horizons must be >= 1");
  }

  switch (c.kind) {
    case ExperimentKind::StairsRun:
    case ExperimentKind::RhoEstimate:
      if (!(c.T > 0.0)) throw ConfigError("T", "must be > 0");
      if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
      break;
    case ExperimentKind::SerflingCheck: {
      if (c.ell == 0) c.ell = ceil_log2(c.N.front());
      if (c.N.size() != 1) throw ConfigError("N", "serfling-check takes a single N");
      if (c.samples == 0) throw ConfigError("samples", "must be >= 1");
      const double floor = c.model.build().x_min() /
                           scaling_constant(c.model.build(), static_cast<long>(c.N.front()));
      if (!epsilon_given) c.epsilon = default_serfling_epsilon(c.model.build(), c.N.front());
      if (!(c.epsilon > floor)) throw ConfigError("epsilon", "must exceed x_min / c_N");
      break;
    }
    case ExperimentKind::Theorem1Fdd:
      if (c.t_grid.empty()) throw ConfigError("t_grid", "grid must be nonempty");
      for (double t : c.t_grid)
        if (t < 0.0) throw ConfigError("t_grid", "times must be >= 0");
      if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
      break;
    case ExperimentKind::Theorem2Sweep:
      if (c.burn_in_blocks < 0.0) throw ConfigError("burn_in_blocks", "must be >= 0");
      if (!(c.rho_T > 0.0)) throw ConfigError("rho_T", "must be > 0");
      if (!(c.rho_epsilon > 0.0)) throw ConfigError("rho_epsilon", "must be > 0");
      if (c.rho_replicas == 0) throw ConfigError("rho_replicas", "must be >= 1");
      break;
    case ExperimentKind::UpperMin:
      if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");
      break;
    default:
      break;
  }
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

std::optional<ExperimentKind> kind_from_name(const std::string& name) {
  for (const auto& [k, n] : kKinds)
    if (n == name) return k;
  return std::nullopt;
}

TailModel ModelSpec::build() const {
  if (family == "PurePareto") return TailModel::pure_pareto(alpha);
  if (family == "LogPareto") return TailModel::log_pareto(alpha, beta);
  throw std::invalid_argument("unknown family '" + family + "' (PurePareto or LogPareto)");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment", "model",          "N",         "n",        "T",
      "epsilon",    "replicas",       "seed",      "out",      "workers",
      "t_grid",     "ell",            "samples",   "burn_in_blocks",
      "rho_cache",  "rho_T",          "rho_replicas", "rho_epsilon",
      "snapshot_stride"};
  return keys;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = kind_name(kind);
  j["model"] = {{"family", model.family}, {"alpha", model.alpha}, {"beta", model.beta}};
  j["N"] = N;
  j["n"] = n;
  j["T"] = T;
  j["epsilon"] = epsilon;
  j["replicas"] = replicas;
  j["seed"] = seed;
  j["out"] = out;
  j["workers"] = workers;
  j["t_grid"] = t_grid;
  j["ell"] = ell;
  j["samples"] = samples;
  j["burn_in_blocks"] = burn_in_blocks;
  j["rho_cache"] = rho_cache;
  j["rho_T"] = rho_T;
  j["rho_replicas"] = rho_replicas;
  j["rho_epsilon"] = rho_epsilon;
  j["snapshot_stride"] = snapshot_stride;
  return j;
}

ExperimentConfig parse_config(ExperimentKind kind, const json& file, const json& overrides) {
  const json* doc = &file;
  if (file.is_object() && file.contains("tool") && file.contains("config")) doc = &file.at("config");
  if (!doc->is_null() && !doc->is_object()) throw ConfigError("<root>", "config must be a JSON object");
  if (!overrides.is_object()) throw ConfigError("<flags>", "overrides must be an object");

  json merged = doc->is_null() ? json::object() : *doc;
  for (const auto& [key, value] : overrides.items()) {
    if (key == "model" && merged.contains("model") && merged["model"].is_object() && value.is_object()) {
      for (const auto& [mk, mv] : value.items()) merged["model"][mk] = mv;
    } else {
      merged[key] = value;
    }
  }

  const auto& keys = config_keys();
  for (const auto& [key, value] : merged.items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key, "unknown key");

  ExperimentConfig c;
  c.kind = kind;
  apply_defaults(c);

  if (merged.contains("experiment")) {
    const auto name = as_string(merged["experiment"], "experiment");
    if (name != kind_name(kind))
      throw ConfigError("experiment", "file is for '" + name + "', not '" + kind_name(kind) + "'");
  }
  if (merged.contains("model")) {
    const auto& m = merged["model"];
    if (!m.is_object()) throw ConfigError("model", "expected an object");
    for (const auto& [mk, mv] : m.items()) {
      if (mk == "family") c.model.family = as_string(mv, "model.family");
      else if (mk == "alpha") c.model.alpha = as_double(mv, "model.alpha");
      else if (mk == "beta") c.model.beta = as_double(mv, "model.beta");
      else throw ConfigError("model." + mk, "unknown key");
    }
  }
  if (!merged.contains("seed")) throw ConfigError("seed", "required (no default seed)");
  c.seed = as_u64(merged["seed"], "seed");

  if (merged.contains("N")) c.N = as_size_list(merged["N"], "N");
  if (merged.contains("n")) c.n = as_size_list(merged["n"], "n");
  if (merged.contains("T")) c.T = as_double(merged["T"], "T");
  const bool epsilon_given = merged.contains("epsilon");
  if (epsilon_given) c.epsilon = as_double(merged["epsilon"], "epsilon");
  if (merged.contains("replicas")) c.replicas = as_u64(merged["replicas"], "replicas");
  if (merged.contains("out")) c.out = as_string(merged["out"], "out");
  if (merged.contains("workers")) c.workers = as_u64(merged["workers"], "workers");
  if (merged.contains("t_grid")) c.t_grid = as_double_list(merged["t_grid"], "t_grid");
  if (merged.contains("ell")) c.ell = as_u64(merged["ell"], "ell");
  if (merged.contains("samples")) c.samples = as_u64(merged["samples"], "samples");
  if (merged.contains("burn_in_blocks"))
    c.burn_in_blocks = as_double(merged["burn_in_blocks"], "burn_in_blocks");
  if (merged.contains("rho_cache")) c.rho_cache = as_string(merged["rho_cache"], "rho_cache");
  if (merged.contains("rho_T")) c.rho_T = as_double(merged["rho_T"], "rho_T");
  if (merged.contains("rho_replicas")) c.rho_replicas = as_u64(merged["rho_replicas"], "rho_replicas");
  if (merged.contains("rho_epsilon")) c.rho_epsilon = as_double(merged["rho_epsilon"], "rho_epsilon");
  if (merged.contains("snapshot_stride"))
    c.snapshot_stride = as_u64(merged["snapshot_stride"], "snapshot_stride");

  validate(c, epsilon_given);
  return c;
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace nbrw
