// nbrw: command-line driver for the experiments and the acceptance suite.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nbrw/acceptance.hpp"
#include "nbrw/config.hpp"
#include "nbrw/io.hpp"
#include "nbrw/runner.hpp"

namespace {

using nlohmann::json;
using namespace nbrw;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 0;
  std::string family;
  double alpha = 0, beta = 0;
  std::vector<std::size_t> N, n;
  double T = 0, epsilon = 0;
  std::size_t replicas = 0;
  std::vector<double> t_grid;
  std::size_t ell = 0, samples = 0;
  double burn_in_blocks = 0;
  std::string rho_cache;
  double rho_T = 0, rho_epsilon = 0;
  std::size_t rho_replicas = 0, snapshot_stride = 0;
  std::vector<int> only;
};

struct Sub {
  CLI::App* app;
  std::optional<ExperimentKind> kind;  // empty for acceptance
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file (or a manifest.json from an earlier run)");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--workers", f.workers, "worker threads (fallback: NBRW_WORKERS)");
}

void add_experiment_flags(CLI::App* app, Flags& f) {
  app->add_option("--family", f.family, "PurePareto | LogPareto");
  app->add_option("--alpha", f.alpha, "tail index");
  app->add_option("--beta", f.beta, "log exponent (LogPareto)");
  app->add_option("--N", f.N, "population sizes")->delimiter(',');
  app->add_option("--n", f.n, "horizons in steps, one or one per N")->delimiter(',');
  app->add_option("--T", f.T, "stairs horizon");
  app->add_option("--epsilon", f.epsilon, "truncation level (spread epsilon for upper-min)");
  app->add_option("--replicas", f.replicas, "replicas / seeds");
  app->add_option("--t-grid", f.t_grid, "rescaled times")->delimiter(',');
  app->add_option("--ell", f.ell, "Serfling block count per unit time (0: ceil(log2 N))");
  app->add_option("--samples", f.samples, "samples per side (serfling-check)");
  app->add_option("--burn-in-blocks", f.burn_in_blocks, "burn-in in ceil(log2 N) blocks");
  app->add_option("--rho-cache", f.rho_cache, "read rho_hat from this cache file");
  app->add_option("--rho-T", f.rho_T, "horizon of the rho estimate");
  app->add_option("--rho-replicas", f.rho_replicas, "replicas of the rho estimate");
  app->add_option("--rho-epsilon", f.rho_epsilon, "truncation of the rho estimate");
  app->add_option("--snapshot-stride", f.snapshot_stride, "population snapshot stride (nbrw-run)");
}

bool given(CLI::App* app, const std::string& name) { return app->count(name) > 0; }

json overrides(CLI::App* app, const Flags& f) {
  json o = json::object();
  if (given(app, "--seed")) o["seed"] = f.seed;
  if (given(app, "--out")) o["out"] = f.out;
  if (given(app, "--family")) o["model"]["family"] = f.family;
  if (given(app, "--alpha")) o["model"]["alpha"] = f.alpha;
  if (given(app, "--beta")) o["model"]["beta"] = f.beta;
  if (given(app, "--N")) o["N"] = f.N;
  if (given(app, "--n")) o["n"] = f.n;
  if (given(app, "--T")) o["T"] = f.T;
  if (given(app, "--epsilon")) o["epsilon"] = f.epsilon;
  if (given(app, "--replicas")) o["replicas"] = f.replicas;
  if (given(app, "--t-grid")) o["t_grid"] = f.t_grid;
  if (given(app, "--ell")) o["ell"] = f.ell;
  if (given(app, "--samples")) o["samples"] = f.samples;
  if (given(app, "--burn-in-blocks")) o["burn_in_blocks"] = f.burn_in_blocks;
  if (given(app, "--rho-cache")) o["rho_cache"] = f.rho_cache;
  if (given(app, "--rho-T")) o["rho_T"] = f.rho_T;
  if (given(app, "--rho-replicas")) o["rho_replicas"] = f.rho_replicas;
  if (given(app, "--rho-epsilon")) o["rho_epsilon"] = f.rho_epsilon;
  if (given(app, "--snapshot-stride")) o["snapshot_stride"] = f.snapshot_stride;
  return o;
}

/// --workers, else NBRW_WORKERS, else whatever the file says.
std::optional<std::size_t> worker_override(CLI::App* app, const Flags& f) {
  if (given(app, "--workers")) return f.workers;
  if (const char* env = std::getenv("NBRW_WORKERS"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw ConfigError("workers", "NBRW_WORKERS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::nullopt;
}

void print_result(const CriterionResult& r) { std::cout << format_result_line(r) << std::endl; }

int run_acceptance_command(CLI::App* app, const Flags& f) {
  AcceptanceOptions opts;
  if (given(app, "--seed")) opts.seed = f.seed;
  if (auto w = worker_override(app, f)) opts.workers = *w;
  const std::filesystem::path out = given(app, "--out") ? f.out : "results/acceptance";
  opts.scratch = out / "scratch";
  opts.only = f.only;

  const auto results = run_acceptance(opts, print_result);
  CsvTable t({"criterion", "name", "passed", "seconds", "detail"});
  t.meta("suite", "acceptance");
  t.meta("seed", std::to_string(opts.seed));
  int failed = 0;
  for (const auto& r : results) {
    std::string detail = r.detail;
    for (auto& ch : detail)
      if (ch == ',') ch = ';';
    t.row({cell(r.id), r.name, r.passed ? "1" : "0", cell(r.seconds), detail});
    failed += !r.passed;
  }
  t.write(out / "acceptance.csv");
  nlohmann::ordered_json manifest;
  manifest["tool"] = "nbrw";
  manifest["version"] = kVersion;
  manifest["suite"] = "acceptance";
  manifest["seed"] = opts.seed;
  manifest["workers"] = opts.workers;
  manifest["versions"] = build_versions();
  manifest["passed"] = static_cast<int>(results.size()) - failed;
  manifest["failed"] = failed;
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
  return failed ? kExitViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-BRW and stairs-process experiments"};
  app.require_subcommand(1);
  Flags flags;

  std::vector<Sub> subs;
  const std::vector<std::pair<ExperimentKind, const char*>> experiments{
      {ExperimentKind::NbrwRun, "simulate the particle system and record extremes"},
      {ExperimentKind::StairsRun, "simulate stairs paths and their regenerations"},
      {ExperimentKind::RhoEstimate, "estimate the stairs growth rate and write a cache"},
      {ExperimentKind::CouplingCheck, "pathwise lower-bound coupling check"},
      {ExperimentKind::SerflingCheck, "Serfling sandwich and marginal-law check"},
      {ExperimentKind::Theorem1Fdd, "fixed-time KS of rescaled extremes vs the stairs process"},
      {ExperimentKind::Theorem2Sweep, "long-time scaling sweep over N"},
      {ExperimentKind::UpperMin, "spread-collapse frequency over N"},
  };
  for (const auto& [kind, desc] : experiments) {
    auto* sub = app.add_subcommand(kind_name(kind), desc);
    add_common(sub, flags);
    add_experiment_flags(sub, flags);
    subs.push_back({sub, kind});
  }
  auto* acc = app.add_subcommand("acceptance", "run the acceptance suite");
  add_common(acc, flags);
  acc->add_option("--only", flags.only, "criterion ids to run")->delimiter(',');
  subs.push_back({acc, std::nullopt});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (const auto& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      if (!s.kind) return run_acceptance_command(s.app, flags);
      const json file = flags.config.empty() ? json::object() : load_json_file(flags.config);
      json over = overrides(s.app, flags);
      if (auto w = worker_override(s.app, flags)) over["workers"] = *w;
      const auto cfg = parse_config(*s.kind, file, over);
      const auto result = run_experiment(cfg);
      for (const auto& m : result.messages) std::cout << m << "\n";
      std::cout << kind_name(cfg.kind) << ": wrote " << result.files.size() << " files to " << cfg.out
                << " (exit " << result.exit_code << ")" << std::endl;
      return result.exit_code;
    } catch (const ConfigError& e) {
      std::cerr << e.what() << std::endl;
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return kExitViolation;
    }
  }
  return kExitConfig;
}
