#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "nbrw/config.hpp"
#include "nbrw/io.hpp"
#include "nbrw/plotdata.hpp"
#include "nbrw/runner.hpp"

using namespace nbrw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nbrw_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::string config_error_key(ExperimentKind kind, const json& file, const json& over = json::object()) {
  try {
    parse_config(kind, file, over);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  auto c = parse_config(ExperimentKind::CouplingCheck, json{{"seed", 3}});
  CHECK(c.seed == 3);
  CHECK(c.N == std::vector<std::size_t>{4, 16, 64, 256});
  CHECK(c.n == std::vector<std::size_t>{40, 80, 120, 160});
  CHECK(c.replicas == 50);
  CHECK(c.workers == 1);
  CHECK(c.model.family == "PurePareto");
  CHECK(c.model.alpha == 2.0);
  CHECK(c.out == "results/coupling-check");

  auto s = parse_config(ExperimentKind::SerflingCheck, json{{"seed", 1}});
  CHECK(s.ell == 6);
  CHECK(s.epsilon > 0.0);
  CHECK(s.samples == 10000);

  auto t2 = parse_config(ExperimentKind::Theorem2Sweep, json{{"seed", 1}, {"N", {64, 256}}, {"n", 100}});
  CHECK(t2.n == std::vector<std::size_t>{100, 100});
}

TEST_CASE("validation errors name the key") {
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"replicas", 0}}) == "replicas");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"replicas", 2}}) == "seed");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"typo", 2}}) == "typo");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"N", json::array()}}) == "N");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", -1}}) == "seed");
  CHECK(config_error_key(ExperimentKind::StairsRun, json{{"seed", 1}, {"epsilon", 0.0}}) == "epsilon");
  CHECK(config_error_key(ExperimentKind::UpperMin, json{{"seed", 1}, {"epsilon", 1.5}}) == "epsilon");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"model", {{"alpha", -1.0}}}}) == "model");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"model", {{"gamma", 1.0}}}}) == "model.gamma");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"experiment", "upper-min"}}) == "experiment");
  CHECK(config_error_key(ExperimentKind::NbrwRun, json{{"seed", 1}, {"N", {8, 16}}, {"n", {5, 6, 7}}}) == "n");
  CHECK(config_error_key(ExperimentKind::Theorem1Fdd, json{{"seed", 1}, {"t_grid", json::array()}}) == "t_grid");
}

TEST_CASE("flags override the file") {
  auto c = parse_config(ExperimentKind::NbrwRun, json{{"seed", 3}, {"model", {{"alpha", 1.5}}}},
                        json{{"seed", 7}, {"model", {{"family", "LogPareto"}}}});
  CHECK(c.seed == 7);
  CHECK(c.model.family == "LogPareto");
  CHECK(c.model.alpha == 1.5);
}

TEST_CASE("manifest echo reproduces the config") {
  auto c = parse_config(ExperimentKind::Theorem2Sweep, json{{"seed", 9}, {"N", {64}}});
  json manifest{{"tool", "nbrw"}, {"config", json::parse(c.to_json().dump())}};
  auto d = parse_config(ExperimentKind::Theorem2Sweep, manifest);
  CHECK(d.to_json() == c.to_json());
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv metadata and rows") {
  CsvTable t({"a", "b"});
  t.meta("seed", "7");
  t.row({"1", "2"});
  CHECK(t.render() == "# seed: 7\na,b\n1,2\n");
  CHECK_THROWS(t.row({"1"}));
}

TEST_CASE("plot data panels") {
  const auto dir = scratch("plot");
  emit_plotdata(dir / "stairs.dat", StairsPath({0.25, 1.5}, {1.0, 3.0}), 3.0);
  const auto text = slurp(dir / "stairs.dat");
  std::size_t blocks = 1, data_lines = 0;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (line.empty()) ++blocks;
    else if (line[0] != '#') ++data_lines;
  }
  CHECK(blocks == 3);
  CHECK(data_lines == 6);
  CHECK(text.find("0.25 1\n1.5 1\n") != std::string::npos);

  emit_plotdata(dir / "empty.dat", ScalingReport{Regime::AlphaGt1, {}});
  const auto empty = slurp(dir / "empty.dat");
  CHECK_FALSE(empty.empty());
  std::istringstream es(empty);
  for (std::string line; std::getline(es, line);) CHECK(line[0] == '#');
  CHECK(empty.find("# columns: N ratio ci_lo ci_hi") != std::string::npos);

  ScalingRow row{Regime::AlphaGt1};
  row.N = 64;
  row.ratio = 1.25;
  row.ci_lo = 1.0;
  row.ci_hi = 1.5;
  emit_plotdata(dir / "scaling.dat", ScalingReport{Regime::AlphaGt1, {row}});
  CHECK(slurp(dir / "scaling.dat").find("\n64 1.25 1 1.5\n") != std::string::npos);
}

TEST_CASE("coupling-check end to end") {
  const auto dir = scratch("coupling");
  auto c = parse_config(ExperimentKind::CouplingCheck,
                        json{{"seed", 5}, {"N", {4}}, {"replicas", 3}, {"out", dir.string()}});
  auto r = run_experiment(c);
  CHECK(r.exit_code == 0);
  const auto v = slurp(dir / "violations.csv");
  CHECK(v.substr(v.find("run_id")) == "run_id,step,lhs,rhs,kind\n");
  CHECK(fs::exists(dir / "manifest.json"));
  auto manifest = load_json_file((dir / "manifest.json").string());
  CHECK(manifest["config"]["seed"] == 5);
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(manifest["versions"].contains("boost"));
}

TEST_CASE("same config twice gives identical CSVs") {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  json base{{"seed", 11}, {"N", {32}}, {"n", {30}}, {"replicas", 3}};
  base["out"] = a.string();
  auto ra = run_experiment(parse_config(ExperimentKind::NbrwRun, base));
  base["out"] = b.string();
  base["workers"] = 3;
  run_experiment(parse_config(ExperimentKind::NbrwRun, base));
  for (const auto& f : ra.files)
    if (fs::path(f).extension() == ".csv") CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("theorem2-sweep small grid writes a ratio column") {
  const auto dir = scratch("t2");
  auto c = parse_config(ExperimentKind::Theorem2Sweep,
                        json{{"seed", 2}, {"N", {16, 64}}, {"replicas", 5}, {"rho_T", 100.0},
                             {"rho_replicas", 2}, {"out", dir.string()}});
  auto r = run_experiment(c);
  CHECK(r.exit_code == 0);
  const auto csv = slurp(dir / "scaling.csv");
  CHECK(csv.find("regime,N,n,observed,predicted,ratio,ci_lo,ci_hi,replicas,seed\n") != std::string::npos);
  CHECK(csv.find("\nAlphaGt1,16,") != std::string::npos);
  CHECK(csv.find("\nAlphaGt1,64,") != std::string::npos);
  CHECK(fs::exists(dir / "rho.json"));
  auto cache = load_json_file((dir / "rho.json").string());
  for (const char* k : {"alpha", "epsilon", "T", "replicas", "rho_hat", "stderr", "seed"})
    CHECK(cache.contains(k));

  // Reuse the cache from another directory.
  const auto dir2 = scratch("t2_cached");
  auto c2 = parse_config(ExperimentKind::Theorem2Sweep,
                         json{{"seed", 2}, {"N", {16}}, {"replicas", 5},
                              {"rho_cache", (dir / "rho.json").string()}, {"out", dir2.string()}});
  CHECK(run_experiment(c2).exit_code == 0);
  CHECK_FALSE(fs::exists(dir2 / "rho.json"));
  auto c3 = parse_config(ExperimentKind::Theorem2Sweep,
                         json{{"seed", 2}, {"N", {16}}, {"model", {{"alpha", 3.0}}},
                              {"rho_cache", (dir / "rho.json").string()}, {"out", dir2.string()}});
  CHECK_THROWS_AS(run_experiment(c3), ConfigError);
}

TEST_CASE("stairs-run and serfling-check outputs") {
  const auto dir = scratch("stairs");
  auto c = parse_config(ExperimentKind::StairsRun,
                        json{{"seed", 4}, {"T", 10.0}, {"epsilon", 0.1}, {"out", dir.string()}});
  CHECK(run_experiment(c).exit_code == 0);
  CHECK(slurp(dir / "path_r0.csv").find("jump_time,value\n") != std::string::npos);
  CHECK(slurp(dir / "regenerations_r0.csv").find("cycle,tau_increment,R_increment\n") != std::string::npos);
  CHECK(fs::exists(dir / "stairs_path_r0.dat"));

  const auto sdir = scratch("serfling");
  auto s = parse_config(ExperimentKind::SerflingCheck,
                        json{{"seed", 4}, {"n", 40}, {"replicas", 2}, {"samples", 500}, {"out", sdir.string()}});
  CHECK(run_experiment(s).exit_code == 0);
  CHECK(slurp(sdir / "ks.csv").find("t,ks,crit05,crit01,n_a,n_b\n") != std::string::npos);
}
