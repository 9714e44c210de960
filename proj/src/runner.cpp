#include "nbrw/runner.hpp"

#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "nbrw/discrete_stairs.hpp"
#include "nbrw/experiments.hpp"
#include "nbrw/io.hpp"
#include "nbrw/parallel.hpp"
#include "nbrw/particle_system.hpp"
#include "nbrw/plotdata.hpp"
#include "nbrw/stairs.hpp"

namespace nbrw {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* kKsNote = "two-sample Kolmogorov-Smirnov (proxy for the Prokhorov distance)";

struct Context {
  const ExperimentConfig& cfg;
  TailModel model;
  fs::path dir;
  RunResult result;

  CsvTable table(std::vector<std::string> columns) const {
    CsvTable t(std::move(columns));
    t.meta("experiment", kind_name(cfg.kind));
    t.meta("model", model.describe());
    t.meta("seed", std::to_string(cfg.seed));
    return t;
  }

  void save(const CsvTable& t, const std::string& name) {
    t.write(dir / name);
    result.files.push_back(name);
  }

  void note(const std::string& name) { result.files.push_back(name); }
};

CsvTable violation_table(const Context& ctx) {
  return ctx.table({"run_id", "step", "lhs", "rhs", "kind"});
}

void add_violations(CsvTable& t, const std::vector<Violation>& vs) {
  for (const auto& v : vs) t.row({cell(v.run_id), cell(v.step), cell(v.lhs), cell(v.rhs), v.kind});
}

void ks_row(CsvTable& t, double at, const KsResult& ks) {
  t.row({cell(at), cell(ks.statistic), cell(ks.crit05), cell(ks.crit01), cell(std::uint64_t{ks.n_a}),
         cell(std::uint64_t{ks.n_b})});
}

// ---------------------------------------------------------------------------

void nbrw_run(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::size_t violations = 0;
  auto vt = violation_table(ctx);
  for (std::size_t k = 0; k < cfg.N.size(); ++k) {
    const std::size_t N = cfg.N[k], steps = cfg.n[k];
    RecorderOptions rec{cfg.snapshot_stride};
    auto trajs = parallel_map(cfg.replicas, cfg.workers, [&](std::size_t r) {
      Rng rng(cfg.seed, Stream::Particles, r);
      return run(ctx.model, N, steps, rng, rec);
    });

    auto t = ctx.table({"replica", "n", "t", "min", "max", "min_rescaled", "max_rescaled"});
    t.meta("N", std::to_string(N));
    t.meta("c_N", format_double(scaling_constant(ctx.model, static_cast<long>(N))));
    t.meta("t", "n / log2(N)");
    auto snaps = ctx.table({"replica", "n", "rank", "position"});
    snaps.meta("N", std::to_string(N));
    for (std::size_t r = 0; r < trajs.size(); ++r) {
      const auto& tr = trajs[r];
      const auto rs = rescale_trajectory(tr, ctx.model, N);
      for (std::size_t n = 0; n < tr.size(); ++n) {
        t.row({cell(std::uint64_t{r}), cell(std::uint64_t{n}), cell(rs.t[n]), cell(tr.min[n]),
               cell(tr.max[n]), cell(rs.min[n]), cell(rs.max[n])});
        const auto id = static_cast<std::int64_t>(n);
        if (tr.min[n] > tr.max[n]) vt.row({cell(std::uint64_t{r}), cell(id), cell(tr.min[n]), cell(tr.max[n]), "min_le_max"});
        if (n && tr.max[n] < tr.max[n - 1])
          vt.row({cell(std::uint64_t{r}), cell(id), cell(tr.max[n - 1]), cell(tr.max[n]), "max_nondecreasing"});
        if (n && tr.min[n] < tr.min[n - 1])
          vt.row({cell(std::uint64_t{r}), cell(id), cell(tr.min[n - 1]), cell(tr.min[n]), "min_nondecreasing"});
      }
      for (const auto& s : tr.snapshots)
        for (std::size_t i = 0; i < s.positions.size(); ++i)
          snaps.row({cell(std::uint64_t{r}), cell(s.n), cell(std::uint64_t{i}), cell(s.positions[i])});
      if (r == 0) {
        emit_plotdata(ctx.dir / ("extremes_N" + std::to_string(N) + ".dat"), rs);
        ctx.note("extremes_N" + std::to_string(N) + ".dat");
      }
    }
    ctx.save(t, "trajectory_N" + std::to_string(N) + ".csv");
    if (cfg.snapshot_stride) ctx.save(snaps, "snapshots_N" + std::to_string(N) + ".csv");
  }
  violations = vt.rows();
  ctx.save(vt, "violations.csv");
  if (violations) ctx.result.exit_code = kExitViolation;
}

void stairs_run(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto measure = StairsMeasure::mu_alpha(cfg.model.alpha);
  auto vt = violation_table(ctx);
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    Rng rng(cfg.seed, Stream::Stairs, r);
    const auto atoms = simulate_atoms(measure, cfg.T, cfg.epsilon, rng);
    const auto path = build_path(atoms);
    const ChainEvaluator dp(atoms);
    auto check = [&](double t) {
      const double a = path.value_at(t), b = dp(t);
      if (a != b) vt.row({cell(std::uint64_t{r}), cell(t), cell(a), cell(b), "path_eq_chain"});
    };
    for (double s : path.jump_times()) check(s);
    for (double t = 0.0; t <= cfg.T; t += 0.125) check(t);

    const std::string suffix = "_r" + std::to_string(r);
    auto pt = ctx.table({"jump_time", "value"});
    pt.meta("measure", measure.label());
    pt.meta("T", format_double(cfg.T));
    pt.meta("epsilon", format_double(cfg.epsilon));
    pt.meta("replica", std::to_string(r));
    pt.meta("atoms", std::to_string(atoms.atoms.size()));
    for (std::size_t i = 0; i < path.jump_count(); ++i)
      pt.row({cell(path.jump_times()[i]), cell(path.values()[i])});
    ctx.save(pt, "path" + suffix + ".csv");

    const auto regen = detect_regenerations(path, cfg.T);
    auto rt = ctx.table({"cycle", "tau_increment", "R_increment"});
    rt.meta("measure", measure.label());
    rt.meta("replica", std::to_string(r));
    rt.meta("censoring", "cycles with tau > T - 1 discarded");
    for (std::size_t c = 0; c < regen.cycles(); ++c)
      rt.row({cell(std::uint64_t{c + 1}), cell(regen.tau_increments[c]), cell(regen.r_increments[c])});
    ctx.save(rt, "regenerations" + suffix + ".csv");

    emit_plotdata(ctx.dir / ("stairs_path" + suffix + ".dat"), path, cfg.T);
    ctx.note("stairs_path" + suffix + ".dat");
  }
  if (vt.rows()) ctx.result.exit_code = kExitViolation;
  ctx.save(vt, "violations.csv");
}

RhoEstimate compute_rho(Context& ctx, double T, double eps, std::size_t replicas,
                        std::uint64_t seed) {
  RhoOptions o;
  o.T = T;
  o.epsilon = eps;
  o.replicas = replicas;
  o.seed = seed;
  o.workers = ctx.cfg.workers;
  auto est = estimate_rho(StairsMeasure::mu_alpha(ctx.cfg.model.alpha), o);
  for (const auto& w : est.warnings) ctx.result.messages.push_back("rho: " + w);
  write_text(ctx.dir / "rho.json", rho_cache_json(est, ctx.cfg.model.alpha, eps, T, seed).dump(2) + "\n");
  ctx.note("rho.json");
  return est;
}

void rho_estimate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto est = compute_rho(ctx, cfg.T, cfg.epsilon, cfg.replicas, cfg.seed);
  auto t = ctx.table({"estimator", "value", "stderr", "cycles", "replicas"});
  t.meta("measure", StairsMeasure::mu_alpha(cfg.model.alpha).label());
  t.meta("T", format_double(cfg.T));
  t.meta("epsilon", format_double(cfg.epsilon));
  t.meta("stderr", "bootstrap over replicas (long_run) and cycles (regenerative)");
  t.row({"long_run", cell(est.long_run), cell(est.long_run_se), cell(std::uint64_t{est.cycles}),
         cell(std::uint64_t{est.replicas})});
  t.row({"regenerative", cell(est.regenerative), cell(est.regenerative_se),
         cell(std::uint64_t{est.cycles}), cell(std::uint64_t{est.replicas})});
  ctx.save(t, "rho.csv");
}

void coupling_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto vt = violation_table(ctx);
  vt.meta("checks", "R(n - ell) <= Y_1(n) (lower_min), R(n) <= Y_N(n) (lower_max)");
  auto runs = ctx.table({"run_id", "N", "ell", "steps", "seed", "violations"});
  for (std::size_t k = 0; k < cfg.N.size(); ++k) {
    const std::size_t N = cfg.N[k], steps = cfg.n[k];
    auto reports = parallel_map(cfg.replicas, cfg.workers, [&](std::size_t r) {
      const std::uint64_t id = k * cfg.replicas + r;
      return coupled_lower_bound_run(ctx.model, N, steps, derive_seed(cfg.seed, Stream::Particles, id), id);
    });
    for (std::size_t r = 0; r < reports.size(); ++r) {
      const std::uint64_t id = k * cfg.replicas + r;
      runs.row({cell(id), cell(std::uint64_t{N}), cell(std::uint64_t{reports[r].ell}),
                cell(std::uint64_t{steps}), cell(derive_seed(cfg.seed, Stream::Particles, id)),
                cell(std::uint64_t{reports[r].violations.size()})});
      add_violations(vt, reports[r].violations);
    }
  }
  ctx.save(runs, "runs.csv");
  ctx.save(vt, "violations.csv");
  ctx.result.messages.push_back("coupling violations: " + std::to_string(vt.rows()));
  if (vt.rows()) ctx.result.exit_code = kExitViolation;
}

void serfling_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::size_t N = cfg.N.front(), ell = cfg.ell, steps = cfg.n.front();
  auto vt = violation_table(ctx);
  vt.meta("checks", "stairs(n/ell) >= dsp(n) (stairs_ge_dsp), dsp(n) >= lower(n) (dsp_ge_lower)");
  auto pt = ctx.table({"run_id", "n", "stairs", "dsp", "lower"});
  pt.meta("N", std::to_string(N));
  pt.meta("ell", std::to_string(ell));
  pt.meta("epsilon", format_double(cfg.epsilon));
  auto runs = parallel_map(cfg.replicas, cfg.workers, [&](std::size_t r) {
    return serfling_coupled_run(ctx.model, N, ell, steps, derive_seed(cfg.seed, Stream::Serfling, r),
                                cfg.epsilon, r);
  });
  for (std::size_t r = 0; r < runs.size(); ++r) {
    add_violations(vt, runs[r].violations);
    for (std::size_t n = 0; n < runs[r].stairs.size(); ++n)
      pt.row({cell(std::uint64_t{r}), cell(std::uint64_t{n}), cell(runs[r].stairs[n]),
              cell(runs[r].dsp[n]), cell(runs[r].lower[n])});
  }
  ctx.save(pt, "serfling_paths.csv");
  ctx.save(vt, "violations.csv");

  auto kt = ctx.table({"t", "ks", "crit05", "crit01", "n_a", "n_b"});
  kt.meta("distance", kKsNote);
  kt.meta("t", "window width; 1/ell is the coupling window, 1/(ell+1) a negative control");
  kt.meta("samples", "max of 2N rescaled jumps vs max mark of a Poisson window; both 0 at or below epsilon");
  kt.meta("epsilon", format_double(cfg.epsilon));
  for (std::size_t w : {ell, ell + 1}) {
    auto s = serfling_samples(ctx.model, N, ell, cfg.samples, cfg.seed, cfg.epsilon, w);
    const auto ks = ks_two_sample(EmpiricalSample(s.jump_maxima), EmpiricalSample(s.window_maxima));
    ks_row(kt, 1.0 / static_cast<double>(w), ks);
    if (w == ell)
      ctx.result.messages.push_back("serfling KS " + format_double(ks.statistic) + " (1% critical " +
                                    format_double(ks.crit01) + ")");
  }
  ctx.save(kt, "ks.csv");
  ctx.result.messages.push_back("serfling violations: " + std::to_string(vt.rows()));
  if (vt.rows()) ctx.result.exit_code = kExitViolation;
}

void theorem1_fdd(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<FddReport> reports;
  for (std::size_t N : cfg.N) {
    FddOptions o;
    o.t_grid = cfg.t_grid;
    o.replicas = cfg.replicas;
    o.seed = cfg.seed;
    o.epsilon = cfg.epsilon;
    o.workers = cfg.workers;
    reports.push_back(theorem1_fdd_experiment(ctx.model, N, o));
    for (bool use_max : {true, false}) {
      auto t = ctx.table({"t", "ks", "crit05", "crit01", "n_a", "n_b"});
      t.meta("N", std::to_string(N));
      t.meta("distance", kKsNote);
      t.meta("compares", use_max ? "X_N(floor(t log2 N)) / c_N vs R(t)"
                                 : "X_1(floor(t log2 N)) / c_N vs R(t - 1)");
      t.meta("stairs_epsilon", format_double(cfg.epsilon));
      for (const auto& row : reports.back().rows) ks_row(t, row.t, use_max ? row.ks_max : row.ks_min);
      ctx.save(t, std::string(use_max ? "ks_max" : "ks_min") + "_N" + std::to_string(N) + ".csv");
    }
  }
  emit_plotdata(ctx.dir / "ks.dat", reports);
  ctx.note("ks.dat");
}

void theorem2_sweep_run(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::optional<RhoEstimate> rho;
  if (regime_of(ctx.model) == Regime::AlphaGt1) {
    if (!cfg.rho_cache.empty()) {
      rho = read_rho_cache(cfg.rho_cache, cfg.model.alpha);
    } else {
      rho = compute_rho(ctx, cfg.rho_T, cfg.rho_epsilon, cfg.rho_replicas,
                        derive_seed(cfg.seed, Stream::Stairs, 0));
    }
  }
  ScalingReport report{regime_of(ctx.model), {}};
  for (std::size_t k = 0; k < cfg.N.size(); ++k) {
    SweepOptions o;
    o.N_grid = {cfg.N[k]};
    o.n_grid = {cfg.n[k]};
    o.replicas = cfg.replicas;
    o.seed = cfg.seed;
    o.workers = cfg.workers;
    o.burn_in_blocks = cfg.burn_in_blocks;
    o.rho = rho;
    auto part = theorem2_sweep(ctx.model, o);
    report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  }
  auto t = ctx.table({"regime", "N", "n", "observed", "predicted", "ratio", "ci_lo", "ci_hi", "replicas", "seed"});
  t.meta("regime", regime_name(report.regime));
  t.meta("normalization", predict_scaling(ctx.model, static_cast<long>(cfg.N.front()),
                                          static_cast<double>(cfg.n.front()), rho)
                              .normalization);
  if (rho) {
    t.meta("rho_hat", format_double(rho->long_run));
    t.meta("rho_stderr", format_double(rho->long_run_se));
  }
  if (report.regime == Regime::AlphaLt1) {
    t.meta("observed", std::string("KS distance to W_alpha; ") + kKsNote);
    t.meta("interval", "[0, 1% critical value]");
  } else {
    t.meta("interval", "95% normal interval of ratio (replica spread only)");
  }
  for (const auto& r : report.rows)
    t.row({regime_name(r.regime), cell(std::uint64_t{r.N}), cell(std::uint64_t{r.n}), cell(r.observed),
           cell(r.predicted), cell(r.ratio), cell(r.ci_lo), cell(r.ci_hi),
           cell(std::uint64_t{r.replicas}), cell(r.seed)});
  ctx.save(t, "scaling.csv");
  emit_plotdata(ctx.dir / "scaling.dat", report);
  ctx.note("scaling.dat");
}

void upper_min(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto rows = upper_min_experiment(ctx.model, cfg.N, cfg.epsilon, cfg.replicas, cfg.seed, cfg.workers);
  auto t = ctx.table({"N", "n0", "n1", "probability", "ci_lo", "ci_hi", "replicas"});
  t.meta("event", "Y_1(n1) < Y_N(n0) + epsilon, n0 = ceil(log2 N), n1 = n0 + floor((1 - epsilon) log2 N)");
  t.meta("epsilon", format_double(cfg.epsilon));
  for (const auto& r : rows)
    t.row({cell(std::uint64_t{r.N}), cell(std::uint64_t{r.n0}), cell(std::uint64_t{r.n1}),
           cell(r.probability), cell(r.ci_lo), cell(r.ci_hi), cell(std::uint64_t{r.replicas})});
  ctx.save(t, "upper_min.csv");
  emit_plotdata(ctx.dir / "upper_min.dat", rows);
  ctx.note("upper_min.dat");
}

}  // namespace

ordered_json build_versions() {
  ordered_json v;
  v["nbrw"] = kVersion;
#if defined(__clang__)
  v["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  v["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  v["cxx_standard"] = static_cast<long>(__cplusplus);
  v["boost"] = BOOST_LIB_VERSION;
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

ordered_json rho_cache_json(const RhoEstimate& est, double alpha, double epsilon, double T,
                            std::uint64_t seed) {
  ordered_json j;
  j["alpha"] = alpha;
  j["epsilon"] = epsilon;
  j["T"] = T;
  j["replicas"] = est.replicas;
  j["rho_hat"] = est.long_run;
  j["stderr"] = est.long_run_se;
  j["seed"] = seed;
  j["regenerative"] = est.regenerative;
  j["regenerative_stderr"] = est.regenerative_se;
  j["cycles"] = est.cycles;
  return j;
}

RhoEstimate read_rho_cache(const std::string& path, double alpha) {
  const auto j = load_json_file(path);
  try {
    if (j.at("alpha").get<double>() != alpha)
      throw ConfigError("rho_cache", "cache is for alpha=" + format_double(j.at("alpha").get<double>()));
    RhoEstimate est;
    est.long_run = j.at("rho_hat").get<double>();
    est.long_run_se = j.at("stderr").get<double>();
    est.replicas = j.at("replicas").get<std::size_t>();
    if (j.contains("regenerative") && j["regenerative"].is_number())
      est.regenerative = j["regenerative"].get<double>();
    if (j.contains("cycles")) est.cycles = j["cycles"].get<std::size_t>();
    return est;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("rho_cache", std::string("malformed cache: ") + e.what());
  }
}

RunResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, config.model.build(), fs::path(config.out), {}};
  fs::create_directories(ctx.dir);

  switch (config.kind) {
    case ExperimentKind::NbrwRun: nbrw_run(ctx); break;
    case ExperimentKind::StairsRun: stairs_run(ctx); break;
    case ExperimentKind::RhoEstimate: rho_estimate(ctx); break;
    case ExperimentKind::CouplingCheck: coupling_check(ctx); break;
    case ExperimentKind::SerflingCheck: serfling_check(ctx); break;
    case ExperimentKind::Theorem1Fdd: theorem1_fdd(ctx); break;
    case ExperimentKind::Theorem2Sweep: theorem2_sweep_run(ctx); break;
    case ExperimentKind::UpperMin: upper_min(ctx); break;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ordered_json manifest;
  manifest["tool"] = "nbrw";
  manifest["version"] = kVersion;
  manifest["config"] = config.to_json();
  manifest["versions"] = build_versions();
  manifest["exit_code"] = ctx.result.exit_code;
  manifest["files"] = ctx.result.files;
  manifest["messages"] = ctx.result.messages;
  manifest["wall_time_seconds"] = wall;
  write_text(ctx.dir / "manifest.json", manifest.dump(2) + "\n");
  return ctx.result;
}

}  // namespace nbrw
