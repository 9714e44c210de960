#include "nbrw/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

#include "nbrw/config.hpp"
#include "nbrw/discrete_stairs.hpp"
#include "nbrw/experiments.hpp"
#include "nbrw/io.hpp"
#include "nbrw/limit_laws.hpp"
#include "nbrw/parallel.hpp"
#include "nbrw/runner.hpp"
#include "nbrw/testing/oracles.hpp"

namespace nbrw {

namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

const TailModel kPareto2 = TailModel::pure_pareto(2.0);

// 1. Lower-bound coupling, zero violations.
Verdict coupling_exactness(const AcceptanceOptions& o) {
  std::size_t runs = 0, violations = 0;
  for (std::size_t N : {4, 16, 64, 256}) {
    const std::size_t steps = 20 * ceil_log2(N);
    auto counts = parallel_map(50, o.workers, [&](std::size_t r) {
      const auto seed = derive_seed(o.seed, Stream::Particles, N * 1000 + r);
      return coupled_lower_bound_run(kPareto2, N, steps, seed, r).violations.size();
    });
    for (auto c : counts) violations += c;
    runs += counts.size();
  }
  return {violations == 0, "runs=" + std::to_string(runs) + " violations=" + std::to_string(violations)};
}

// 2. Serfling sandwich, zero violations.
Verdict serfling_sandwich(const AcceptanceOptions& o) {
  auto counts = parallel_map(20, o.workers, [&](std::size_t r) {
    return serfling_coupled_run(kPareto2, 64, 6, 200, derive_seed(o.seed, Stream::Serfling, r), 0.0, r)
        .violations.size();
  });
  std::size_t v = 0;
  for (auto c : counts) v += c;
  return {v == 0, "N=64 ell=6 steps=200 runs=20 violations=" + std::to_string(v)};
}

// 3. Serfling marginal law.
Verdict serfling_law(const AcceptanceOptions& o) {
  const auto seed = derive_seed(o.seed, Stream::Serfling, 1000);
  auto s = serfling_samples(kPareto2, 64, 6, 10000, seed, 0.0, 6);
  const auto ks = ks_two_sample(EmpiricalSample(s.jump_maxima), EmpiricalSample(s.window_maxima));
  auto c = serfling_samples(kPareto2, 64, 6, 10000, seed, 0.0, 7);
  const auto ctrl = ks_two_sample(EmpiricalSample(c.jump_maxima), EmpiricalSample(c.window_maxima));
  return {ks.statistic < ks.crit01, "KS=" + fmt(ks.statistic) + " crit01=" + fmt(ks.crit01) +
                                         " (control 1/(ell+1): KS=" + fmt(ctrl.statistic) + ")"};
}

AtomStream random_atoms(Rng& rng, std::size_t count, double T) {
  AtomStream s{T, 0.0, {}};
  std::vector<double> times(count);
  for (auto& t : times) t = rng.uniform() * T;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times) s.atoms.push_back({t, 0.05 / std::sqrt(rng.uniform())});
  return s;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// 4. build_path == DP == exhaustive enumeration.
Verdict stairs_oracle(const AcceptanceOptions& o) {
  std::size_t mismatches = 0, max_atoms = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng(o.seed, Stream::Stairs, 4000 + i);
    const double T = 5.0 + 45.0 * rng.uniform();
    const auto s = random_atoms(rng, 1 + rng.index(10000), T);
    max_atoms = std::max(max_atoms, s.atoms.size());
    const auto path = build_path(s);
    const ChainEvaluator dp(s);
    for (int k = 0; k < 1000; ++k) {
      const double t = T * k / 999.0;
      if (!close(path.value_at(t), dp(t))) ++mismatches;
    }
  }
  std::size_t small_mismatches = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng(o.seed, Stream::Stairs, 5000 + i);
    const double T = 1.0 + 5.0 * rng.uniform();
    const auto s = random_atoms(rng, rng.index(13), T);
    const ChainEvaluator dp(s);
    std::vector<double> points;
    for (int k = 0; k <= 200; ++k) points.push_back(T * k / 200.0);
    for (const auto& a : s.atoms) points.push_back(a.t);
    for (double t : points)
      if (!close(dp(t), oracle::exhaustive_chain_value(s.atoms, t))) ++small_mismatches;
  }
  return {mismatches == 0 && small_mismatches == 0,
          "path-vs-DP mismatches=" + std::to_string(mismatches) + " (max atoms " +
              std::to_string(max_atoms) + "), DP-vs-enumeration mismatches=" +
              std::to_string(small_mismatches)};
}

AtomStream thinned(const AtomStream& s, double eps) {
  AtomStream out{s.horizon, eps, {}};
  std::copy_if(s.atoms.begin(), s.atoms.end(), std::back_inserter(out.atoms),
               [&](const Atom& a) { return a.x > eps; });
  return out;
}

// 5. Truncation bound on shared atoms.
Verdict truncation_bound(const AcceptanceOptions& o) {
  const double T = 100.0, eps = 0.02;
  const double bound = (std::floor(T) + 1.0) * eps;
  const auto mu = StairsMeasure::mu_alpha(2.0);
  auto results = parallel_map(20, o.workers, [&](std::size_t r) {
    Rng rng(o.seed, Stream::Stairs, 6000 + r);
    const auto fine = simulate_atoms(mu, T, eps / 2.0, rng);
    const auto pf = build_path(fine);
    const auto pc = build_path(thinned(fine, eps));
    std::vector<double> points = pf.jump_times();
    points.insert(points.end(), pc.jump_times().begin(), pc.jump_times().end());
    points.push_back(0.0);
    points.push_back(T);
    std::pair<std::size_t, double> out{0, 0.0};
    for (double t : points) {
      const double d = pf.value_at(t) - pc.value_at(t);
      out.second = std::max(out.second, d);
      if (d < 0.0 || d > bound + 1e-12) ++out.first;
    }
    return out;
  });
  std::size_t bad = 0;
  double worst = 0.0;
  for (auto [b, w] : results) {
    bad += b;
    worst = std::max(worst, w);
  }
  return {bad == 0, "violations=" + std::to_string(bad) + " max gap=" + fmt(worst) + " bound=" + fmt(bound)};
}

// 6. Pathwise subadditivity on shared atoms.
Verdict subadditivity(const AcceptanceOptions& o) {
  const double T = 50.0, eps = 0.02;
  const auto mu = StairsMeasure::mu_alpha(2.0);
  auto results = parallel_map(20, o.workers, [&](std::size_t r) {
    Rng rng(o.seed, Stream::Stairs, 7000 + r);
    const auto s = simulate_atoms(mu, T, eps, rng);
    const auto p0 = build_path(s);
    std::pair<std::size_t, double> out{0, 0.0};
    for (int k = 0; k < 100; ++k) {
      double n = std::floor(rng.uniform() * (T + 1.0)), m = std::floor(rng.uniform() * (T + 1.0));
      if (n > m) std::swap(n, m);
      AtomStream later{T - n, eps, {}};
      for (const auto& a : s.atoms)
        if (a.t > n) later.atoms.push_back({a.t - n, a.x});
      const double lhs = p0.value_at(m);
      const double rhs = p0.value_at(n) + build_path(later).value_at(m - n);
      out.second = std::max(out.second, lhs - rhs);
      if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) ++out.first;
    }
    return out;
  });
  std::size_t bad = 0;
  double worst = -INFINITY;
  for (auto [b, w] : results) {
    bad += b;
    worst = std::max(worst, w);
  }
  return {bad == 0, "pairs=2000 violations=" + std::to_string(bad) + " max(lhs-rhs)=" + fmt(worst)};
}

// 7. Regeneration tail ratio.
Verdict regeneration_tail(const AcceptanceOptions& o) {
  const std::vector<double> xs{5.0, 10.0, 20.0};
  const auto table = regeneration_tail_table(StairsMeasure::mu_alpha(2.0), 100000,
                                             derive_seed(o.seed, Stream::Stairs, 8000), xs, 1e-4,
                                             o.workers);
  bool ok = true;
  std::string d = "E[tau1]=" + fmt(table.mean_tau);
  for (const auto& row : table.rows) {
    ok = ok && row.ratio >= 0.7 && row.ratio <= 1.3;
    d += " x=" + fmt(row.x) + ":ratio=" + fmt(row.ratio, 3);
  }
  d += " dominance_violations=" + std::to_string(table.dominance_violations);
  return {ok, d};
}

// 8. Velocity for alpha = 2 against rho_hat c_N / log2 N.
Verdict velocity_alpha2(const AcceptanceOptions& o) {
  RhoOptions ro;
  ro.T = 2000.0;
  ro.epsilon = 1e-4;
  ro.replicas = 64;
  ro.seed = derive_seed(o.seed, Stream::Stairs, 9000);
  ro.workers = o.workers;
  const auto rho = estimate_rho(StairsMeasure::mu_alpha(2.0), ro);

  SweepOptions so;
  so.N_grid = {64, 256, 1024, 4096};
  so.replicas = 50;
  so.seed = derive_seed(o.seed, Stream::Particles, 9000);
  so.workers = o.workers;
  so.rho = rho;
  const auto rep = theorem2_sweep(kPareto2, so);

  bool in_band = true, trend = true;
  std::string d = "rho_hat=" + fmt(rho.long_run) + "+-" + fmt(rho.long_run_se, 2);
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    in_band = in_band && r.ratio >= 0.8 && r.ratio <= 1.2;
    if (k) {
      const auto& p = rep.rows[k - 1];
      const double half = 0.5 * (r.ci_hi - r.ci_lo);
      trend = trend && std::abs(r.ratio - 1.0) <= std::abs(p.ratio - 1.0) + half;
    }
    d += " N=" + std::to_string(r.N) + ":" + fmt(r.ratio, 3);
  }
  d += in_band ? " band ok" : " band FAIL";
  d += trend ? ", trend ok" : ", trend FAIL";
  return {in_band && trend, d};
}

// 9. alpha = 0.5 against W_alpha.
Verdict stable_limit(const AcceptanceOptions& o) {
  SweepOptions so;
  so.N_grid = {256};
  so.n_grid = {200};
  so.replicas = 2000;
  so.seed = derive_seed(o.seed, Stream::Particles, 10000);
  so.workers = o.workers;
  const auto rep = theorem2_sweep(TailModel::pure_pareto(0.5), so);
  const double ks = rep.rows.front().observed;
  return {ks <= 0.15, "KS=" + fmt(ks) + " threshold=0.15"};
}

// 10. Stable sampler and Laplace closed form.
Verdict stable_sampler(const AcceptanceOptions& o) {
  bool ok = true;
  double worst_z = 0.0, worst_rel = 0.0;
  for (double alpha : {0.3, 0.5, 0.8}) {
    Rng rng(o.seed, Stream::Stable, static_cast<std::uint64_t>(alpha * 10));
    std::vector<double> w(100000);
    for (auto& x : w) x = sample_stable(alpha, rng);
    for (double lambda : {0.5, 1.0, 2.0}) {
      double s = 0.0, s2 = 0.0;
      for (double x : w) {
        const double e = std::exp(-lambda * x);
        s += e;
        s2 += e * e;
      }
      const double n = static_cast<double>(w.size());
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / n);
      const double z = std::abs(mean - stable_laplace(alpha, lambda)) / se;
      const double closed = std::tgamma(1.0 - alpha) * std::pow(lambda, alpha);
      const double rel = std::abs(stable_laplace_exponent_quadrature(alpha, lambda) - closed) / closed;
      worst_z = std::max(worst_z, z);
      worst_rel = std::max(worst_rel, rel);
      ok = ok && z <= 3.0 && rel <= 1e-6;
    }
  }
  return {ok, "max |z|=" + fmt(worst_z, 3) + " (limit 3), max quadrature rel err=" + fmt(worst_rel, 3)};
}

// 11. Fixed-time proximity to the stairs process.
Verdict fdd_proximity(const AcceptanceOptions& o) {
  std::vector<FddReport> reps;
  for (std::size_t N : {256, 1024, 4096}) {
    FddOptions fo;
    fo.replicas = 2000;
    fo.seed = derive_seed(o.seed, Stream::Particles, 11000);
    fo.epsilon = 1e-4;
    fo.workers = o.workers;
    reps.push_back(theorem1_fdd_experiment(kPareto2, N, fo));
  }
  bool level = true, trend = true;
  std::string d;
  for (std::size_t j = 0; j < reps.back().rows.size(); ++j) {
    d += (j ? "; t=" : "t=") + fmt(reps.back().rows[j].t) + ":";
    for (std::size_t k = 0; k < reps.size(); ++k) {
      const auto& ks = reps[k].rows[j].ks_max;
      d += (k ? "," : "") + fmt(ks.statistic, 3);
      if (k) trend = trend && ks.statistic <= reps[k - 1].rows[j].ks_max.statistic + ks.crit05;
    }
    level = level && reps.back().rows[j].ks_max.statistic <= 0.10;
  }
  d += level ? " | N=4096 level ok" : " | N=4096 level FAIL (<= 0.10)";
  d += trend ? ", trend ok" : ", trend FAIL";
  return {level && trend, "KS(max) along N=256,1024,4096: " + d};
}

// 12. Spread collapse.
Verdict spread_collapse(const AcceptanceOptions& o) {
  const std::vector<std::size_t> grid{256, 1024, 4096};
  const auto rows = upper_min_experiment(kPareto2, grid, 0.3, 500,
                                         derive_seed(o.seed, Stream::Particles, 12000), o.workers);
  bool trend = true;
  std::string d;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    d += " N=" + std::to_string(rows[k].N) + ":" + fmt(rows[k].probability, 3);
    if (k) {
      const double slack = 0.5 * (rows[k].ci_hi - rows[k].ci_lo + rows[k - 1].ci_hi - rows[k - 1].ci_lo);
      trend = trend && rows[k].probability >= rows[k - 1].probability - slack;
    }
  }
  const bool level = rows.back().probability >= 0.9;
  return {level && trend, "p" + d + (trend ? " trend ok" : " trend FAIL")};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

// 13. Byte-identical reruns from the manifest, with a different worker count.
Verdict reproducibility(const AcceptanceOptions& o) {
  using nlohmann::json;
  const std::vector<std::pair<std::string, json>> cases{
      {"nbrw-run", {{"N", {32}}, {"n", {40}}, {"replicas", 3}, {"snapshot_stride", 10}}},
      {"stairs-run", {{"T", 20.0}, {"epsilon", 0.05}, {"replicas", 2}}},
      {"rho-estimate", {{"T", 200.0}, {"epsilon", 1e-3}, {"replicas", 4}}},
      {"coupling-check", {{"N", {4, 16}}, {"replicas", 5}}},
      {"serfling-check", {{"N", {64}}, {"n", {60}}, {"replicas", 4}, {"samples", 2000}}},
      {"theorem1-fdd", {{"N", {64}}, {"t_grid", {0.5, 1.0}}, {"replicas", 500}}},
      {"theorem2-sweep", {{"N", {64, 256}}, {"replicas", 10}, {"rho_T", 200.0}, {"rho_replicas", 4}}},
      {"upper-min", {{"N", {256}}, {"replicas", 50}}},
  };
  std::size_t compared = 0, differing = 0;
  std::string first_diff;
  std::uint64_t index = 0;
  for (const auto& [name, body] : cases) {
    const auto kind = *kind_from_name(name);
    json file = body;
    file["seed"] = derive_seed(o.seed, Stream::Jumps, 13000 + index++);
    file["out"] = (o.scratch / "a" / name).string();
    file["workers"] = 1;
    const auto cfg_a = parse_config(kind, file);
    fs::remove_all(cfg_a.out);
    const auto res = run_experiment(cfg_a);

    const auto manifest = load_json_file((fs::path(cfg_a.out) / "manifest.json").string());
    json over{{"out", (o.scratch / "b" / name).string()}, {"workers", std::max<std::size_t>(2, o.workers)}};
    const auto cfg_b = parse_config(kind, manifest, over);
    fs::remove_all(cfg_b.out);
    run_experiment(cfg_b);

    for (const auto& f : res.files) {
      if (fs::path(f).extension() != ".csv") continue;
      ++compared;
      if (slurp(fs::path(cfg_a.out) / f) != slurp(fs::path(cfg_b.out) / f)) {
        ++differing;
        if (first_diff.empty()) first_diff = name + "/" + f;
      }
    }
  }
  return {differing == 0 && compared > 0,
          "csv files compared=" + std::to_string(compared) + " differing=" + std::to_string(differing) +
              (first_diff.empty() ? "" : " first=" + first_diff)};
}

struct Criterion {
  int id;
  const char* name;
  Verdict (*fn)(const AcceptanceOptions&);
};

const Criterion kSuite[] = {
    {1, "coupling exactness", coupling_exactness},
    {2, "serfling sandwich", serfling_sandwich},
    {3, "serfling marginal law", serfling_law},
    {4, "stairs semantics oracle", stairs_oracle},
    {5, "truncation bound", truncation_bound},
    {6, "pathwise subadditivity", subadditivity},
    {7, "regeneration tail", regeneration_tail},
    {8, "velocity alpha=2", velocity_alpha2},
    {9, "stable limit alpha=0.5", stable_limit},
    {10, "stable sampler", stable_sampler},
    {11, "fixed-time proximity", fdd_proximity},
    {12, "spread collapse", spread_collapse},
    {13, "reproducibility", reproducibility},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            void (*on_result)(const CriterionResult&)) {
  std::vector<CriterionResult> results;
  for (const auto& c : kSuite) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), c.id) == options.only.end())
      continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto v = c.fn(options);
      r.passed = v.passed;
      r.detail = v.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << " ("
     << fmt(r.seconds, 3) << "s)";
  return os.str();
}

}  // namespace nbrw
