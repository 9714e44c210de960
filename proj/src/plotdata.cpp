#include "nbrw/plotdata.hpp"

#include <string>

#include "nbrw/io.hpp"

namespace nbrw {

namespace {

void add(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ' ';
    out += c;
    first = false;
  }
  out += '\n';
}

}  // namespace

void emit_plotdata(const std::filesystem::path& file, const StairsPath& path, double horizon) {
  std::string out = "# stairs path R(t), one block per plateau\n# columns: t R\n";
  double start = 0.0, level = 0.0;
  const auto& times = path.jump_times();
  const auto& values = path.values();
  for (std::size_t i = 0; i <= times.size(); ++i) {
    const double end = i < times.size() ? times[i] : horizon;
    if (i) out += '\n';
    add(out, {format_double(start), format_double(level)});
    add(out, {format_double(end), format_double(level)});
    if (i < times.size()) {
      start = times[i];
      level = values[i];
    }
  }
  write_text(file, out);
}

void emit_plotdata(const std::filesystem::path& file, const ScalingReport& report) {
  std::string out = "# scaling sweep: observed / predicted with 95% interval\n# columns: N ratio ci_lo ci_hi\n";
  for (const auto& r : report.rows)
    add(out, {std::to_string(r.N), format_double(r.ratio), format_double(r.ci_lo), format_double(r.ci_hi)});
  write_text(file, out);
}

void emit_plotdata(const std::filesystem::path& file, const RescaledTrajectory& traj) {
  std::string out = "# rescaled extremes\n# columns: t min_rescaled max_rescaled\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    add(out, {format_double(traj.t[i]), format_double(traj.min[i]), format_double(traj.max[i])});
  write_text(file, out);
}

void emit_plotdata(const std::filesystem::path& file, std::span<const FddReport> reports) {
  std::string out = "# fixed-time KS distances, rescaled BRW vs stairs process\n"
                    "# columns: N t ks_max crit01 ks_min\n";
  for (const auto& rep : reports)
    for (const auto& row : rep.rows)
      add(out, {std::to_string(rep.N), format_double(row.t), format_double(row.ks_max.statistic),
                format_double(row.ks_max.crit01), format_double(row.ks_min.statistic)});
  write_text(file, out);
}

void emit_plotdata(const std::filesystem::path& file, std::span<const UpperMinRow> rows) {
  std::string out = "# spread-collapse event frequency\n# columns: N probability ci_lo ci_hi\n";
  for (const auto& r : rows)
    add(out, {std::to_string(r.N), format_double(r.probability), format_double(r.ci_lo),
              format_double(r.ci_hi)});
  write_text(file, out);
}

}  // namespace nbrw
