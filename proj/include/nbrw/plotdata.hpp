#pragma once

#include <filesystem>
#include <span>

#include "nbrw/experiments.hpp"
#include "nbrw/particle_system.hpp"
#include "nbrw/stairs.hpp"

namespace nbrw {

// Gnuplot-ready panels: whitespace-separated columns under "#" header lines,
// one file per panel. Blank lines separate blocks where the panel has them.

/// Step function of R on [0, horizon]: one two-point block per plateau.
void emit_plotdata(const std::filesystem::path& file, const StairsPath& path, double horizon);

/// Columns: N ratio ci_lo ci_hi.
void emit_plotdata(const std::filesystem::path& file, const ScalingReport& report);

/// Columns: t min_rescaled max_rescaled.
void emit_plotdata(const std::filesystem::path& file, const RescaledTrajectory& traj);

/// Columns: N t ks_max crit01 ks_min.
void emit_plotdata(const std::filesystem::path& file, std::span<const FddReport> reports);

/// Columns: N probability ci_lo ci_hi.
void emit_plotdata(const std::filesystem::path& file, std::span<const UpperMinRow> rows);

}  // namespace nbrw
