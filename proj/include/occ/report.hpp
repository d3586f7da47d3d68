#pragma once

// File formats used by the command-line tool: detection-history CSV,
// sufficient-statistics JSON, study configuration JSON, and the fit / study /
// sensitivity reports. Every parser has a text-level entry point so the
// formats can be exercised without touching the filesystem.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "occ/core.hpp"
#include "occ/estimate.hpp"
#include "occ/optim.hpp"
#include "occ/sim.hpp"

namespace occ {

enum class Format { Json, Csv };

Format parse_format(std::string_view name);

/// Rectangular comma-separated 0/1 table. A first row containing any
/// non-numeric cell is treated as a header. Errors name the 1-based line and
/// column: MalformedCell, RaggedRows, EmptyFile.
DetectionHistory parse_history_csv_text(std::string_view text);
DetectionHistory parse_history_csv(const std::filesystem::path& path);

std::string emit_history_csv(const DetectionHistory& history);

/// {"S": .., "tau": .., "f0": .., "y": .., "b": ..}; b optional.
SuffStats parse_suffstats_json_text(std::string_view text);
SuffStats parse_suffstats_json(const std::filesystem::path& path);

/// List of {"S", "tau", "psi", "p", "n_sim"[, "seed"]}. Cells without an
/// explicit seed get base_seed + index.
std::vector<StudyCell> parse_study_config_text(std::string_view text, std::uint64_t base_seed);

/// Applies "key=value" pairs separated by commas or whitespace (keys tol_x,
/// tol_f, max_iter, fd_step) on top of `base`.
OptimSettings apply_optim_overrides(std::string_view overrides, OptimSettings base);
/// Same keys as a JSON object.
OptimSettings apply_optim_json(std::string_view text, OptimSettings base);

/// One JSON object {"fits": [...]} or a CSV table with one row per fit.
/// Numbers use the shortest representation that round-trips; unavailable
/// values are null (JSON) or NaN (CSV).
std::string emit_fit(std::span<const FitResult> results, Format format);

/// Per cell: True value / Median estimate / Median SE / MAD / Efficiency /
/// MAD efficiency rows for (partial, full) x (p, psi), plus n_used and n_dropped.
std::string emit_study(std::span<const StudySummary> summaries, Format format);

/// CSV with columns p, psi_bar, derivative, printed_derivative, exceeds_one,
/// marker. The optional marker row (an estimate of p) is merged in p order
/// and has marker = 1.
std::string emit_sensitivity(const SensitivityProfile& profile,
                             std::optional<SensitivityPoint> marker = std::nullopt);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace occ
