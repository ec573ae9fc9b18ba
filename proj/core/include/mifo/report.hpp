#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mifo/benchmark.hpp"

namespace mifo {

enum class ReportFormat { csv, markdown };

inline constexpr std::string_view kGridCsvHeader = "method,rate,seed,nrmse,nmae,seconds,converged";
inline constexpr std::string_view kSweepCsvHeader =
    "mtry,ntree,mtry_used,nrmse_pct,nmae_pct,seconds,iterations,clamped";

/// csv: one line per cell under kGridCsvHeader; failed cells carry NA metrics
/// and "error" in the converged column. markdown: methods x rates pivot
/// tables of seed-median NRMSE, NMAE and runtime.
std::string render_report(const BenchmarkGrid& grid, ReportFormat format);

/// csv: one line per cell under kSweepCsvHeader. markdown: mtry x ntree table
/// of "NRMSE%/NMAE% seconds".
std::string render_report(const SweepGrid& grid, ReportFormat format);

/// Reads a grid CSV back. Cells from unknown method names are kept, so
/// externally produced results can be merged into one report.
std::vector<BenchmarkCell> parse_grid_csv(std::string_view text);

}  // namespace mifo
