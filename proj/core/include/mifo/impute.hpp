#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mifo/forest.hpp"
#include "mifo/matrix.hpp"

namespace mifo {

enum class InitialGuess { column_mean };

struct MifoParams {
  /// Per-column forest settings. mtry, when unset, resolves against p - 1
  /// predictors. The seed is remixed per sweep and per column.
  ForestParams forest;
  std::size_t max_iter = 10;
  InitialGuess initial_guess = InitialGuess::column_mean;
  /// Called after every completed sweep with its 1-based index and the
  /// working matrix at that point. Used for tracing; does not affect results.
  std::function<void(std::size_t sweep, const Matrix& current)> on_sweep;
};

struct ImputationResult {
  DataMatrix imputed;
  /// Relative change of each completed sweep against the one before it.
  std::vector<double> delta_trace;
  std::size_t iterations_run = 0;
  /// False only when max_iter sweeps ran without the change increasing.
  bool converged = true;
  /// Out-of-bag error estimates from the forests of the returned sweep.
  std::optional<double> oob_nrmse_estimate;
  std::optional<double> oob_nmae_estimate;
  /// Empty for complete columns.
  std::vector<std::optional<double>> per_column_oob_mse;
};

/// Column indices ordered by ascending missing count, ties by index.
std::vector<std::size_t> sort_columns_by_missingness(const DataMatrix& m);

/// Fills each masked entry with its column's observed mean.
DataMatrix initial_guess(const DataMatrix& m);

/// sum((next - prev)^2) / sum(next^2) over all entries.
double delta_n(const Matrix& next, const Matrix& prev);
double delta_n(const DataMatrix& next, const DataMatrix& prev);

/// Iterative random-forest imputation.
///
/// Starting from the column-mean fill, each sweep visits the incomplete
/// columns in ascending order of missingness. For column t a forest is fit
/// on the rows where t is observed, with every other column's current values
/// as predictors, and its predictions replace the entries where t is missing.
/// Updates are written immediately, so later columns in the same sweep see
/// them. After each sweep the relative change delta_n against the previous
/// sweep is recorded; the first time it grows, the previous sweep's matrix
/// is returned. Otherwise the run stops after max_iter sweeps.
ImputationResult mifo_impute(const DataMatrix& m, const MifoParams& params);

}  // namespace mifo
