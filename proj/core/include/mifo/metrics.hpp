#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mifo/matrix.hpp"

namespace mifo {

/// Normalized RMSE over `positions`:
///   sqrt( mean((truth - imputed)^2) / var(truth) )
/// where mean and var run over the listed positions only and var is the
/// population variance. ComputeError when that variance is zero.
double nrmse(const DataMatrix& truth, const DataMatrix& imputed, const std::vector<Cell>& positions);

struct NmaeResult {
  /// One entry per column; empty for columns with no listed position.
  std::vector<std::optional<double>> per_col;
  /// Mean of the present per-column values.
  double overall = 0.0;
};

/// Normalized MAE per column: mean |imputed - truth| / (max - min), with the
/// range taken over the complete true column.
NmaeResult nmae(const DataMatrix& truth, const DataMatrix& imputed, const std::vector<Cell>& positions);

struct EvaluationReport {
  double nrmse = 0.0;
  std::vector<std::optional<double>> nmae_per_col;
  double nmae_overall = 0.0;
  std::size_t n_missing = 0;
};

EvaluationReport evaluate(const DataMatrix& truth, const DataMatrix& imputed,
                          const std::vector<Cell>& positions);

}  // namespace mifo
