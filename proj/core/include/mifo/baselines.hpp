#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mifo/matrix.hpp"

namespace mifo {

struct BaselineParams {
  std::size_t knn_k = 10;
  std::size_t svd_rank = 5;
  std::size_t svd_max_iter = 100;
  double svd_tol = 1e-6;
  /// Unset: 5 * sqrt(n * p).
  std::optional<double> svt_tau;
  /// Unset: 1.2 * n * p / |observed|.
  std::optional<double> svt_step;
  std::size_t svt_max_iter = 200;
  double svt_tol = 1e-4;
  std::size_t lls_k = 15;
};

/// Output of a comparison imputer.
struct BaselineResult {
  DataMatrix imputed;
  std::size_t iterations = 0;
  bool converged = true;
  /// Per-iteration convergence statistic for the iterative methods
  /// (relative change of the masked entries for SVD, relative observed
  /// residual for SVT).
  std::vector<double> trace;
  /// Fallbacks and other non-fatal events.
  std::vector<std::string> notes;
};

/// Column-mean fill. Same operation as initial_guess().
DataMatrix mean_impute(const DataMatrix& m);

/// Row-wise k nearest neighbours. The distance between two rows is the RMS
/// difference over the columns both observe (excluding the target column);
/// the estimate is the inverse-distance weighted mean of the neighbours'
/// target values. Entries without any candidate fall back to the column mean.
BaselineResult knn_impute(const DataMatrix& m, std::size_t k);

/// Iterative rank-r SVD reconstruction, starting from the mean fill and
/// rewriting only the masked entries.
BaselineResult svd_impute(const DataMatrix& m, const BaselineParams& params);

/// Singular value thresholding: Y <- Y + step * P_obs(X - shrink(Y, tau)).
BaselineResult svt_impute(const DataMatrix& m, const BaselineParams& params);

/// Local least squares: each incomplete row is regressed on its lls_k
/// nearest rows (that observe all of its missing columns) over its observed
/// columns, and the same weights combine the neighbours' missing-column values.
BaselineResult lls_impute(const DataMatrix& m, const BaselineParams& params);

}  // namespace mifo
