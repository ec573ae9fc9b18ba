#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mifo/matrix.hpp"

namespace mifo {

struct ForestParams {
  std::size_t ntree = 100;
  /// Predictors tried per node; unset means floor(sqrt(p)), at least 1.
  std::optional<std::size_t> mtry;
  /// Nodes holding this many in-bag samples or fewer become leaves.
  std::size_t min_node_size = 5;
  std::uint64_t seed = 0;
  /// n draws with replacement per tree; when false every tree sees each row once.
  bool bootstrap = true;
  /// Worker threads for tree growing and prediction. Output does not depend on it.
  std::size_t threads = 1;

  /// mtry for `n_predictors` columns; ParameterError outside [1, n_predictors].
  std::size_t resolve_mtry(std::size_t n_predictors) const;
};

/// Unpruned CART regression tree stored as a flat node array (root = 0).
class RegressionTree {
 public:
  struct Node {
    /// -1 for leaves.
    std::int32_t split_col = -1;
    /// Split threshold for internal nodes (x <= threshold goes left),
    /// prediction for leaves.
    double value = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    /// Number of candidate predictors examined when this node was split.
    std::uint32_t candidates = 0;

    bool is_leaf() const noexcept { return split_col < 0; }
  };

  RegressionTree(std::vector<Node> nodes, std::vector<std::uint32_t> in_bag_counts)
      : nodes_(std::move(nodes)), in_bag_(std::move(in_bag_counts)) {}

  double predict(const Matrix& x, Eigen::Index row) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  /// Multiplicity of each training row in this tree's bootstrap sample.
  const std::vector<std::uint32_t>& in_bag_counts() const noexcept { return in_bag_; }
  bool is_out_of_bag(std::size_t row) const { return in_bag_[row] == 0; }

 private:
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> in_bag_;
};

class RegressionForest {
 public:
  RegressionForest(std::vector<RegressionTree> trees, ForestParams params, std::size_t n_predictors,
                   std::size_t n_train)
      : trees_(std::move(trees)), params_(params), n_predictors_(n_predictors), n_train_(n_train) {}

  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  /// Parameters with mtry resolved.
  const ForestParams& params() const noexcept { return params_; }
  std::size_t n_predictors() const noexcept { return n_predictors_; }
  std::size_t n_train() const noexcept { return n_train_; }

  /// OOB mean squared error on the training data, set by fit_forest. Empty
  /// when no training row was ever out of bag.
  std::optional<double> oob_mse;

 private:
  std::vector<RegressionTree> trees_;
  ForestParams params_;
  std::size_t n_predictors_;
  std::size_t n_train_;
};

/// Grows params.ntree trees on bootstrap samples of (x, y). Tree t draws from
/// its own generator seeded with mix_seed(params.seed, t), so the result is
/// independent of params.threads.
RegressionForest fit_forest(const Matrix& x, const Vector& y, const ForestParams& params);

/// Mean over trees of the leaf reached by each row, summed in tree order.
Vector predict_forest(const RegressionForest& forest, const Matrix& x);

/// Per training row, the mean prediction of the trees for which the row was
/// out of bag; empty for rows that were in bag everywhere.
std::vector<std::optional<double>> oob_predictions(const RegressionForest& forest, const Matrix& x);

/// MSE of oob_predictions() against y over rows with an OOB prediction.
/// Empty when no row was ever out of bag.
std::optional<double> oob_error(const RegressionForest& forest, const Matrix& x, const Vector& y);

}  // namespace mifo
