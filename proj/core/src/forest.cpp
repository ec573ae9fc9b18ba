#include "mifo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mifo/error.hpp"
#include "mifo/util.hpp"

namespace mifo {

std::size_t ForestParams::resolve_mtry(std::size_t n_predictors) const {
  if (n_predictors == 0) throw ParameterError("forest needs at least one predictor");
  const std::size_t m = mtry.value_or(std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_predictors))))));
  if (m < 1 || m > n_predictors) {
    throw ParameterError("mtry must lie in [1, " + std::to_string(n_predictors) + "], got " +
                         std::to_string(m));
  }
  return m;
}

double RegressionTree::predict(const Matrix& x, Eigen::Index row) const {
  std::uint32_t idx = 0;
  while (!nodes_[idx].is_leaf()) {
    const auto& node = nodes_[idx];
    idx = x(row, node.split_col) <= node.value ? node.left : node.right;
  }
  return nodes_[idx].value;
}

namespace {

struct SplitChoice {
  std::int32_t col = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, const Vector& y, std::size_t mtry, std::size_t min_node_size)
      : x_(x), y_(y), mtry_(mtry), min_node_size_(min_node_size),
        columns_(static_cast<std::size_t>(x.cols())) {}

  RegressionTree grow(Rng& rng, bool bootstrap) {
    const auto n = static_cast<std::size_t>(x_.rows());
    std::vector<std::uint32_t> counts(n, 0);
    samples_.clear();
    samples_.reserve(n);
    if (bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (std::size_t i = 0; i < n; ++i) samples_.push_back(draw(rng));
      // Sorted sample order keeps node sums independent of draw order.
      std::sort(samples_.begin(), samples_.end());
    } else {
      samples_.resize(n);
      std::iota(samples_.begin(), samples_.end(), std::size_t{0});
    }
    for (auto s : samples_) ++counts[s];

    nodes_.clear();
    nodes_.emplace_back();
    struct Pending {
      std::uint32_t node;
      std::size_t begin;
      std::size_t end;
    };
    std::vector<Pending> stack{{0, 0, samples_.size()}};
    while (!stack.empty()) {
      const auto [node, begin, end] = stack.back();
      stack.pop_back();
      const SplitChoice split = best_split(rng, begin, end);
      if (split.col < 0) {
        nodes_[node].value = mean_response(begin, end);
        continue;
      }
      const auto mid = static_cast<std::size_t>(
          std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                samples_.begin() + static_cast<std::ptrdiff_t>(end),
                                [&](std::size_t s) {
                                  return x_(static_cast<Eigen::Index>(s), split.col) <= split.threshold;
                                }) -
          samples_.begin());
      const auto left = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
      nodes_.emplace_back();
      auto& parent = nodes_[node];
      parent.split_col = split.col;
      parent.value = split.threshold;
      parent.left = left;
      parent.right = left + 1;
      parent.candidates = last_candidates_;
      stack.push_back({left + 1, mid, end});
      stack.push_back({left, begin, mid});
    }
    return RegressionTree(std::move(nodes_), std::move(counts));
  }

 private:
  double response(std::size_t s) const { return y_(static_cast<Eigen::Index>(s)); }

  double mean_response(std::size_t begin, std::size_t end) const {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += response(samples_[i]);
    return sum / static_cast<double>(end - begin);
  }

  SplitChoice best_split(Rng& rng, std::size_t begin, std::size_t end) {
    SplitChoice best;
    last_candidates_ = 0;
    const std::size_t n = end - begin;
    if (n <= min_node_size_) return best;
    const double first = response(samples_[begin]);
    bool pure = true;
    double total = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = response(samples_[i]);
      pure = pure && v == first;
      total += v;
    }
    if (pure) return best;

    // mtry distinct columns via partial Fisher-Yates over a fresh permutation.
    std::iota(columns_.begin(), columns_.end(), std::size_t{0});
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, columns_.size() - 1);
      std::swap(columns_[i], columns_[pick(rng)]);
    }
    std::sort(columns_.begin(), columns_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    last_candidates_ = static_cast<std::uint32_t>(mtry_);

    const double parent_term = total * total / static_cast<double>(n);
    pairs_.resize(n);
    for (std::size_t k = 0; k < mtry_; ++k) {
      const auto col = static_cast<Eigen::Index>(columns_[k]);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = samples_[begin + i];
        pairs_[i] = {x_(static_cast<Eigen::Index>(s), col), response(s)};
      }
      std::sort(pairs_.begin(), pairs_.end());
      if (pairs_.front().first == pairs_.back().first) continue;  // constant column

      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += pairs_[i].second;
        const double lo = pairs_[i].first;
        const double hi = pairs_[i + 1].first;
        if (!(lo < hi)) continue;
        const auto nl = static_cast<double>(i + 1);
        const auto nr = static_cast<double>(n - i - 1);
        const double right_sum = total - left_sum;
        // Reduction in sum of squared deviations, up to the constant parent term.
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent_term;
        if (gain > best.gain) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best = {static_cast<std::int32_t>(col), threshold, gain};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Vector& y_;
  std::size_t mtry_;
  std::size_t min_node_size_;
  std::vector<std::size_t> columns_;
  std::vector<std::size_t> samples_;
  std::vector<std::pair<double, double>> pairs_;
  std::vector<RegressionTree::Node> nodes_;
  std::uint32_t last_candidates_ = 0;
};

void check_finite(const Matrix& x, const char* what) {
  if (!x.allFinite()) throw DataError(std::string(what) + " contains non-finite values");
}

}  // namespace

RegressionForest fit_forest(const Matrix& x, const Vector& y, const ForestParams& params) {
  if (x.rows() < 1 || x.cols() < 1) throw DataError("forest training data is empty");
  if (y.size() != x.rows()) {
    throw DataError("response has " + std::to_string(y.size()) + " entries, predictors have " +
                    std::to_string(x.rows()) + " rows");
  }
  if (params.ntree < 1) throw ParameterError("ntree must be at least 1");
  if (params.min_node_size < 1) throw ParameterError("min_node_size must be at least 1");
  check_finite(x, "predictor matrix");
  if (!y.allFinite()) throw DataError("response contains non-finite values");

  ForestParams resolved = params;
  resolved.mtry = params.resolve_mtry(static_cast<std::size_t>(x.cols()));

  std::vector<std::optional<RegressionTree>> slots(params.ntree);
  parallel_for(params.ntree, params.threads, [&](std::size_t t) {
    Rng rng(mix_seed(params.seed, t));
    TreeGrower grower(x, y, *resolved.mtry, params.min_node_size);
    slots[t].emplace(grower.grow(rng, params.bootstrap));
  });
  std::vector<RegressionTree> trees;
  trees.reserve(slots.size());
  for (auto& s : slots) trees.push_back(std::move(*s));

  RegressionForest forest(std::move(trees), resolved, static_cast<std::size_t>(x.cols()),
                          static_cast<std::size_t>(x.rows()));
  forest.oob_mse = oob_error(forest, x, y);
  return forest;
}

Vector predict_forest(const RegressionForest& forest, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != forest.n_predictors()) {
    throw DataError("prediction input has " + std::to_string(x.cols()) + " columns, forest expects " +
                    std::to_string(forest.n_predictors()));
  }
  check_finite(x, "prediction input");
  const auto& trees = forest.trees();
  Vector out(x.rows());
  parallel_for(static_cast<std::size_t>(x.rows()), forest.params().threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x, row);
    out(row) = sum / static_cast<double>(trees.size());
  });
  return out;
}

std::vector<std::optional<double>> oob_predictions(const RegressionForest& forest, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != forest.n_train() ||
      static_cast<std::size_t>(x.cols()) != forest.n_predictors()) {
    throw DataError("OOB evaluation needs the training predictor matrix");
  }
  std::vector<std::optional<double>> out(forest.n_train());
  for (std::size_t i = 0; i < forest.n_train(); ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& tree : forest.trees()) {
      if (!tree.is_out_of_bag(i)) continue;
      sum += tree.predict(x, static_cast<Eigen::Index>(i));
      ++count;
    }
    if (count > 0) out[i] = sum / static_cast<double>(count);
  }
  return out;
}

std::optional<double> oob_error(const RegressionForest& forest, const Matrix& x, const Vector& y) {
  if (y.size() != x.rows()) throw DataError("response length does not match predictor rows");
  const auto preds = oob_predictions(forest, x);
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!preds[i]) continue;
    const double d = *preds[i] - y(static_cast<Eigen::Index>(i));
    sq += d * d;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sq / static_cast<double>(count);
}

}  // namespace mifo
