#include "mifo/impute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mifo/error.hpp"
#include "mifo/util.hpp"

namespace mifo {

std::vector<std::size_t> sort_columns_by_missingness(const DataMatrix& m) {
  std::vector<std::size_t> order(m.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> counts(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) counts[c] = m.missing_count(c);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });
  return order;
}

namespace {

std::vector<double> column_means(const DataMatrix& m) {
  std::vector<double> means(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) means[c] = m.observed_mean(c);
  return means;
}

// Per-column state of the last forest fitted for that column.
struct ColumnOob {
  std::optional<double> mse;
  std::optional<double> mae;
};

struct SweepOutcome {
  Matrix values;
  std::vector<ColumnOob> oob;
};

}  // namespace

DataMatrix initial_guess(const DataMatrix& m) {
  if (!m.has_missing()) return m;
  const auto means = column_means(m);
  return m.with_values(m.filled(means));
}

double delta_n(const Matrix& next, const Matrix& prev) {
  if (next.rows() != prev.rows() || next.cols() != prev.cols()) {
    throw DataError("delta_n: matrices differ in shape");
  }
  const double denom = next.squaredNorm();
  if (!(denom > 0.0)) throw ComputeError("delta_n: new matrix is all zero");
  return (next - prev).squaredNorm() / denom;
}

double delta_n(const DataMatrix& next, const DataMatrix& prev) {
  return delta_n(next.dense(), prev.dense());
}

ImputationResult mifo_impute(const DataMatrix& m, const MifoParams& params) {
  if (params.max_iter < 1) throw ParameterError("max_iter must be at least 1");
  const std::size_t p = m.cols();
  if (!m.has_missing()) {
    return ImputationResult{m, {}, 0, true, std::nullopt, std::nullopt,
                            std::vector<std::optional<double>>(p)};
  }
  if (p < 2) throw DataError("imputation needs at least 2 columns");

  std::vector<ColumnSplit> splits(p);
  for (std::size_t c = 0; c < p; ++c) {
    splits[c] = m.split(c);
    if (!splits[c].rows_mis.empty() && splits[c].rows_obs.size() < 2) {
      throw DataError("column \"" + m.col_names()[c] + "\" has fewer than 2 observed entries");
    }
  }
  std::vector<std::size_t> targets;
  for (auto c : sort_columns_by_missingness(m)) {
    if (!splits[c].rows_mis.empty()) targets.push_back(c);
  }
  const std::size_t mtry = params.forest.resolve_mtry(p - 1);

  // Observed value ranges, used to scale the OOB absolute errors.
  std::vector<double> obs_range(p, 0.0);
  for (auto t : targets) {
    double lo = m.at(splits[t].rows_obs.front(), t);
    double hi = lo;
    for (auto r : splits[t].rows_obs) {
      lo = std::min(lo, m.at(r, t));
      hi = std::max(hi, m.at(r, t));
    }
    obs_range[t] = hi - lo;
  }

  Matrix current = initial_guess(m).dense();
  auto run_sweep = [&](std::size_t sweep) {
    std::vector<ColumnOob> oob(p);
    for (auto t : targets) {
      const auto& split = splits[t];
      const auto n_obs = static_cast<Eigen::Index>(split.rows_obs.size());
      const auto n_mis = static_cast<Eigen::Index>(split.rows_mis.size());
      Matrix x_obs(n_obs, static_cast<Eigen::Index>(p - 1));
      Matrix x_mis(n_mis, static_cast<Eigen::Index>(p - 1));
      Vector y_obs(n_obs);
      for (Eigen::Index i = 0; i < n_obs; ++i) {
        const auto r = static_cast<Eigen::Index>(split.rows_obs[static_cast<std::size_t>(i)]);
        y_obs(i) = current(r, static_cast<Eigen::Index>(t));
      }
      for (std::size_t c = 0, k = 0; c < p; ++c) {
        if (c == t) continue;
        const auto src = static_cast<Eigen::Index>(c);
        const auto dst = static_cast<Eigen::Index>(k++);
        for (Eigen::Index i = 0; i < n_obs; ++i) {
          x_obs(i, dst) = current(static_cast<Eigen::Index>(split.rows_obs[static_cast<std::size_t>(i)]), src);
        }
        for (Eigen::Index i = 0; i < n_mis; ++i) {
          x_mis(i, dst) = current(static_cast<Eigen::Index>(split.rows_mis[static_cast<std::size_t>(i)]), src);
        }
      }

      ForestParams fp = params.forest;
      fp.mtry = mtry;
      fp.seed = mix_seed(mix_seed(params.forest.seed, sweep), t);
      RegressionForest forest = [&] {
        try {
          return fit_forest(x_obs, y_obs, fp);
        } catch (const Error& e) {
          throw ComputeError("column \"" + m.col_names()[t] + "\": " + e.what());
        }
      }();
      const Vector pred = predict_forest(forest, x_mis);
      for (Eigen::Index i = 0; i < n_mis; ++i) {
        current(static_cast<Eigen::Index>(split.rows_mis[static_cast<std::size_t>(i)]),
                static_cast<Eigen::Index>(t)) = pred(i);
      }

      const auto oob_pred = oob_predictions(forest, x_obs);
      double sq = 0.0;
      double ab = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < oob_pred.size(); ++i) {
        if (!oob_pred[i]) continue;
        const double d = *oob_pred[i] - y_obs(static_cast<Eigen::Index>(i));
        sq += d * d;
        ab += std::abs(d);
        ++cnt;
      }
      if (cnt > 0) {
        oob[t].mse = sq / static_cast<double>(cnt);
        oob[t].mae = ab / static_cast<double>(cnt);
      }
    }
    return oob;
  };

  std::vector<double> trace;
  Matrix previous = current;
  std::vector<ColumnOob> previous_oob;
  std::vector<ColumnOob> current_oob;
  bool converged = false;
  for (std::size_t sweep = 1; sweep <= params.max_iter; ++sweep) {
    previous = current;
    previous_oob = std::move(current_oob);
    current_oob = run_sweep(sweep);
    trace.push_back(delta_n(current, previous));
    if (params.on_sweep) params.on_sweep(sweep, current);
    if (trace.size() >= 2 && trace.back() > trace[trace.size() - 2]) {
      // First increase: the previous sweep is the result.
      current = std::move(previous);
      current_oob = std::move(previous_oob);
      converged = true;
      break;
    }
  }

  ImputationResult result{m.with_values(std::move(current)), std::move(trace), 0, converged,
                          std::nullopt, std::nullopt, std::vector<std::optional<double>>(p)};
  result.iterations_run = result.delta_trace.size();

  // Missing-count-weighted pooled MSE over the pooled variance of the
  // observed values of the incomplete columns; mirrors the NRMSE definition.
  double weighted_mse = 0.0;
  double weight = 0.0;
  double nmae_sum = 0.0;
  std::size_t nmae_cols = 0;
  double obs_sum = 0.0;
  double obs_count = 0.0;
  for (auto t : targets) {
    for (auto r : splits[t].rows_obs) {
      obs_sum += m.at(r, t);
      obs_count += 1.0;
    }
  }
  const double obs_mean = obs_sum / obs_count;
  double obs_var = 0.0;
  for (auto t : targets) {
    for (auto r : splits[t].rows_obs) {
      const double d = m.at(r, t) - obs_mean;
      obs_var += d * d;
    }
  }
  obs_var /= obs_count;
  for (auto t : targets) {
    const auto& o = current_oob[t];
    result.per_column_oob_mse[t] = o.mse;
    if (!o.mse) continue;
    const auto w = static_cast<double>(splits[t].rows_mis.size());
    weighted_mse += w * *o.mse;
    weight += w;
    if (obs_range[t] > 0.0) {
      nmae_sum += *o.mae / obs_range[t];
      ++nmae_cols;
    }
  }
  if (weight > 0.0 && obs_var > 0.0) result.oob_nrmse_estimate = std::sqrt(weighted_mse / weight / obs_var);
  if (nmae_cols > 0) result.oob_nmae_estimate = nmae_sum / static_cast<double>(nmae_cols);
  return result;
}

}  // namespace mifo
