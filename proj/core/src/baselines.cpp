#include "mifo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mifo/error.hpp"
#include "mifo/impute.hpp"
#include "mifo/linalg.hpp"

namespace mifo {

namespace {

using Index = Eigen::Index;

std::vector<double> observed_means(const DataMatrix& m) {
  std::vector<double> means(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) means[c] = m.observed_mean(c);
  return means;
}

/// Indices of the `k` smallest distances, ties broken by row index.
std::vector<std::size_t> nearest(std::vector<std::pair<double, std::size_t>>& cand, std::size_t k) {
  const std::size_t take = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
  std::vector<std::size_t> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = cand[i].second;
  return out;
}

}  // namespace

DataMatrix mean_impute(const DataMatrix& m) { return initial_guess(m); }

BaselineResult knn_impute(const DataMatrix& m, std::size_t k) {
  if (k < 1 || k >= m.rows()) {
    throw ParameterError("knn k must lie in [1, " + std::to_string(m.rows() - 1) + "], got " +
                         std::to_string(k));
  }
  const auto means = observed_means(m);
  const Matrix& x = m.values_or_nan();
  const Mask& mask = m.mask();
  Matrix out = m.filled(means);
  BaselineResult result{m, 0, true, {}, {}};
  const auto n = static_cast<Index>(m.rows());
  const auto p = static_cast<Index>(m.cols());

  std::vector<std::pair<double, std::size_t>> cand;
  for (const auto& cell : m.missing_cells()) {
    const auto i = static_cast<Index>(cell.row);
    const auto t = static_cast<Index>(cell.col);
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i || mask(j, t)) continue;
      double sq = 0.0;
      int shared = 0;
      for (Index c = 0; c < p; ++c) {
        if (c == t || mask(i, c) || mask(j, c)) continue;
        const double d = x(i, c) - x(j, c);
        sq += d * d;
        ++shared;
      }
      if (shared > 0) cand.emplace_back(std::sqrt(sq / shared), static_cast<std::size_t>(j));
    }
    if (cand.empty()) {
      result.notes.push_back("knn: no neighbour for (" + std::to_string(cell.row) + ", " +
                             std::to_string(cell.col) + "), using column mean");
      continue;
    }
    const auto picked = nearest(cand, k);
    double wsum = 0.0;
    double vsum = 0.0;
    for (std::size_t r = 0; r < picked.size(); ++r) {
      const double w = 1.0 / (cand[r].first + 1e-12);
      wsum += w;
      vsum += w * x(static_cast<Index>(picked[r]), t);
    }
    out(i, t) = vsum / wsum;
  }
  result.imputed = m.with_values(std::move(out));
  return result;
}

BaselineResult svd_impute(const DataMatrix& m, const BaselineParams& params) {
  const std::size_t max_rank = std::min(m.rows(), m.cols());
  if (params.svd_rank < 1 || params.svd_rank > max_rank) {
    throw ParameterError("svd rank must lie in [1, " + std::to_string(max_rank) + "], got " +
                         std::to_string(params.svd_rank));
  }
  if (params.svd_max_iter < 1 || !(params.svd_tol > 0.0)) {
    throw ParameterError("svd max_iter and tol must be positive");
  }
  Matrix z = m.filled(observed_means(m));
  BaselineResult result{m, 0, true, {}, {}};
  if (!m.has_missing()) return result;

  const auto cells = m.missing_cells();
  result.converged = false;
  for (std::size_t it = 1; it <= params.svd_max_iter; ++it) {
    const Matrix low_rank = svd_decompose(z, params.svd_rank).reconstruct();
    double num = 0.0;
    double den = 0.0;
    for (const auto& c : cells) {
      const auto r = static_cast<Index>(c.row);
      const auto k = static_cast<Index>(c.col);
      const double d = low_rank(r, k) - z(r, k);
      num += d * d;
      den += z(r, k) * z(r, k);
      z(r, k) = low_rank(r, k);
    }
    const double change = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    result.trace.push_back(change);
    result.iterations = it;
    if (change < params.svd_tol) {
      result.converged = true;
      break;
    }
  }
  result.imputed = m.with_values(std::move(z));
  return result;
}

BaselineResult svt_impute(const DataMatrix& m, const BaselineParams& params) {
  const auto n = static_cast<double>(m.rows());
  const auto p = static_cast<double>(m.cols());
  const double observed = n * p - static_cast<double>(m.total_missing());
  const double tau = params.svt_tau.value_or(5.0 * std::sqrt(n * p));
  const double step = params.svt_step.value_or(1.2 * n * p / observed);
  if (!(tau > 0.0) || !(step > 0.0) || params.svt_max_iter < 1 || !(params.svt_tol > 0.0)) {
    throw ParameterError("svt tau, step, max_iter and tol must be positive");
  }
  for (std::size_t c = 0; c < m.cols(); ++c) (void)m.observed_mean(c);
  BaselineResult result{m, 0, true, {}, {}};
  if (!m.has_missing()) return result;

  const Matrix target = m.filled(std::vector<double>(m.cols(), 0.0));
  const Eigen::ArrayXXd observed_ind = (!m.mask()).cast<double>();
  const double target_norm = target.norm();
  if (!(target_norm > 0.0)) throw ComputeError("svt: observed entries are all zero");

  Matrix y = Matrix::Zero(target.rows(), target.cols());
  Matrix estimate = y;
  double initial = 0.0;
  result.converged = false;
  for (std::size_t it = 1; it <= params.svt_max_iter; ++it) {
    estimate = shrink_singular_values(y, tau);
    const Matrix residual = ((target - estimate).array() * observed_ind).matrix();
    const double rel = residual.norm() / target_norm;
    result.trace.push_back(rel);
    result.iterations = it;
    if (it == 1) initial = rel;
    if (rel > 10.0 * initial) {
      throw ComputeError("svt diverged (residual " + std::to_string(rel) +
                         " vs initial " + std::to_string(initial) + "); use a smaller step");
    }
    if (rel < params.svt_tol) {
      result.converged = true;
      break;
    }
    y += step * residual;
  }

  Matrix out = target;
  for (const auto& c : m.missing_cells()) {
    out(static_cast<Index>(c.row), static_cast<Index>(c.col)) =
        estimate(static_cast<Index>(c.row), static_cast<Index>(c.col));
  }
  result.imputed = m.with_values(std::move(out));
  return result;
}

BaselineResult lls_impute(const DataMatrix& m, const BaselineParams& params) {
  const std::size_t k = params.lls_k;
  if (k < 1 || k >= m.rows()) {
    throw ParameterError("lls k must lie in [1, " + std::to_string(m.rows() - 1) + "], got " +
                         std::to_string(k));
  }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (m.rows() - m.missing_count(c) < 2) {
      throw DataError("lls: column \"" + m.col_names()[c] + "\" has fewer than 2 observed entries");
    }
  }
  const auto means = observed_means(m);
  const Matrix filled = m.filled(means);
  const Matrix& x = m.values_or_nan();
  const Mask& mask = m.mask();
  Matrix out = filled;
  BaselineResult result{m, 0, true, {}, {}};
  const auto n = static_cast<Index>(m.rows());
  const auto p = static_cast<Index>(m.cols());

  std::vector<Index> miss;
  std::vector<Index> obs;
  std::vector<std::pair<double, std::size_t>> cand;
  for (Index i = 0; i < n; ++i) {
    miss.clear();
    obs.clear();
    for (Index c = 0; c < p; ++c) (mask(i, c) ? miss : obs).push_back(c);
    if (miss.empty()) continue;
    if (obs.empty()) {
      result.notes.push_back("lls: row " + std::to_string(i) + " has no observed entry, using column means");
      continue;
    }
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const bool usable = std::none_of(miss.begin(), miss.end(), [&](Index c) { return mask(j, c); });
      if (!usable) continue;
      double sq = 0.0;
      for (Index c : obs) {
        const double d = x(i, c) - filled(j, c);
        sq += d * d;
      }
      cand.emplace_back(std::sqrt(sq), static_cast<std::size_t>(j));
    }
    if (cand.empty()) {
      result.notes.push_back("lls: no usable neighbour for row " + std::to_string(i) +
                             ", using column means");
      continue;
    }
    const auto picked = nearest(cand, k);
    const auto kk = static_cast<Index>(picked.size());
    Matrix a(static_cast<Index>(obs.size()), kk);
    Vector b(static_cast<Index>(obs.size()));
    for (std::size_t o = 0; o < obs.size(); ++o) {
      b(static_cast<Index>(o)) = x(i, obs[o]);
      for (Index q = 0; q < kk; ++q) {
        a(static_cast<Index>(o), q) = filled(static_cast<Index>(picked[static_cast<std::size_t>(q)]), obs[o]);
      }
    }
    const Vector w = min_norm_solve(a, b);
    for (Index c : miss) {
      double v = 0.0;
      for (Index q = 0; q < kk; ++q) v += w(q) * x(static_cast<Index>(picked[static_cast<std::size_t>(q)]), c);
      if (std::isfinite(v)) {
        out(i, c) = v;
      } else {
        result.notes.push_back("lls: non-finite estimate in row " + std::to_string(i) + ", using column mean");
      }
    }
  }
  result.imputed = m.with_values(std::move(out));
  return result;
}

}  // namespace mifo
