#include "mifo/metrics.hpp"

#include <cmath>
#include <string>

#include "mifo/error.hpp"

namespace mifo {

namespace {

void check_inputs(const DataMatrix& truth, const DataMatrix& imputed,
                  const std::vector<Cell>& positions) {
  if (positions.empty()) throw ParameterError("no positions to evaluate");
  if (truth.rows() != imputed.rows() || truth.cols() != imputed.cols()) {
    throw DataError("truth and imputed matrices differ in shape");
  }
  if (truth.has_missing()) throw DataError("truth matrix has missing entries");
  if (imputed.has_missing()) throw DataError("imputed matrix has missing entries");
  for (const auto& c : positions) {
    if (c.row >= truth.rows() || c.col >= truth.cols()) {
      throw DataError("position (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                      ") out of range");
    }
  }
}

}  // namespace

double nrmse(const DataMatrix& truth, const DataMatrix& imputed, const std::vector<Cell>& positions) {
  check_inputs(truth, imputed, positions);
  const double count = static_cast<double>(positions.size());
  double sum = 0.0;
  double sq_err = 0.0;
  for (const auto& c : positions) {
    const double t = truth.at(c.row, c.col);
    const double d = t - imputed.at(c.row, c.col);
    sum += t;
    sq_err += d * d;
  }
  const double mean = sum / count;
  double var = 0.0;
  for (const auto& c : positions) {
    const double d = truth.at(c.row, c.col) - mean;
    var += d * d;
  }
  var /= count;
  if (!(var > 0.0)) throw ComputeError("NRMSE undefined: true values at the positions are constant");
  return std::sqrt((sq_err / count) / var);
}

NmaeResult nmae(const DataMatrix& truth, const DataMatrix& imputed, const std::vector<Cell>& positions) {
  check_inputs(truth, imputed, positions);
  const std::size_t p = truth.cols();
  std::vector<double> abs_sum(p, 0.0);
  std::vector<std::size_t> count(p, 0);
  for (const auto& c : positions) {
    abs_sum[c.col] += std::abs(imputed.at(c.row, c.col) - truth.at(c.row, c.col));
    ++count[c.col];
  }
  const Matrix& t = truth.values_or_nan();
  NmaeResult out;
  out.per_col.resize(p);
  double total = 0.0;
  std::size_t affected = 0;
  for (std::size_t k = 0; k < p; ++k) {
    if (count[k] == 0) continue;
    const auto col = t.col(static_cast<Eigen::Index>(k));
    const double range = col.maxCoeff() - col.minCoeff();
    if (!(range > 0.0)) {
      throw ComputeError("NMAE undefined: true column \"" + truth.col_names()[k] + "\" is constant");
    }
    const double v = abs_sum[k] / static_cast<double>(count[k]) / range;
    out.per_col[k] = v;
    total += v;
    ++affected;
  }
  out.overall = total / static_cast<double>(affected);
  return out;
}

EvaluationReport evaluate(const DataMatrix& truth, const DataMatrix& imputed,
                          const std::vector<Cell>& positions) {
  EvaluationReport r;
  r.nrmse = nrmse(truth, imputed, positions);
  auto n = nmae(truth, imputed, positions);
  r.nmae_per_col = std::move(n.per_col);
  r.nmae_overall = n.overall;
  r.n_missing = positions.size();
  return r;
}

}  // namespace mifo
