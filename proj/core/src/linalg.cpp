#include "mifo/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SVD>

#include "mifo/error.hpp"

namespace mifo {

namespace {

Eigen::BDCSVD<Matrix> full_svd(const Matrix& m) {
  if (!m.allFinite()) throw DataError("SVD input contains non-finite values");
  return Eigen::BDCSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

SvdFactors svd_decompose(const Matrix& m, std::size_t rank) {
  const auto max_rank = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (rank < 1 || rank > max_rank) {
    throw ParameterError("SVD rank must lie in [1, " + std::to_string(max_rank) + "], got " +
                         std::to_string(rank));
  }
  const auto svd = full_svd(m);
  const auto r = static_cast<Eigen::Index>(rank);
  return SvdFactors{svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r)};
}

Matrix shrink_singular_values(const Matrix& m, double tau) {
  const auto svd = full_svd(m);
  const Vector shrunk = (svd.singularValues().array() - tau).max(0.0).matrix();
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

Vector min_norm_solve(const Matrix& a, const Vector& b, double rcond) {
  if (a.rows() != b.size()) throw DataError("least-squares system has mismatched sizes");
  const auto svd = full_svd(a);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rcond * s(0) : 0.0;
  Vector utb = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    utb(i) = s(i) > cutoff ? utb(i) / s(i) : 0.0;
  }
  return svd.matrixV() * utb;
}

}  // namespace mifo
