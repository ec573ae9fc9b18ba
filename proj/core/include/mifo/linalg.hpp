#pragma once

#include <cstddef>

#include "mifo/matrix.hpp"

namespace mifo {

/// Truncated SVD: u is n x r, v is p x r (orthonormal columns), sigma
/// descending and nonnegative.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma.size()); }
  Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Top-`rank` singular triplets of a finite matrix. ParameterError unless
/// 1 <= rank <= min(n, p).
SvdFactors svd_decompose(const Matrix& m, std::size_t rank);

/// Soft-thresholds the singular values: U diag(max(sigma - tau, 0)) V^T.
Matrix shrink_singular_values(const Matrix& m, double tau);

/// Minimum-norm least-squares solution of a x = b via the SVD, discarding
/// singular values below rcond * sigma_max.
Vector min_norm_solve(const Matrix& a, const Vector& b, double rcond = 1e-12);

}  // namespace mifo
