#include "mifo/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "mifo/error.hpp"
#include "mifo/util.hpp"

namespace mifo {

DataMatrix generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_rows < 2 || spec.n_cols < 1) throw ParameterError("synthetic data needs n >= 2, p >= 1");
  if (spec.latent_rank < 1 || spec.latent_rank > std::min(spec.n_rows, spec.n_cols)) {
    throw ParameterError("latent rank must lie in [1, min(n, p)], got " + std::to_string(spec.latent_rank));
  }
  if (!(spec.noise_sigma >= 0.0)) throw ParameterError("noise sigma must be nonnegative");

  const auto n = static_cast<Eigen::Index>(spec.n_rows);
  const auto p = static_cast<Eigen::Index>(spec.n_cols);
  const auto r = static_cast<Eigen::Index>(spec.latent_rank);
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, r);
  Matrix b(p, r);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < r; ++k) a(i, k) = normal(rng);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < r; ++k) b(j, k) = normal(rng);
  Matrix x = a * b.transpose();
  if (spec.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) += spec.noise_sigma * normal(rng);
  }
  return DataMatrix(std::move(x), default_column_names(spec.n_cols));
}

}  // namespace mifo
