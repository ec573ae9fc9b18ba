#pragma once

#include <cstddef>
#include <cstdint>

#include "mifo/matrix.hpp"

namespace mifo {

struct SyntheticSpec {
  std::size_t n_rows = 100;
  std::size_t n_cols = 20;
  std::size_t latent_rank = 3;
  double noise_sigma = 0.1;
  std::uint64_t seed = 42;
};

/// X = A B^T + E with A (n x r), B (p x r) standard normal and E normal with
/// standard deviation noise_sigma. Complete and deterministic in `spec`.
DataMatrix generate_synthetic(const SyntheticSpec& spec);

}  // namespace mifo
