#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mifo/matrix.hpp"

namespace mifo {

struct GroundTruthPair {
  DataMatrix truth;
  DataMatrix observed;
  /// Masked positions of `observed`, row-major.
  std::vector<Cell> injected;
};

/// Number of entries masked for a given rate: floor(fraction * n * p).
std::size_t injection_count(double fraction, std::size_t rows, std::size_t cols);

/// MCAR injection: masks exactly injection_count() positions drawn uniformly
/// without replacement. Draws that leave a column with fewer than 2 observed
/// entries are rejected and redrawn, up to 100 attempts.
GroundTruthPair inject_missing(const DataMatrix& complete, double fraction, std::uint64_t seed);

}  // namespace mifo
