#include "mifo/missing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mifo/error.hpp"
#include "mifo/util.hpp"

namespace mifo {

namespace {
constexpr int kMaxAttempts = 100;
constexpr std::size_t kMinObservedPerColumn = 2;
}  // namespace

std::size_t injection_count(double fraction, std::size_t rows, std::size_t cols) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ParameterError("missing fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  const double total = static_cast<double>(rows * cols);
  // The epsilon absorbs products like 0.29 * 100 = 28.999999999999996.
  return static_cast<std::size_t>(std::floor(fraction * total + 1e-9));
}

GroundTruthPair inject_missing(const DataMatrix& complete, double fraction, std::uint64_t seed) {
  if (complete.has_missing()) throw DataError("inject_missing needs a complete matrix");
  const std::size_t n = complete.rows();
  const std::size_t p = complete.cols();
  const std::size_t count = injection_count(fraction, n, p);
  if (count < 1) {
    throw ParameterError("fraction " + std::to_string(fraction) + " masks no entry of a " +
                         std::to_string(n) + "x" + std::to_string(p) + " matrix");
  }
  if (n < kMinObservedPerColumn || count > n * p - kMinObservedPerColumn * p) {
    throw ParameterError("fraction " + std::to_string(fraction) +
                         " cannot leave every column with 2 observed entries");
  }

  Rng rng(seed);
  std::vector<std::size_t> slots(n * p);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, slots.size() - 1);
      std::swap(slots[i], slots[pick(rng)]);
    }
    std::vector<std::size_t> per_col(p, 0);
    for (std::size_t i = 0; i < count; ++i) ++per_col[slots[i] % p];
    const bool ok = std::all_of(per_col.begin(), per_col.end(),
                                [&](std::size_t m) { return n - m >= kMinObservedPerColumn; });
    if (!ok) continue;

    std::vector<Cell> cells;
    cells.reserve(count);
    Mask mask = Mask::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p), false);
    for (std::size_t i = 0; i < count; ++i) {
      const Cell cell{slots[i] / p, slots[i] % p};
      mask(static_cast<Eigen::Index>(cell.row), static_cast<Eigen::Index>(cell.col)) = true;
      cells.push_back(cell);
    }
    std::sort(cells.begin(), cells.end());
    DataMatrix observed(complete.values_or_nan(), std::move(mask), complete.col_names());
    return GroundTruthPair{complete, std::move(observed), std::move(cells)};
  }
  throw ComputeError("could not inject " + std::to_string(count) +
                     " missing entries while keeping 2 observed per column after " +
                     std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace mifo
