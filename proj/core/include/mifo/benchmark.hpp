#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mifo/impute.hpp"
#include "mifo/matrix.hpp"
#include "mifo/methods.hpp"

namespace mifo {

struct BenchmarkConfig {
  std::vector<Method> methods = {kAllMethods.begin(), kAllMethods.end()};
  std::vector<double> rates = {0.10, 0.20, 0.30};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t threads = 1;
  /// Run every imputation alone (no cell-level parallelism) so timings are clean.
  bool timing_strict = false;
  /// Observer invoked with the exact matrix handed to each method. May be
  /// called from several threads when cells run in parallel.
  std::function<void(Method, double rate, std::uint64_t seed, const DataMatrix& observed)> on_observed;
};

struct BenchmarkCell {
  std::string method;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> nrmse;
  std::optional<double> nmae;
  double wall_seconds = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Non-empty when the method failed; the metrics are then absent.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct BenchmarkGrid {
  std::vector<std::string> methods;
  std::vector<double> rates;
  std::vector<std::uint64_t> seeds;
  /// Ordered by method, then rate, then seed.
  std::vector<BenchmarkCell> cells;

  const BenchmarkCell* find(std::string_view method, double rate, std::uint64_t seed) const;
  /// Median over seeds of the successful cells; empty if none succeeded.
  std::optional<double> median_nrmse(std::string_view method, double rate) const;
  std::optional<double> median_nmae(std::string_view method, double rate) const;
  std::optional<double> median_seconds(std::string_view method, double rate) const;
};

/// For every (rate, seed) the complete matrix is masked once and each method
/// imputes that same observed matrix. Timing covers the imputation call only.
/// Method failures are recorded in their cell; only invalid configuration
/// throws. The mifo forest seed is remixed with the cell seed.
BenchmarkGrid run_benchmark(const DataMatrix& truth, const BenchmarkConfig& config,
                            const MethodParams& params);

struct SweepConfig {
  std::vector<std::size_t> ntree_values = {10, 50, 100, 250, 500};
  std::vector<std::size_t> mtry_values = {1, 2, 4, 8, 16};
  double rate = 0.10;
  std::uint64_t seed = 42;
  /// Base settings; ntree and mtry are overwritten per cell.
  MifoParams mifo;
};

struct SweepCell {
  std::size_t ntree = 0;
  std::size_t mtry = 0;
  std::size_t mtry_used = 0;
  /// mtry exceeded p - 1 and was lowered to it.
  bool clamped = false;
  std::optional<double> nrmse_pct;
  std::optional<double> nmae_pct;
  double wall_seconds = 0.0;
  std::size_t iterations = 0;
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct SweepGrid {
  std::vector<std::size_t> ntree_values;
  std::vector<std::size_t> mtry_values;
  double rate = 0.10;
  /// Ordered by mtry, then ntree.
  std::vector<SweepCell> cells;

  const SweepCell* find(std::size_t mtry, std::size_t ntree) const;
};

/// ntree x mtry grid of mifo runs on one fixed injection of `rate`.
SweepGrid run_sweep(const DataMatrix& truth, const SweepConfig& config);

}  // namespace mifo
