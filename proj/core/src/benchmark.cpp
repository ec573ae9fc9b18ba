#include "mifo/benchmark.hpp"

#include <algorithm>
#include <chrono>

#include "mifo/error.hpp"
#include "mifo/metrics.hpp"
#include "mifo/missing.hpp"
#include "mifo/util.hpp"

namespace mifo {

namespace {

using Clock = std::chrono::steady_clock;

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

template <typename Get>
std::optional<double> median_over_seeds(const BenchmarkGrid& grid, std::string_view method, double rate,
                                        Get get) {
  std::vector<double> values;
  for (const auto& c : grid.cells) {
    if (c.method == method && c.rate == rate && c.ok()) {
      if (auto v = get(c)) values.push_back(*v);
    }
  }
  return median(std::move(values));
}

}  // namespace

const BenchmarkCell* BenchmarkGrid::find(std::string_view method, double rate, std::uint64_t seed) const {
  for (const auto& c : cells) {
    if (c.method == method && c.rate == rate && c.seed == seed) return &c;
  }
  return nullptr;
}

std::optional<double> BenchmarkGrid::median_nrmse(std::string_view method, double rate) const {
  return median_over_seeds(*this, method, rate, [](const BenchmarkCell& c) { return c.nrmse; });
}

std::optional<double> BenchmarkGrid::median_nmae(std::string_view method, double rate) const {
  return median_over_seeds(*this, method, rate, [](const BenchmarkCell& c) { return c.nmae; });
}

std::optional<double> BenchmarkGrid::median_seconds(std::string_view method, double rate) const {
  return median_over_seeds(*this, method, rate,
                           [](const BenchmarkCell& c) { return std::optional<double>(c.wall_seconds); });
}

BenchmarkGrid run_benchmark(const DataMatrix& truth, const BenchmarkConfig& config,
                            const MethodParams& params) {
  if (truth.has_missing()) throw DataError("benchmark ground truth must be complete");
  if (config.methods.empty() || config.rates.empty() || config.seeds.empty()) {
    throw ParameterError("benchmark needs at least one method, rate and seed");
  }
  for (double rate : config.rates) {
    if (injection_count(rate, truth.rows(), truth.cols()) < 1) {
      throw ParameterError("rate " + std::to_string(rate) + " masks no entry");
    }
  }

  const std::size_t n_methods = config.methods.size();
  const std::size_t n_rates = config.rates.size();
  const std::size_t n_seeds = config.seeds.size();
  BenchmarkGrid grid;
  for (auto m : config.methods) grid.methods.emplace_back(method_name(m));
  grid.rates = config.rates;
  grid.seeds = config.seeds;
  grid.cells.resize(n_methods * n_rates * n_seeds);
  auto slot = [&](std::size_t mi, std::size_t ri, std::size_t si) -> BenchmarkCell& {
    return grid.cells[(mi * n_rates + ri) * n_seeds + si];
  };

  const bool parallel_cells = !config.timing_strict && config.threads > 1;
  const std::size_t inner_threads = parallel_cells ? 1 : std::max<std::size_t>(1, config.threads);

  parallel_for(n_rates * n_seeds, parallel_cells ? config.threads : 1, [&](std::size_t job) {
    const std::size_t ri = job / n_seeds;
    const std::size_t si = job % n_seeds;
    const double rate = config.rates[ri];
    const std::uint64_t seed = config.seeds[si];
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      auto& cell = slot(mi, ri, si);
      cell.method = grid.methods[mi];
      cell.rate = rate;
      cell.seed = seed;
    }

    std::optional<GroundTruthPair> pair;
    try {
      pair.emplace(inject_missing(truth, rate, seed));
    } catch (const Error& e) {
      for (std::size_t mi = 0; mi < n_methods; ++mi) slot(mi, ri, si).error = e.what();
      return;
    }

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      auto& cell = slot(mi, ri, si);
      const Method method = config.methods[mi];
      MethodParams local = params;
      local.mifo.forest.threads = inner_threads;
      local.mifo.forest.seed = mix_seed(params.mifo.forest.seed, seed);
      if (config.on_observed) config.on_observed(method, rate, seed, pair->observed);
      try {
        const auto start = Clock::now();
        MethodOutcome outcome = run_method(method, pair->observed, local);
        cell.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        cell.converged = outcome.converged;
        cell.iterations = outcome.iterations;
        const auto report = evaluate(pair->truth, outcome.imputed, pair->injected);
        cell.nrmse = report.nrmse;
        cell.nmae = report.nmae_overall;
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.nrmse.reset();
        cell.nmae.reset();
      }
    }
  });
  return grid;
}

const SweepCell* SweepGrid::find(std::size_t mtry, std::size_t ntree) const {
  for (const auto& c : cells) {
    if (c.mtry == mtry && c.ntree == ntree) return &c;
  }
  return nullptr;
}

SweepGrid run_sweep(const DataMatrix& truth, const SweepConfig& config) {
  if (truth.has_missing()) throw DataError("sweep ground truth must be complete");
  if (truth.cols() < 2) throw DataError("sweep needs at least 2 columns");
  if (config.ntree_values.empty() || config.mtry_values.empty()) {
    throw ParameterError("sweep needs at least one ntree and one mtry value");
  }
  for (auto v : config.ntree_values) {
    if (v < 1) throw ParameterError("ntree values must be positive");
  }
  for (auto v : config.mtry_values) {
    if (v < 1) throw ParameterError("mtry values must be positive");
  }

  const auto pair = inject_missing(truth, config.rate, config.seed);
  const std::size_t max_mtry = truth.cols() - 1;
  SweepGrid grid;
  grid.ntree_values = config.ntree_values;
  grid.mtry_values = config.mtry_values;
  grid.rate = config.rate;
  for (auto mtry : config.mtry_values) {
    for (auto ntree : config.ntree_values) {
      SweepCell cell;
      cell.ntree = ntree;
      cell.mtry = mtry;
      cell.mtry_used = std::min(mtry, max_mtry);
      cell.clamped = mtry > max_mtry;
      MifoParams params = config.mifo;
      params.forest.ntree = ntree;
      params.forest.mtry = cell.mtry_used;
      try {
        const auto start = Clock::now();
        const auto result = mifo_impute(pair.observed, params);
        cell.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        cell.iterations = result.iterations_run;
        const auto report = evaluate(pair.truth, result.imputed, pair.injected);
        cell.nrmse_pct = 100.0 * report.nrmse;
        cell.nmae_pct = 100.0 * report.nmae_overall;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

}  // namespace mifo
