#include <benchmark/benchmark.h>

#include "mifo/forest.hpp"
#include "mifo/synthetic.hpp"

namespace {

void BM_FitForest(benchmark::State& state) {
  const auto data = mifo::generate_synthetic({100, 20, 3, 0.1, 1}).dense();
  const mifo::Matrix x = data.leftCols(19);
  const mifo::Vector y = data.col(19);
  mifo::ForestParams params;
  params.ntree = static_cast<std::size_t>(state.range(0));
  params.mtry = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mifo::fit_forest(x, y, params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitForest)
    ->ArgsProduct({{10, 50, 100, 250}, {1, 4, 16}})
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oN);

void BM_PredictForest(benchmark::State& state) {
  const auto data = mifo::generate_synthetic({200, 10, 3, 0.1, 2}).dense();
  const mifo::Matrix x = data.leftCols(9);
  const mifo::Vector y = data.col(9);
  mifo::ForestParams params;
  params.ntree = 100;
  const auto forest = mifo::fit_forest(x, y, params);
  for (auto _ : state) benchmark::DoNotOptimize(mifo::predict_forest(forest, x));
}
BENCHMARK(BM_PredictForest)->Unit(benchmark::kMicrosecond);

}  // namespace
