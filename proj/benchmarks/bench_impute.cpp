#include <benchmark/benchmark.h>

#include "mifo/baselines.hpp"
#include "mifo/impute.hpp"
#include "mifo/linalg.hpp"
#include "mifo/missing.hpp"
#include "mifo/synthetic.hpp"

namespace {

const mifo::DataMatrix& observed(double rate) {
  static const auto truth = mifo::generate_synthetic({100, 20, 3, 0.1, 42});
  static const auto m10 = mifo::inject_missing(truth, 0.1, 1).observed;
  static const auto m30 = mifo::inject_missing(truth, 0.3, 1).observed;
  return rate < 0.2 ? m10 : m30;
}

void BM_MifoImpute(benchmark::State& state) {
  const auto& m = observed(state.range(0) / 100.0);
  mifo::MifoParams params;
  params.forest.ntree = 50;
  for (auto _ : state) benchmark::DoNotOptimize(mifo::mifo_impute(m, params));
}
BENCHMARK(BM_MifoImpute)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_SvdImpute(benchmark::State& state) {
  const auto& m = observed(0.1);
  mifo::BaselineParams params;
  params.svd_rank = 3;
  for (auto _ : state) benchmark::DoNotOptimize(mifo::svd_impute(m, params));
}
BENCHMARK(BM_SvdImpute)->Unit(benchmark::kMillisecond);

void BM_SvtImpute(benchmark::State& state) {
  const auto& m = observed(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(mifo::svt_impute(m, {}));
}
BENCHMARK(BM_SvtImpute)->Unit(benchmark::kMillisecond);

void BM_KnnImpute(benchmark::State& state) {
  const auto& m = observed(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(mifo::knn_impute(m, 10));
}
BENCHMARK(BM_KnnImpute)->Unit(benchmark::kMillisecond);

void BM_SvdDecompose(benchmark::State& state) {
  const auto x = mifo::generate_synthetic({100, 20, 3, 0.1, 3}).dense();
  for (auto _ : state) benchmark::DoNotOptimize(mifo::svd_decompose(x, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SvdDecompose)->Arg(3)->Arg(20)->Unit(benchmark::kMicrosecond);

}  // namespace
