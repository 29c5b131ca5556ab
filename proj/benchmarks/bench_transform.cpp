#include <benchmark/benchmark.h>

#include <random>

#include "deepbarcode/deepbarcode.hpp"

using namespace deepbarcode;

namespace {

FeatureMatrix random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  std::vector<float> v(rows * cols);
  for (float& x : v) x = g(rng);
  return {rows, cols, std::move(v)};
}

void BM_Binarize(benchmark::State& state) {
  const auto m = random_features(1000, 4096, 1);
  const auto method = state.range(0) == 0 ? BinarizationMethod::MinMax
                                          : BinarizationMethod::ZeroThreshold;
  for (auto _ : state) {
    benchmark::DoNotOptimize(binarize_matrix(m, method, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.rows()));
}
BENCHMARK(BM_Binarize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PcaFit(benchmark::State& state) {
  const auto m = random_features(2000, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pca_fit(m, 50));
  }
}
BENCHMARK(BM_PcaFit)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_PcaTransform(benchmark::State& state) {
  const auto train = random_features(2000, 1024, 3);
  const auto model = pca_fit(train, 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pca_transform(model, train, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(train.rows()));
}
BENCHMARK(BM_PcaTransform)->Unit(benchmark::kMillisecond);

}  // namespace
