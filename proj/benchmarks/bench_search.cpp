#include <benchmark/benchmark.h>

#include <random>

#include "deepbarcode/deepbarcode.hpp"

using namespace deepbarcode;

namespace {

BarcodeMatrix random_barcodes(std::size_t rows, std::size_t bits, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t bytes = packed_bytes(bits);
  std::vector<std::uint8_t> packed(rows * bytes);
  for (auto& b : packed) b = static_cast<std::uint8_t>(rng());
  const auto pad_mask = static_cast<std::uint8_t>(bits % 8 == 0 ? 0xFF : (1U << (bits % 8)) - 1);
  for (std::size_t r = 0; r < rows; ++r) packed[r * bytes + bytes - 1] &= pad_mask;
  return {rows, bits, std::move(packed)};
}

FeatureMatrix random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  std::vector<float> v(rows * cols);
  for (float& x : v) x = g(rng);
  return {rows, cols, std::move(v)};
}

// Corpus shaped like the 27,055-image training set with 4096-d features.
const BarcodeMatrix& corpus() {
  static const auto c = random_barcodes(27055, 4095, 1);
  return c;
}

void BM_HammingTopN(benchmark::State& state) {
  const HammingIndex index(corpus());
  const auto queries = random_barcodes(64, 4095, 2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.top_n(queries.row(q++ % queries.rows()), n));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().rows()));
}
BENCHMARK(BM_HammingTopN)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_HammingBatch(benchmark::State& state) {
  const HammingIndex index(corpus());
  const auto queries = random_barcodes(64, 4095, 3);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.top_n_batch(queries, 10, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.rows()));
}
BENCHMARK(BM_HammingBatch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_NearestFullScan(benchmark::State& state) {
  static const auto train = random_features(27055, 4096, 4);
  const auto query = random_features(1, 4096, 5);
  const auto metric = state.range(0) == 1 ? DistanceMetric::L1 : DistanceMetric::L2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nearest(train, std::nullopt, query.row(0), metric));
  }
}
BENCHMARK(BM_NearestFullScan)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_NearestCandidates(benchmark::State& state) {
  static const auto train = random_features(27055, 4096, 4);
  const auto query = random_features(1, 4096, 6);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) {
    candidates.push_back(i * 97 % train.rows());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nearest(train, candidates, query.row(0), DistanceMetric::L1));
  }
}
BENCHMARK(BM_NearestCandidates)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace
