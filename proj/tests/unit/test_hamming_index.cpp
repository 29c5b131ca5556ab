#include <gtest/gtest.h>

#include <random>

#include "deepbarcode/error.hpp"
#include "deepbarcode/hamming_index.hpp"
#include "oracles.hpp"

using namespace deepbarcode;

namespace {

BarcodeMatrix corpus_of(const std::vector<oracle::Bits>& rows) {
  std::vector<BitVector> packed;
  for (const auto& r : rows) packed.push_back(BitVector::from_bits(r));
  return BarcodeMatrix::from_rows(packed);
}

BitVector bits(const oracle::Bits& b) { return BitVector::from_bits(b); }

}  // namespace

TEST(HammingDistance, CountsDifferingPositions) {
  EXPECT_EQ(hamming_distance(bits({1, 0, 1, 1}).view(), bits({1, 1, 1, 0}).view()), 2U);
}

TEST(HammingDistance, IdentityAndComplement) {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_bits(rng, 4095);
  oracle::Bits comp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) comp[i] = x[i] ? 0 : 1;
  EXPECT_EQ(hamming_distance(bits(x).view(), bits(x).view()), 0U);
  EXPECT_EQ(hamming_distance(bits(x).view(), bits(comp).view()), 4095U);
}

TEST(HammingDistance, LengthMismatch) {
  try {
    hamming_distance(BitVector(8).view(), BitVector(9).view());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(HammingDistance, MatchesOracleAcrossWidths) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n < 200; ++n) {
    const auto a = oracle::random_bits(rng, n);
    const auto b = oracle::random_bits(rng, n);
    ASSERT_EQ(hamming_distance(bits(a).view(), bits(b).view()), oracle::hamming(a, b)) << n;
  }
}

TEST(HammingIndex, EmptyCorpusIsRejected) {
  EXPECT_THROW(build_index(BarcodeMatrix(0, 16)), Error);
}

TEST(HammingIndex, SingletonAlwaysReturned) {
  const auto index = build_index(corpus_of({{1, 0, 1}}));
  EXPECT_EQ(index.row_count(), 1U);
  const auto r = index.top_n(bits({0, 1, 0}).view(), 5);
  EXPECT_EQ(r.indices, std::vector<std::size_t>{0});
  EXPECT_EQ(r.distances, std::vector<std::uint32_t>{3});
}

TEST(HammingIndex, DuplicatesKeepDistinctIndices) {
  const auto index = build_index(corpus_of({{1, 1}, {0, 0}, {1, 1}}));
  const auto r = index.top_n(bits({1, 1}).view(), 2);
  EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(r.distances, (std::vector<std::uint32_t>{0, 0}));
}

TEST(HammingIndex, HandCountedTopN) {
  const auto index = build_index(corpus_of({{0, 0}, {1, 1}, {1, 0}}));
  const auto a = index.top_n(bits({1, 1}).view(), 2);
  EXPECT_EQ(a.indices, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(a.distances, (std::vector<std::uint32_t>{0, 1}));
  const auto b = index.top_n(bits({0, 1}).view(), 3);
  EXPECT_EQ(b.indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(b.distances, (std::vector<std::uint32_t>{1, 1, 2}));
}

TEST(HammingIndex, QueryValidation) {
  const auto index = build_index(corpus_of({{0, 0, 1}}));
  EXPECT_THROW(index.top_n(BitVector(2).view(), 1), Error);
  EXPECT_THROW(index.top_n(BitVector(3).view(), 0), Error);
}

TEST(HammingIndex, MatchesFullSortOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t width = 1 + rng() % 128;
    const std::size_t rows = 1 + rng() % 500;
    std::vector<oracle::Bits> corpus;
    // Low-entropy rows so that distance ties are common.
    for (std::size_t r = 0; r < rows; ++r) {
      auto b = oracle::random_bits(rng, width);
      if (r % 3 == 0) std::fill(b.begin() + static_cast<std::ptrdiff_t>(width / 2), b.end(), 0);
      corpus.push_back(std::move(b));
    }
    const auto index = build_index(corpus_of(corpus));
    const auto query = oracle::random_bits(rng, width);
    for (std::size_t n : {std::size_t{1}, std::size_t{7}, rows / 2 + 1, rows, rows + 10}) {
      const auto got = index.top_n(bits(query).view(), n);
      const auto want = oracle::full_sort_top_n(corpus, query, n);
      ASSERT_EQ(got.indices, want.indices) << "trial " << trial << " n " << n;
      ASSERT_EQ(got.distances, want.distances);
    }
  }
}

TEST(HammingIndexProperty, TopNIsPrefixOfTopNPlusOne) {
  std::mt19937_64 rng(4);
  std::vector<oracle::Bits> corpus;
  for (int r = 0; r < 120; ++r) corpus.push_back(oracle::random_bits(rng, 12));
  const auto index = build_index(corpus_of(corpus));
  const auto q = bits(oracle::random_bits(rng, 12));
  auto prev = index.top_n(q.view(), 1);
  for (std::size_t n = 2; n <= 125; ++n) {
    const auto cur = index.top_n(q.view(), n);
    ASSERT_TRUE(std::equal(prev.indices.begin(), prev.indices.end(), cur.indices.begin()));
    for (std::size_t i = 1; i < cur.size(); ++i) {
      ASSERT_LE(cur.distances[i - 1], cur.distances[i]);
      if (cur.distances[i - 1] == cur.distances[i]) {
        ASSERT_LT(cur.indices[i - 1], cur.indices[i]);
      }
    }
    prev = cur;
  }
  EXPECT_EQ(prev.size(), 120U);
}

TEST(HammingIndex, DistancesMatchPairwise) {
  std::mt19937_64 rng(5);
  std::vector<oracle::Bits> corpus;
  for (int r = 0; r < 50; ++r) corpus.push_back(oracle::random_bits(rng, 200));
  const auto index = build_index(corpus_of(corpus));
  const auto q = oracle::random_bits(rng, 200);
  const auto d = index.distances(bits(q).view());
  for (std::size_t r = 0; r < corpus.size(); ++r) EXPECT_EQ(d[r], oracle::hamming(corpus[r], q));
}

TEST(HammingIndex, BatchMatchesSingleQueriesForAnyThreadCount) {
  std::mt19937_64 rng(6);
  std::vector<oracle::Bits> corpus, queries;
  for (int r = 0; r < 300; ++r) corpus.push_back(oracle::random_bits(rng, 70));
  for (int r = 0; r < 33; ++r) queries.push_back(oracle::random_bits(rng, 70));
  const auto index = build_index(corpus_of(corpus));
  const auto qm = corpus_of(queries);
  const auto serial = index.top_n_batch(qm, 9, 1);
  EXPECT_EQ(index.top_n_batch(qm, 9, 4), serial);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    EXPECT_EQ(serial[i], index.top_n(qm.row(i), 9));
  }
}
