#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "deepbarcode/feature_store.hpp"

namespace deepbarcode {

/// popcount(a XOR b). Throws a dimension error on length mismatch.
std::size_t hamming_distance(BitSpan a, BitSpan b);

/// Top-N neighbours ordered by (distance, index) ascending.
struct TopNResult {
  std::vector<std::size_t> indices;
  std::vector<std::uint32_t> distances;

  [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
  friend bool operator==(const TopNResult&, const TopNResult&) = default;
};

/// Exhaustive Hamming search over an immutable barcode corpus.
///
/// Rows are copied into 64-bit words (zero padded) so each distance is a
/// run of XOR + popcount over whole words. Queries are read-only and safe to
/// issue concurrently.
class HammingIndex {
 public:
  /// Throws a parameter error for an empty corpus.
  explicit HammingIndex(const BarcodeMatrix& corpus);

  [[nodiscard]] std::size_t row_count() const noexcept { return rows_; }
  [[nodiscard]] std::size_t bits_per_row() const noexcept { return bits_; }

  /// Distance from the query to every corpus row, in corpus order.
  [[nodiscard]] std::vector<std::uint32_t> distances(BitSpan query) const;

  /// The min(n, row_count) nearest rows; ties broken by ascending row index.
  [[nodiscard]] TopNResult top_n(BitSpan query, std::size_t n) const;

  /// One TopNResult per query row. Output is independent of `threads`.
  [[nodiscard]] std::vector<TopNResult> top_n_batch(const BarcodeMatrix& queries, std::size_t n,
                                                    unsigned threads = 0) const;

 private:
  std::vector<std::uint64_t> to_words(BitSpan bits) const;
  void check_query(BitSpan query) const;

  std::size_t rows_ = 0;
  std::size_t bits_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

HammingIndex build_index(const BarcodeMatrix& corpus);

}  // namespace deepbarcode
