#include "deepbarcode/hamming_index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <queue>
#include <string>
#include <utility>

#include "deepbarcode/error.hpp"
#include "deepbarcode/parallel.hpp"

namespace deepbarcode {

namespace {

// Little-endian word load so byte i of a row lands in bits 8i..8i+7 on any host.
void load_words(std::span<const std::uint8_t> bytes, std::uint64_t* out, std::size_t words) {
  std::fill(out, out + words, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  }
}

inline std::uint32_t xor_popcount(const std::uint64_t* a, const std::uint64_t* b,
                                  std::size_t words) noexcept {
  std::uint32_t sum = 0;
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    sum += static_cast<std::uint32_t>(std::popcount(a[i] ^ b[i]) + std::popcount(a[i + 1] ^ b[i + 1]) +
                                      std::popcount(a[i + 2] ^ b[i + 2]) +
                                      std::popcount(a[i + 3] ^ b[i + 3]));
  }
  for (; i < words; ++i) {
    sum += static_cast<std::uint32_t>(std::popcount(a[i] ^ b[i]));
  }
  return sum;
}

}  // namespace

std::size_t hamming_distance(BitSpan a, BitSpan b) {
  if (a.bits != b.bits) {
    fail(ErrorKind::Dimension, "Hamming distance between " + std::to_string(a.bits) + " and " +
                                   std::to_string(b.bits) + " bits");
  }
  const std::size_t nbytes = packed_bytes(a.bits);
  std::size_t sum = 0;
  std::size_t i = 0;
  for (; i + 8 <= nbytes; i += 8) {
    std::uint64_t wa = 0;
    std::uint64_t wb = 0;
    std::memcpy(&wa, a.bytes.data() + i, 8);
    std::memcpy(&wb, b.bytes.data() + i, 8);
    sum += static_cast<std::size_t>(std::popcount(wa ^ wb));
  }
  for (; i < nbytes; ++i) {
    sum += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(a.bytes[i] ^ b.bytes[i])));
  }
  return sum;
}

HammingIndex::HammingIndex(const BarcodeMatrix& corpus)
    : rows_(corpus.rows()),
      bits_(corpus.bits_per_row()),
      words_per_row_((corpus.bits_per_row() + 63) / 64) {
  if (rows_ == 0) {
    fail(ErrorKind::Parameter, "cannot build a Hamming index over an empty corpus");
  }
  words_.resize(rows_ * words_per_row_);
  for (std::size_t r = 0; r < rows_; ++r) {
    load_words(corpus.row(r).bytes, words_.data() + r * words_per_row_, words_per_row_);
  }
}

void HammingIndex::check_query(BitSpan query) const {
  if (query.bits != bits_) {
    fail(ErrorKind::Dimension, "query has " + std::to_string(query.bits) +
                                   " bits, index rows have " + std::to_string(bits_));
  }
}

std::vector<std::uint64_t> HammingIndex::to_words(BitSpan bits) const {
  std::vector<std::uint64_t> q(words_per_row_);
  load_words(bits.bytes, q.data(), words_per_row_);
  return q;
}

std::vector<std::uint32_t> HammingIndex::distances(BitSpan query) const {
  check_query(query);
  const auto q = to_words(query);
  std::vector<std::uint32_t> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    out[r] = xor_popcount(q.data(), words_.data() + r * words_per_row_, words_per_row_);
  }
  return out;
}

TopNResult HammingIndex::top_n(BitSpan query, std::size_t n) const {
  check_query(query);
  if (n < 1) {
    fail(ErrorKind::Parameter, "top_n needs n >= 1");
  }
  const auto q = to_words(query);
  const std::size_t keep = std::min(n, rows_);

  // Max-heap on (distance, index): the top is the current worst kept candidate.
  using Entry = std::pair<std::uint32_t, std::size_t>;
  std::vector<Entry> heap;
  heap.reserve(keep);
  for (std::size_t r = 0; r < rows_; ++r) {
    const std::uint32_t dist =
        xor_popcount(q.data(), words_.data() + r * words_per_row_, words_per_row_);
    if (heap.size() < keep) {
      heap.emplace_back(dist, r);
      std::push_heap(heap.begin(), heap.end());
    } else if (dist < heap.front().first) {
      // Rows arrive in ascending index order, so an equal distance never beats the kept one.
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = {dist, r};
      std::push_heap(heap.begin(), heap.end());
    }
  }
  std::sort_heap(heap.begin(), heap.end());

  TopNResult result;
  result.indices.reserve(keep);
  result.distances.reserve(keep);
  for (const auto& [dist, idx] : heap) {
    result.indices.push_back(idx);
    result.distances.push_back(dist);
  }
  return result;
}

std::vector<TopNResult> HammingIndex::top_n_batch(const BarcodeMatrix& queries, std::size_t n,
                                                  unsigned threads) const {
  std::vector<TopNResult> out(queries.rows());
  parallel_for(queries.rows(), threads,
               [&](std::size_t i) { out[i] = top_n(queries.row(i), n); });
  return out;
}

HammingIndex build_index(const BarcodeMatrix& corpus) { return HammingIndex(corpus); }

}  // namespace deepbarcode
