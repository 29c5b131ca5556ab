#include "deepbarcode/binarizer.hpp"

#include <cmath>
#include <string>

#include "deepbarcode/error.hpp"
#include "deepbarcode/parallel.hpp"

namespace deepbarcode {

namespace {

void require_finite(std::span<const float> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i])) {
      fail(ErrorKind::Data, "non-finite value at column " + std::to_string(i));
    }
  }
}

}  // namespace

std::string_view to_string(BinarizationMethod method) noexcept {
  switch (method) {
    case BinarizationMethod::MinMax: return "minmax";
    case BinarizationMethod::ZeroThreshold: return "zerothresh";
  }
  return "unknown";
}

BinarizationMethod parse_binarization_method(std::string_view name) {
  if (name == "minmax") {
    return BinarizationMethod::MinMax;
  }
  if (name == "zerothresh") {
    return BinarizationMethod::ZeroThreshold;
  }
  fail(ErrorKind::Usage, "unknown binarization method \"" + std::string(name) +
                             "\" (expected minmax or zerothresh)");
}

std::size_t barcode_bits(BinarizationMethod method, std::size_t dim) noexcept {
  if (method == BinarizationMethod::MinMax) {
    return dim == 0 ? 0 : dim - 1;
  }
  return dim;
}

BitVector binarize_minmax(std::span<const float> row) {
  if (row.size() < 2) {
    fail(ErrorKind::Dimension, "min-max binarization needs at least 2 values, got " +
                                   std::to_string(row.size()));
  }
  require_finite(row);
  BitVector bits(row.size() - 1);
  for (std::size_t n = 0; n + 1 < row.size(); ++n) {
    if (row[n] < row[n + 1]) {
      bits.set(n, true);
    }
  }
  return bits;
}

BitVector binarize_zero_threshold(std::span<const float> row) {
  if (row.empty()) {
    fail(ErrorKind::Dimension, "zero-threshold binarization needs at least 1 value");
  }
  require_finite(row);
  BitVector bits(row.size());
  for (std::size_t n = 0; n < row.size(); ++n) {
    if (0.0F < row[n]) {
      bits.set(n, true);
    }
  }
  return bits;
}

BitVector binarize_row(std::span<const float> row, BinarizationMethod method) {
  return method == BinarizationMethod::MinMax ? binarize_minmax(row)
                                              : binarize_zero_threshold(row);
}

BarcodeMatrix binarize_matrix(const FeatureMatrix& m, BinarizationMethod method,
                              unsigned threads) {
  BarcodeMatrix out(m.rows(), barcode_bits(method, m.cols()));
  parallel_for(m.rows(), threads, [&](std::size_t r) {
    try {
      out.set_row(r, binarize_row(m.row(r), method));
    } catch (const Error& e) {
      throw Error(e.kind(), "row " + std::to_string(r) + ": " + e.detail());
    }
  });
  return out;
}

}  // namespace deepbarcode
