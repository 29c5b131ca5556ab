#pragma once

#include <span>
#include <string_view>

#include "deepbarcode/feature_store.hpp"

namespace deepbarcode {

enum class BinarizationMethod {
  MinMax,         // bit n = x[n] < x[n+1]; d-1 bits
  ZeroThreshold,  // bit n = x[n] > 0; d bits
};

std::string_view to_string(BinarizationMethod method) noexcept;
/// Accepts "minmax" and "zerothresh".
BinarizationMethod parse_binarization_method(std::string_view name);

/// Number of barcode bits produced for a row of `dim` features.
std::size_t barcode_bits(BinarizationMethod method, std::size_t dim) noexcept;

/// Consecutive-difference sign code. Equal neighbours give 0.
BitVector binarize_minmax(std::span<const float> row);

/// Strict positivity code. Exact zeros give 0.
BitVector binarize_zero_threshold(std::span<const float> row);

BitVector binarize_row(std::span<const float> row, BinarizationMethod method);

/// Binarizes every row. `threads` == 0 picks the hardware concurrency;
/// output does not depend on the thread count.
BarcodeMatrix binarize_matrix(const FeatureMatrix& m, BinarizationMethod method,
                              unsigned threads = 1);

}  // namespace deepbarcode
