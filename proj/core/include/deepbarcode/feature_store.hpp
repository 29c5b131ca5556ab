#pragma once

/// In-memory and on-disk representation of feature matrices, barcode
/// matrices and label vectors.
///
/// On-disk formats (all integers little-endian):
///   feature file  "DFT1" | rows u32 | cols u32 | rows*cols float32, row-major
///   barcode file  "DBC1" | rows u32 | bits_per_row u32 | rows*ceil(bits/8) bytes
///   label file    one non-negative base-10 integer per line
///
/// Barcode bits are packed LSB-first: bit i of a row lives in byte i/8 at
/// position i%8. Unused trailing bits of each row's last byte are zero.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deepbarcode {

using ClassId = std::int64_t;

/// Dense row-major float32 matrix. rows >= 1, cols >= 2, all values finite.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  static FeatureMatrix from_rows(const std::vector<std::vector<float>>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }

  [[nodiscard]] std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  [[nodiscard]] float at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  [[nodiscard]] std::span<const float> values() const noexcept { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

/// Non-owning view of one packed bit string.
struct BitSpan {
  std::span<const std::uint8_t> bytes;
  std::size_t bits = 0;

  [[nodiscard]] bool operator[](std::size_t i) const noexcept {
    return ((bytes[i >> 3] >> (i & 7U)) & 1U) != 0;
  }
  [[nodiscard]] std::size_t size() const noexcept { return bits; }
};

[[nodiscard]] constexpr std::size_t packed_bytes(std::size_t bits) noexcept {
  return (bits + 7) / 8;
}

/// Owning packed bit string with the same layout as a barcode row.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t bits) : bytes_(packed_bytes(bits), 0), bits_(bits) {}

  /// Packs a sequence of 0/1 values (any nonzero counts as 1).
  static BitVector from_bits(std::span<const std::uint8_t> bits);

  void set(std::size_t i, bool value) noexcept {
    const auto mask = static_cast<std::uint8_t>(1U << (i & 7U));
    if (value) {
      bytes_[i >> 3] |= mask;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }
  }
  [[nodiscard]] bool operator[](std::size_t i) const noexcept { return view()[i]; }
  [[nodiscard]] std::size_t size() const noexcept { return bits_; }
  [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  [[nodiscard]] BitSpan view() const noexcept { return {bytes_, bits_}; }
  [[nodiscard]] std::vector<std::uint8_t> unpack() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

/// Unpacks a bit string to one 0/1 byte per bit.
std::vector<std::uint8_t> unpack_bits(BitSpan bits);

/// Bit-packed barcode rows. bits_per_row >= 1; pad bits are zero.
class BarcodeMatrix {
 public:
  BarcodeMatrix() = default;
  /// Validates payload length and pad bits.
  BarcodeMatrix(std::size_t rows, std::size_t bits_per_row, std::vector<std::uint8_t> packed);
  /// All-zero matrix of the given shape, to be filled with set_row.
  BarcodeMatrix(std::size_t rows, std::size_t bits_per_row);

  static BarcodeMatrix from_rows(const std::vector<BitVector>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t bits_per_row() const noexcept { return bits_per_row_; }
  [[nodiscard]] std::size_t bytes_per_row() const noexcept { return packed_bytes(bits_per_row_); }
  [[nodiscard]] BitSpan row(std::size_t r) const {
    return {std::span<const std::uint8_t>(packed_).subspan(r * bytes_per_row(), bytes_per_row()),
            bits_per_row_};
  }
  [[nodiscard]] std::span<const std::uint8_t> packed() const noexcept { return packed_; }

  void set_row(std::size_t r, const BitVector& bits);

  friend bool operator==(const BarcodeMatrix&, const BarcodeMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t bits_per_row_ = 0;
  std::vector<std::uint8_t> packed_;
};

/// Per-row class ids, aligned by index with a feature or barcode matrix.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<ClassId> labels);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }
  [[nodiscard]] ClassId operator[](std::size_t i) const { return labels_[i]; }
  [[nodiscard]] std::span<const ClassId> values() const noexcept { return labels_; }

  /// Throws a dimension error unless size() == rows.
  void check_aligned(std::size_t rows, std::string_view what) const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<ClassId> labels_;
};

// Serialization to and from in-memory byte buffers. The file functions
// below are thin wrappers around these.
std::vector<std::uint8_t> encode_features(const FeatureMatrix& m);
FeatureMatrix decode_features(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_barcodes(const BarcodeMatrix& b);
BarcodeMatrix decode_barcodes(std::span<const std::uint8_t> bytes);
std::string encode_labels(const LabelVector& labels);
LabelVector decode_labels(std::string_view text);

FeatureMatrix load_features(const std::filesystem::path& path);
void save_features(const FeatureMatrix& m, const std::filesystem::path& path);
BarcodeMatrix load_barcodes(const std::filesystem::path& path);
void save_barcodes(const BarcodeMatrix& b, const std::filesystem::path& path);
LabelVector load_labels(const std::filesystem::path& path);
void save_labels(const LabelVector& labels, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace deepbarcode
