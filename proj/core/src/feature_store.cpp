#include "deepbarcode/feature_store.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <system_error>

#include "byte_io.hpp"
#include "deepbarcode/error.hpp"

namespace deepbarcode {

namespace {

constexpr std::string_view kFeatureMagic = "DFT1";
constexpr std::string_view kBarcodeMagic = "DBC1";

std::string cell(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + "," + std::to_string(c) + ")";
}

std::uint8_t pad_mask(std::size_t bits) {
  const std::size_t used = bits % 8;
  if (used == 0) {
    return 0;
  }
  return static_cast<std::uint8_t>(0xFFU << used);
}

std::uint32_t checked_u32(std::size_t v, std::string_view what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::Parameter, std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ < 1) {
    fail(ErrorKind::Dimension, "feature matrix needs at least one row");
  }
  if (cols_ < 2) {
    fail(ErrorKind::Dimension,
         "feature matrix needs at least 2 columns, got " + std::to_string(cols_));
  }
  if (values_.size() != rows_ * cols_) {
    fail(ErrorKind::Dimension, "feature matrix " + std::to_string(rows_) + "x" +
                                   std::to_string(cols_) + " given " +
                                   std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      fail(ErrorKind::Data, "non-finite value at " + cell(i / cols_, i % cols_));
    }
  }
}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<float>>& rows) {
  if (rows.empty()) {
    fail(ErrorKind::Dimension, "feature matrix needs at least one row");
  }
  const std::size_t cols = rows.front().size();
  std::vector<float> values;
  values.reserve(rows.size() * cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      fail(ErrorKind::Dimension, "row " + std::to_string(r) + " has " +
                                     std::to_string(rows[r].size()) + " values, expected " +
                                     std::to_string(cols));
    }
    values.insert(values.end(), rows[r].begin(), rows[r].end());
  }
  return {rows.size(), cols, std::move(values)};
}

BitVector BitVector::from_bits(std::span<const std::uint8_t> bits) {
  BitVector out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0) {
      out.set(i, true);
    }
  }
  return out;
}

std::vector<std::uint8_t> BitVector::unpack() const { return unpack_bits(view()); }

std::vector<std::uint8_t> unpack_bits(BitSpan bits) {
  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out[i] = bits[i] ? 1 : 0;
  }
  return out;
}

BarcodeMatrix::BarcodeMatrix(std::size_t rows, std::size_t bits_per_row,
                             std::vector<std::uint8_t> packed)
    : rows_(rows), bits_per_row_(bits_per_row), packed_(std::move(packed)) {
  if (bits_per_row_ < 1) {
    fail(ErrorKind::Format, "barcode rows need at least one bit");
  }
  const std::size_t stride = bytes_per_row();
  if (packed_.size() != rows_ * stride) {
    fail(ErrorKind::Truncation, "barcode payload is " + std::to_string(packed_.size()) +
                                    " bytes, expected " + std::to_string(rows_ * stride));
  }
  const std::uint8_t mask = pad_mask(bits_per_row_);
  if (mask != 0) {
    for (std::size_t r = 0; r < rows_; ++r) {
      if ((packed_[r * stride + stride - 1] & mask) != 0) {
        fail(ErrorKind::Format, "pad bit set in barcode row " + std::to_string(r));
      }
    }
  }
}

BarcodeMatrix::BarcodeMatrix(std::size_t rows, std::size_t bits_per_row)
    : BarcodeMatrix(rows, bits_per_row,
                    std::vector<std::uint8_t>(rows * packed_bytes(bits_per_row), 0)) {}

BarcodeMatrix BarcodeMatrix::from_rows(const std::vector<BitVector>& rows) {
  if (rows.empty()) {
    fail(ErrorKind::Dimension, "cannot infer barcode width from zero rows");
  }
  BarcodeMatrix out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.set_row(r, rows[r]);
  }
  return out;
}

void BarcodeMatrix::set_row(std::size_t r, const BitVector& bits) {
  if (r >= rows_) {
    fail(ErrorKind::Bounds, "barcode row " + std::to_string(r) + " out of range");
  }
  if (bits.size() != bits_per_row_) {
    fail(ErrorKind::Dimension, "barcode row has " + std::to_string(bits.size()) +
                                   " bits, matrix expects " + std::to_string(bits_per_row_));
  }
  const auto src = bits.bytes();
  std::copy(src.begin(), src.end(),
            packed_.begin() + static_cast<std::ptrdiff_t>(r * bytes_per_row()));
}

LabelVector::LabelVector(std::vector<ClassId> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0) {
      fail(ErrorKind::Domain, "negative class id " + std::to_string(labels_[i]) + " at row " +
                                  std::to_string(i));
    }
  }
}

void LabelVector::check_aligned(std::size_t rows, std::string_view what) const {
  if (labels_.size() != rows) {
    fail(ErrorKind::Dimension, std::string(what) + ": " + std::to_string(labels_.size()) +
                                   " labels for " + std::to_string(rows) + " rows");
  }
}

std::vector<std::uint8_t> encode_features(const FeatureMatrix& m) {
  detail::ByteWriter w;
  w.reserve(12 + m.values().size() * 4);
  w.magic(kFeatureMagic);
  w.u32(checked_u32(m.rows(), "row count"));
  w.u32(checked_u32(m.cols(), "column count"));
  for (float v : m.values()) {
    w.f32(v);
  }
  return w.take();
}

FeatureMatrix decode_features(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kFeatureMagic, "feature file");
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  if (rows < 1) {
    fail(ErrorKind::Format, "feature file declares zero rows");
  }
  if (cols < 2) {
    fail(ErrorKind::Format, "feature file declares " + std::to_string(cols) +
                                " columns, at least 2 required");
  }
  const std::size_t payload = r.remaining();
  if (payload % 4 != 0 || payload / 4 / cols != rows || (payload / 4) % cols != 0) {
    fail(ErrorKind::Truncation, "feature payload of " + std::to_string(payload) +
                                    " bytes does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " float32");
  }
  std::vector<float> values(rows * cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = r.f32();
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::Data, "non-finite value at " + cell(i / cols, i % cols));
    }
  }
  return {rows, cols, std::move(values)};
}

std::vector<std::uint8_t> encode_barcodes(const BarcodeMatrix& b) {
  detail::ByteWriter w;
  w.reserve(12 + b.packed().size());
  w.magic(kBarcodeMagic);
  w.u32(checked_u32(b.rows(), "row count"));
  w.u32(checked_u32(b.bits_per_row(), "bits per row"));
  w.bytes(b.packed());
  return w.take();
}

BarcodeMatrix decode_barcodes(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kBarcodeMagic, "barcode file");
  const std::size_t rows = r.u32();
  const std::size_t bits = r.u32();
  if (bits < 1) {
    fail(ErrorKind::Format, "barcode file declares zero bits per row");
  }
  const std::size_t stride = packed_bytes(bits);
  if (r.remaining() / stride != rows || r.remaining() % stride != 0) {
    fail(ErrorKind::Truncation, "barcode payload of " + std::to_string(r.remaining()) +
                                    " bytes does not match " + std::to_string(rows) + " rows of " +
                                    std::to_string(stride) + " bytes");
  }
  auto payload = r.bytes(rows * stride);
  return {rows, bits, std::vector<std::uint8_t>(payload.begin(), payload.end())};
}

std::string encode_labels(const LabelVector& labels) {
  std::string out;
  for (ClassId id : labels.values()) {
    out += std::to_string(id);
    out += '\n';
  }
  return out;
}

LabelVector decode_labels(std::string_view text) {
  std::vector<ClassId> labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    ClassId value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (line.empty() || ec != std::errc{} || ptr != line.data() + line.size()) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected an integer, got \"" +
                                 std::string(line) + "\"");
    }
    if (value < 0) {
      fail(ErrorKind::Domain, "line " + std::to_string(line_no) + ": negative class id " +
                                  std::to_string(value));
    }
    labels.push_back(value);
  }
  return LabelVector(std::move(labels));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::Io, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    fail(ErrorKind::Io, "read failed for " + path.string());
  }
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fail(ErrorKind::Io, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot rename into " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  return decode_features(read_file_bytes(path));
}

void save_features(const FeatureMatrix& m, const std::filesystem::path& path) {
  write_file_atomic(path, encode_features(m));
}

BarcodeMatrix load_barcodes(const std::filesystem::path& path) {
  return decode_barcodes(read_file_bytes(path));
}

void save_barcodes(const BarcodeMatrix& b, const std::filesystem::path& path) {
  write_file_atomic(path, encode_barcodes(b));
}

LabelVector load_labels(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_labels(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void save_labels(const LabelVector& labels, const std::filesystem::path& path) {
  write_file_atomic(path, encode_labels(labels));
}

}  // namespace deepbarcode
