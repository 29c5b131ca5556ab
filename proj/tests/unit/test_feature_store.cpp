#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "deepbarcode/error.hpp"
#include "deepbarcode/feature_store.hpp"
#include "oracles.hpp"

using namespace deepbarcode;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Usage;
}

std::vector<std::uint8_t> feature_file(std::uint32_t rows, std::uint32_t cols,
                                       const std::vector<float>& values) {
  std::vector<std::uint8_t> out{'D', 'F', 'T', '1'};
  for (std::uint32_t v : {rows, cols}) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  }
  for (float f : values) {
    const auto u = std::bit_cast<std::uint32_t>(f);
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(u >> s));
  }
  return out;
}

}  // namespace

TEST(FeatureStore, DecodesHeaderAndPayload) {
  const auto m = decode_features(feature_file(2, 3, {1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(m.rows(), 2U);
  EXPECT_EQ(m.cols(), 3U);
  EXPECT_EQ(m.at(0, 0), 1.0F);
  EXPECT_EQ(m.at(1, 2), 6.0F);
}

TEST(FeatureStore, EncodedSizeIsHeaderPlusPayload) {
  const auto m = FeatureMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const auto bytes = encode_features(m);
  EXPECT_EQ(bytes.size(), 12U + 24U);
  EXPECT_EQ(bytes, feature_file(2, 3, {1, 2, 3, 4, 5, 6}));
}

TEST(FeatureStore, RejectsSingleColumn) {
  EXPECT_EQ(kind_of([] { decode_features(feature_file(1, 1, {1})); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([] { FeatureMatrix(1, 1, {1.0F}); }), ErrorKind::Dimension);
}

TEST(FeatureStore, RejectsBadMagic) {
  auto bytes = feature_file(1, 2, {1, 2});
  bytes[3] = '2';
  EXPECT_EQ(kind_of([&] { decode_features(bytes); }), ErrorKind::Format);
}

TEST(FeatureStore, RejectsTruncatedAndOverlongPayload) {
  auto bytes = feature_file(2, 3, {1, 2, 3, 4, 5, 6});
  bytes.pop_back();
  EXPECT_EQ(kind_of([&] { decode_features(bytes); }), ErrorKind::Truncation);
  auto longer = feature_file(2, 3, {1, 2, 3, 4, 5, 6, 7});
  EXPECT_EQ(kind_of([&] { decode_features(longer); }), ErrorKind::Truncation);
  std::vector<std::uint8_t> header_only{'D', 'F', 'T', '1', 2, 0};
  EXPECT_EQ(kind_of([&] { decode_features(header_only); }), ErrorKind::Truncation);
}

TEST(FeatureStore, NonFiniteValueNamesRowAndColumn) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  try {
    decode_features(feature_file(1, 3, {1, 2, nan}));
    FAIL() << "NaN accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
    EXPECT_NE(std::string(e.what()).find("(0,2)"), std::string::npos) << e.what();
  }
  const float inf = std::numeric_limits<float>::infinity();
  EXPECT_EQ(kind_of([&] { decode_features(feature_file(2, 2, {1, 2, -inf, 0})); }),
            ErrorKind::Data);
}

TEST(FeatureStore, FileRoundTripIsBitExact) {
  const auto dir = oracle::scratch_dir("fs");
  const auto m = FeatureMatrix::from_rows({{0.1F, -0.0F, 3.5e-38F}, {1e30F, 7.0F, -2.25F}});
  save_features(m, dir / "m.dft");
  const auto back = load_features(dir / "m.dft");
  ASSERT_EQ(back.values().size(), m.values().size());
  for (std::size_t i = 0; i < m.values().size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values()[i]),
              std::bit_cast<std::uint32_t>(m.values()[i]));
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "m.dft.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(FeatureStore, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { load_features("/nonexistent/dir/x.dft"); }), ErrorKind::Io);
}

TEST(FeatureStore, SaveToUnwritableLocationIsIoError) {
  const auto m = FeatureMatrix::from_rows({{1, 2}});
  EXPECT_EQ(kind_of([&] { save_features(m, "/nonexistent/dir/x.dft"); }), ErrorKind::Io);
}

TEST(Labels, ParsesOnePerLine) {
  EXPECT_EQ(decode_labels("0\n5\n23\n"), LabelVector({0, 5, 23}));
  EXPECT_EQ(decode_labels("4\r\n2"), LabelVector({4, 2}));
  EXPECT_EQ(decode_labels("").size(), 0U);
}

TEST(Labels, NonIntegerIsParseErrorWithLine) {
  try {
    decode_labels("x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  try {
    decode_labels("1\n2\n3.5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { decode_labels("1\n\n2\n"); }), ErrorKind::Parse);
}

TEST(Labels, NegativeIsDomainError) {
  EXPECT_EQ(kind_of([] { decode_labels("-1\n"); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { LabelVector({3, -2}); }), ErrorKind::Domain);
}

TEST(Labels, AlignmentCheck) {
  const LabelVector labels({1, 2});
  EXPECT_NO_THROW(labels.check_aligned(2, "train"));
  EXPECT_EQ(kind_of([&] { labels.check_aligned(3, "train"); }), ErrorKind::Dimension);
}

TEST(Barcodes, PacksLsbFirst) {
  const std::vector<std::uint8_t> bits{1, 0, 1};
  const auto b = BarcodeMatrix::from_rows({BitVector::from_bits(bits)});
  ASSERT_EQ(b.packed().size(), 1U);
  EXPECT_EQ(b.packed()[0], 0b00000101);
  const auto bytes = encode_barcodes(b);
  EXPECT_EQ(bytes.size(), 12U + 1U);
  EXPECT_EQ(bytes.back(), 0b00000101);
}

TEST(Barcodes, PadBitSetIsFormatError) {
  std::vector<std::uint8_t> bytes{'D', 'B', 'C', '1', 1, 0, 0, 0, 3, 0, 0, 0, 0b10000101};
  EXPECT_EQ(kind_of([&] { decode_barcodes(bytes); }), ErrorKind::Format);
  bytes.back() = 0b00000101;
  EXPECT_EQ(decode_barcodes(bytes).row(0)[2], true);
}

TEST(Barcodes, ZeroWidthAndShortPayloadRejected) {
  std::vector<std::uint8_t> zero_bits{'D', 'B', 'C', '1', 1, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(kind_of([&] { decode_barcodes(zero_bits); }), ErrorKind::Format);
  std::vector<std::uint8_t> short_payload{'D', 'B', 'C', '1', 2, 0, 0, 0, 9, 0, 0, 0, 1, 0, 1};
  EXPECT_EQ(kind_of([&] { decode_barcodes(short_payload); }), ErrorKind::Truncation);
}

TEST(Barcodes, RoundTrip2x4095) {
  std::mt19937_64 rng(7);
  std::vector<BitVector> rows;
  for (int r = 0; r < 2; ++r) rows.push_back(BitVector::from_bits(oracle::random_bits(rng, 4095)));
  const auto b = BarcodeMatrix::from_rows(rows);
  const auto dir = oracle::scratch_dir("bc");
  save_barcodes(b, dir / "b.dbc");
  EXPECT_EQ(read_file_bytes(dir / "b.dbc"), encode_barcodes(b));
  EXPECT_EQ(load_barcodes(dir / "b.dbc"), b);
  std::filesystem::remove_all(dir);
}

TEST(Barcodes, PackUnpackProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto bits = oracle::random_bits(rng, 1 + rng() % 300);
    const auto packed = BitVector::from_bits(bits);
    EXPECT_EQ(packed.unpack(), bits);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      ASSERT_EQ(((packed.bytes()[i / 8] >> (i % 8)) & 1U) != 0, bits[i] != 0);
    }
    const std::size_t used = bits.size() % 8;
    if (used != 0) {
      EXPECT_EQ(packed.bytes().back() >> used, 0);
    }
  }
}

TEST(Barcodes, SetRowValidatesShape) {
  BarcodeMatrix b(2, 5);
  EXPECT_EQ(kind_of([&] { b.set_row(0, BitVector(4)); }), ErrorKind::Dimension);
  EXPECT_EQ(kind_of([&] { b.set_row(2, BitVector(5)); }), ErrorKind::Bounds);
}
