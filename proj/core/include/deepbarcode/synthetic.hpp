#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "deepbarcode/feature_store.hpp"

namespace deepbarcode {

/// Identifies the sampling procedure; bump when generated bytes change.
inline constexpr std::string_view kSyntheticGenerator = "mt19937_64+marsaglia-polar/v1";

/// Labeled Gaussian clusters.
///
/// Every class is an isotropic Gaussian whose RMS distance from its mean is 1
/// (per-coordinate standard deviation 1/sqrt(dim)). Class means sit at
/// separation/sqrt(2) times an orthonormal set of directions, so every pair
/// of means is exactly `separation` apart. When classes > dim an orthonormal
/// set does not exist and the directions are independent random unit
/// vectors instead, which only approximates equal spacing.
struct SyntheticSpec {
  std::size_t classes = 24;
  std::size_t per_class = 50;       // training rows per class
  std::size_t test_per_class = 5;   // test rows per class
  std::size_t dim = 64;
  double separation = 10.0;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  FeatureMatrix train;
  LabelVector train_labels;
  FeatureMatrix test;
  LabelVector test_labels;
};

void validate(const SyntheticSpec& spec);

/// Rows are grouped by class (class 0 first). Deterministic given the spec.
SyntheticData generate(const SyntheticSpec& spec);

}  // namespace deepbarcode
