#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "deepbarcode/feature_store.hpp"

namespace deepbarcode {

enum class DistanceMetric { L1, L2 };

std::string_view to_string(DistanceMetric metric) noexcept;
/// Accepts "l1" and "l2".
DistanceMetric parse_distance_metric(std::string_view name);

/// City-block or Euclidean distance, accumulated in double precision.
double vector_distance(std::span<const float> a, std::span<const float> b, DistanceMetric metric);

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Brute-force nearest corpus row to `query`, optionally restricted to
/// `candidates`. Ties go to the smaller corpus index regardless of the order
/// in which candidates are listed. The returned distance is the true L1/L2
/// value; L2 comparisons are done on squared sums.
Neighbor nearest(const FeatureMatrix& corpus, std::optional<std::span<const std::size_t>> candidates,
                 std::span<const float> query, DistanceMetric metric);

}  // namespace deepbarcode
