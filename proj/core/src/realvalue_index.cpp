#include "deepbarcode/realvalue_index.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "deepbarcode/error.hpp"

namespace deepbarcode {

namespace {

// L1 sum or squared-L2 sum; monotone in the true distance.
double raw_distance(std::span<const float> a, std::span<const float> b,
                    DistanceMetric metric) noexcept {
  double acc = 0.0;
  if (metric == DistanceMetric::L1) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    }
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      acc += diff * diff;
    }
  }
  return acc;
}

double finish(double raw, DistanceMetric metric) noexcept {
  return metric == DistanceMetric::L2 ? std::sqrt(raw) : raw;
}

}  // namespace

std::string_view to_string(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::L1 ? "l1" : "l2";
}

DistanceMetric parse_distance_metric(std::string_view name) {
  if (name == "l1") {
    return DistanceMetric::L1;
  }
  if (name == "l2") {
    return DistanceMetric::L2;
  }
  fail(ErrorKind::Usage, "unknown metric \"" + std::string(name) + "\" (expected l1 or l2)");
}

double vector_distance(std::span<const float> a, std::span<const float> b,
                       DistanceMetric metric) {
  if (a.size() != b.size()) {
    fail(ErrorKind::Dimension, "distance between vectors of length " + std::to_string(a.size()) +
                                   " and " + std::to_string(b.size()));
  }
  return finish(raw_distance(a, b, metric), metric);
}

Neighbor nearest(const FeatureMatrix& corpus,
                 std::optional<std::span<const std::size_t>> candidates,
                 std::span<const float> query, DistanceMetric metric) {
  if (query.size() != corpus.cols()) {
    fail(ErrorKind::Dimension, "query has " + std::to_string(query.size()) +
                                   " values, corpus rows have " + std::to_string(corpus.cols()));
  }
  std::size_t best_index = std::numeric_limits<std::size_t>::max();
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](std::size_t r) {
    const double d = raw_distance(corpus.row(r), query, metric);
    if (d < best || (d == best && r < best_index)) {
      best = d;
      best_index = r;
    }
  };

  if (candidates) {
    if (candidates->empty()) {
      fail(ErrorKind::Parameter, "empty candidate set");
    }
    for (std::size_t r : *candidates) {
      if (r >= corpus.rows()) {
        fail(ErrorKind::Bounds, "candidate index " + std::to_string(r) + " out of range for " +
                                    std::to_string(corpus.rows()) + " rows");
      }
    }
    for (std::size_t r : *candidates) {
      consider(r);
    }
  } else {
    if (corpus.empty()) {
      fail(ErrorKind::Parameter, "empty corpus");
    }
    for (std::size_t r = 0; r < corpus.rows(); ++r) {
      consider(r);
    }
  }
  return {best_index, finish(best, metric)};
}

}  // namespace deepbarcode
