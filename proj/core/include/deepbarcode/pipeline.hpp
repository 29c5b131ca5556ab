#pragma once

/// Retrieval experiments as declarative configurations.
///
///   RealValued              nearest training row on full features
///   ReducedReal             PCA(n_pca) on train, nearest in the reduced space
///   BarcodeOnly             binarize, best Hamming match (top-1)
///   TwoStage                binarize, Hamming top-N, rerank on full features
///   ReducedBarcodeTwoStage  PCA(n_pca), min-max binarize the projections,
///                           Hamming top-N, L1 rerank on full features

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "deepbarcode/binarizer.hpp"
#include "deepbarcode/feature_store.hpp"
#include "deepbarcode/hamming_index.hpp"
#include "deepbarcode/realvalue_index.hpp"

namespace deepbarcode {

enum class SearchMode { RealValued, ReducedReal, BarcodeOnly, TwoStage, ReducedBarcodeTwoStage };

std::string_view to_string(SearchMode mode) noexcept;
/// Accepts "realvalued", "reducedreal", "barcode", "twostage", "reducedbarcode".
SearchMode parse_search_mode(std::string_view name);

struct SearchConfig {
  SearchMode mode = SearchMode::RealValued;
  DistanceMetric metric = DistanceMetric::L1;
  BinarizationMethod method = BinarizationMethod::MinMax;
  std::size_t n_candidates = 1;
  std::optional<std::size_t> n_pca;
};

[[nodiscard]] bool uses_reduction(SearchMode mode) noexcept;
[[nodiscard]] bool uses_barcodes(SearchMode mode) noexcept;
[[nodiscard]] bool is_two_stage(SearchMode mode) noexcept;

/// Throws a configuration error for inconsistent settings:
/// n_pca given iff the mode reduces; n_candidates >= 1 in two-stage modes;
/// ReducedBarcodeTwoStage only with min-max binarization and L1 rerank.
void validate(const SearchConfig& config);

struct QueryResult {
  std::optional<TopNResult> stage1;  // barcode modes only
  std::size_t final_index = 0;
  /// Rerank distance in two-stage modes, Hamming distance for BarcodeOnly,
  /// L1/L2 distance (in the reduced space for ReducedReal) otherwise.
  double final_distance = 0.0;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

/// One result per test row. Configuration and shape problems are reported
/// before any search work starts. Output does not depend on `threads`.
std::vector<QueryResult> run_search(const FeatureMatrix& train, const FeatureMatrix& test,
                                    const SearchConfig& config, unsigned threads = 0);

}  // namespace deepbarcode
