#include "deepbarcode/pipeline.hpp"

#include <string>

#include "deepbarcode/error.hpp"
#include "deepbarcode/parallel.hpp"
#include "deepbarcode/pca.hpp"

namespace deepbarcode {

std::string_view to_string(SearchMode mode) noexcept {
  switch (mode) {
    case SearchMode::RealValued: return "realvalued";
    case SearchMode::ReducedReal: return "reducedreal";
    case SearchMode::BarcodeOnly: return "barcode";
    case SearchMode::TwoStage: return "twostage";
    case SearchMode::ReducedBarcodeTwoStage: return "reducedbarcode";
  }
  return "unknown";
}

SearchMode parse_search_mode(std::string_view name) {
  for (auto mode : {SearchMode::RealValued, SearchMode::ReducedReal, SearchMode::BarcodeOnly,
                    SearchMode::TwoStage, SearchMode::ReducedBarcodeTwoStage}) {
    if (name == to_string(mode)) {
      return mode;
    }
  }
  fail(ErrorKind::Usage, "unknown search mode \"" + std::string(name) + "\"");
}

bool uses_reduction(SearchMode mode) noexcept {
  return mode == SearchMode::ReducedReal || mode == SearchMode::ReducedBarcodeTwoStage;
}

bool uses_barcodes(SearchMode mode) noexcept {
  return mode == SearchMode::BarcodeOnly || is_two_stage(mode);
}

bool is_two_stage(SearchMode mode) noexcept {
  return mode == SearchMode::TwoStage || mode == SearchMode::ReducedBarcodeTwoStage;
}

void validate(const SearchConfig& config) {
  const std::string mode(to_string(config.mode));
  if (uses_reduction(config.mode)) {
    if (!config.n_pca) {
      fail(ErrorKind::Config, "mode " + mode + " needs n_pca");
    }
    if (*config.n_pca < 1) {
      fail(ErrorKind::Config, "n_pca must be at least 1");
    }
  } else if (config.n_pca) {
    fail(ErrorKind::Config, "n_pca is only meaningful for reduced modes, not " + mode);
  }
  if (is_two_stage(config.mode) && config.n_candidates < 1) {
    fail(ErrorKind::Config, "n_candidates must be at least 1 in mode " + mode);
  }
  if (config.mode == SearchMode::ReducedBarcodeTwoStage) {
    if (config.method != BinarizationMethod::MinMax) {
      fail(ErrorKind::Config, "reduced barcodes are defined for min-max binarization only");
    }
    if (config.metric != DistanceMetric::L1) {
      fail(ErrorKind::Config, "reduced-barcode search reranks with L1 only");
    }
  }
  if (config.mode == SearchMode::ReducedReal && config.n_pca && *config.n_pca < 2) {
    fail(ErrorKind::Config, "reduced real-valued search needs n_pca >= 2");
  }
  if (config.mode == SearchMode::ReducedBarcodeTwoStage && config.n_pca && *config.n_pca < 2) {
    fail(ErrorKind::Config, "min-max binarization of reduced features needs n_pca >= 2");
  }
}

namespace {

void check_shapes(const FeatureMatrix& train, const FeatureMatrix& test,
                  const SearchConfig& config) {
  if (train.empty() || test.empty()) {
    fail(ErrorKind::Dimension, "train and test sets must be non-empty");
  }
  if (train.cols() != test.cols()) {
    fail(ErrorKind::Dimension, "train has " + std::to_string(train.cols()) +
                                   " columns, test has " + std::to_string(test.cols()));
  }
  if (config.n_pca && *config.n_pca > std::min(train.rows(), train.cols())) {
    fail(ErrorKind::Config, "n_pca=" + std::to_string(*config.n_pca) + " exceeds min(rows, cols)=" +
                                std::to_string(std::min(train.rows(), train.cols())) +
                                " of the training set");
  }
}

std::vector<QueryResult> single_stage(const FeatureMatrix& train, const FeatureMatrix& test,
                                      DistanceMetric metric, unsigned threads) {
  std::vector<QueryResult> out(test.rows());
  parallel_for(test.rows(), threads, [&](std::size_t q) {
    const Neighbor best = nearest(train, std::nullopt, test.row(q), metric);
    out[q].final_index = best.index;
    out[q].final_distance = best.distance;
  });
  return out;
}

// Stage 1 on barcodes; stage 2 (when rerank_metric is set) on `rerank_train`.
std::vector<QueryResult> barcode_search(const BarcodeMatrix& train_codes,
                                        const BarcodeMatrix& test_codes, std::size_t n,
                                        const FeatureMatrix* rerank_train,
                                        const FeatureMatrix* rerank_test,
                                        DistanceMetric rerank_metric, unsigned threads) {
  const HammingIndex index(train_codes);
  std::vector<QueryResult> out(test_codes.rows());
  parallel_for(test_codes.rows(), threads, [&](std::size_t q) {
    TopNResult top = index.top_n(test_codes.row(q), n);
    if (rerank_train != nullptr) {
      const Neighbor best = nearest(*rerank_train, std::span<const std::size_t>(top.indices),
                                    rerank_test->row(q), rerank_metric);
      out[q].final_index = best.index;
      out[q].final_distance = best.distance;
    } else {
      out[q].final_index = top.indices.front();
      out[q].final_distance = static_cast<double>(top.distances.front());
    }
    out[q].stage1 = std::move(top);
  });
  return out;
}

}  // namespace

std::vector<QueryResult> run_search(const FeatureMatrix& train, const FeatureMatrix& test,
                                    const SearchConfig& config, unsigned threads) {
  validate(config);
  check_shapes(train, test, config);

  switch (config.mode) {
    case SearchMode::RealValued:
      return single_stage(train, test, config.metric, threads);

    case SearchMode::ReducedReal: {
      const PcaModel model = pca_fit(train, *config.n_pca);
      const FeatureMatrix train_r = pca_transform(model, train, threads);
      const FeatureMatrix test_r = pca_transform(model, test, threads);
      return single_stage(train_r, test_r, config.metric, threads);
    }

    case SearchMode::BarcodeOnly:
      return barcode_search(binarize_matrix(train, config.method, threads),
                            binarize_matrix(test, config.method, threads), 1, nullptr, nullptr,
                            config.metric, threads);

    case SearchMode::TwoStage:
      return barcode_search(binarize_matrix(train, config.method, threads),
                            binarize_matrix(test, config.method, threads), config.n_candidates,
                            &train, &test, config.metric, threads);

    case SearchMode::ReducedBarcodeTwoStage: {
      const PcaModel model = pca_fit(train, *config.n_pca);
      const BarcodeMatrix train_codes = binarize_matrix(
          pca_transform(model, train, threads), BinarizationMethod::MinMax, threads);
      const BarcodeMatrix test_codes = binarize_matrix(pca_transform(model, test, threads),
                                                       BinarizationMethod::MinMax, threads);
      return barcode_search(train_codes, test_codes, config.n_candidates, &train, &test,
                            DistanceMetric::L1, threads);
    }
  }
  fail(ErrorKind::Config, "unhandled search mode");
}

}  // namespace deepbarcode
