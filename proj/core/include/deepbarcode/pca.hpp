#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "deepbarcode/feature_store.hpp"

namespace deepbarcode {

/// Principal-component basis fit on a training set.
///
/// `basis` is d x k, column-major, orthonormal columns ordered by descending
/// eigenvalue. Each column is sign-normalized so that its largest-magnitude
/// entry is positive. Eigenvalues are variances along each component (sample
/// covariance, divisor n-1), clamped at zero. No whitening is applied.
class PcaModel {
 public:
  PcaModel() = default;
  /// Validates shapes, finiteness and eigenvalue ordering. Orthonormality of
  /// the basis is not re-checked here.
  PcaModel(std::vector<double> mean, std::vector<double> basis, std::vector<double> eigenvalues,
           double total_variance);

  [[nodiscard]] std::size_t dim() const noexcept { return mean_.size(); }
  [[nodiscard]] std::size_t components() const noexcept { return eigenvalues_.size(); }
  [[nodiscard]] std::span<const double> mean() const noexcept { return mean_; }
  [[nodiscard]] std::span<const double> basis() const noexcept { return basis_; }
  [[nodiscard]] std::span<const double> component(std::size_t j) const {
    return std::span<const double>(basis_).subspan(j * dim(), dim());
  }
  [[nodiscard]] std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  /// Trace of the training covariance. For models read back from a file this
  /// is the sum of the retained eigenvalues, since the format does not carry it.
  [[nodiscard]] double total_variance() const noexcept { return total_variance_; }

 private:
  std::vector<double> mean_;
  std::vector<double> basis_;
  std::vector<double> eigenvalues_;
  double total_variance_ = 0.0;
};

enum class PcaSolver {
  Auto,        // covariance eigensolve when rows > cols, otherwise SVD
  Svd,         // thin SVD of the centered training matrix
  Covariance,  // symmetric eigensolve of the d x d covariance, accumulated in row blocks
};

/// Requires 1 <= k <= min(rows, cols). Rank-deficient data succeeds with
/// trailing eigenvalues of zero.
PcaModel pca_fit(const FeatureMatrix& train, std::size_t k, PcaSolver solver = PcaSolver::Auto);

/// Coordinates of (row - mean) in the basis, in double precision.
std::vector<double> pca_project(const PcaModel& model, std::span<const float> row);

/// Projects every row. The output must itself be a valid FeatureMatrix, so
/// models with k == 1 are rejected here; use pca_project for those.
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& m, unsigned threads = 1);

/// eigenvalue_j / total_variance for each retained component.
std::vector<double> explained_variance_ratio(const PcaModel& model);

// "DPC1" | d u32 | k u32 | mean d*f32 | basis d*k f32 column-major | eigenvalues k*f32
std::vector<std::uint8_t> encode_pca_model(const PcaModel& model);
PcaModel decode_pca_model(std::span<const std::uint8_t> bytes);
PcaModel load_pca_model(const std::filesystem::path& path);
void save_pca_model(const PcaModel& model, const std::filesystem::path& path);

}  // namespace deepbarcode
