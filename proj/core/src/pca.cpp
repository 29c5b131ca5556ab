#include "deepbarcode/pca.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "byte_io.hpp"
#include "deepbarcode/error.hpp"
#include "deepbarcode/parallel.hpp"

namespace deepbarcode {

namespace {

constexpr std::string_view kPcaMagic = "DPC1";
constexpr std::size_t kBlockRows = 1024;
constexpr double kEigenFloor = -1e-9;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::VectorXd column_means(const FeatureMatrix& m) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      sum[static_cast<Eigen::Index>(c)] += row[c];
    }
  }
  return sum / static_cast<double>(m.rows());
}

RowMatrix centered_block(const FeatureMatrix& m, const Eigen::VectorXd& mean, std::size_t begin,
                         std::size_t end) {
  RowMatrix block(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = begin; r < end; ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      block(static_cast<Eigen::Index>(r - begin), static_cast<Eigen::Index>(c)) =
          static_cast<double>(row[c]) - mean[static_cast<Eigen::Index>(c)];
    }
  }
  return block;
}

struct Decomposition {
  Eigen::MatrixXd vectors;  // d x k, descending order
  Eigen::VectorXd values;   // k variances
  double total_variance = 0.0;
};

Decomposition fit_svd(const FeatureMatrix& train, const Eigen::VectorXd& mean, std::size_t k,
                      double denom) {
  const RowMatrix centered = centered_block(train, mean, 0, train.rows());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto kk = static_cast<Eigen::Index>(k);
  Decomposition out;
  out.vectors = svd.matrixV().leftCols(kk);
  out.values = svd.singularValues().head(kk).array().square() / denom;
  out.total_variance = centered.squaredNorm() / denom;
  return out;
}

Decomposition fit_covariance(const FeatureMatrix& train, const Eigen::VectorXd& mean,
                             std::size_t k, double denom) {
  const auto d = static_cast<Eigen::Index>(train.cols());
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t begin = 0; begin < train.rows(); begin += kBlockRows) {
    const std::size_t end = std::min(train.rows(), begin + kBlockRows);
    const RowMatrix block = centered_block(train, mean, begin, end);
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
  }
  Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
  cov /= denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    fail(ErrorKind::Data, "covariance eigendecomposition did not converge");
  }
  // Eigen returns ascending order; take the top k in descending order.
  Decomposition out;
  out.vectors = eig.eigenvectors().rightCols(static_cast<Eigen::Index>(k)).rowwise().reverse();
  out.values = eig.eigenvalues().tail(static_cast<Eigen::Index>(k)).reverse();
  out.total_variance = cov.trace();
  return out;
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) {
      best = i;
    }
  }
  if (v[best] < 0) {
    v = -v;
  }
}

}  // namespace

PcaModel::PcaModel(std::vector<double> mean, std::vector<double> basis,
                   std::vector<double> eigenvalues, double total_variance)
    : mean_(std::move(mean)),
      basis_(std::move(basis)),
      eigenvalues_(std::move(eigenvalues)),
      total_variance_(total_variance) {
  const std::size_t d = mean_.size();
  const std::size_t k = eigenvalues_.size();
  if (d < 1 || k < 1 || k > d) {
    fail(ErrorKind::Dimension, "PCA model with d=" + std::to_string(d) +
                                   " and k=" + std::to_string(k) + " is invalid");
  }
  if (basis_.size() != d * k) {
    fail(ErrorKind::Dimension, "PCA basis has " + std::to_string(basis_.size()) +
                                   " entries, expected " + std::to_string(d * k));
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(mean_.begin(), mean_.end(), finite) ||
      !std::all_of(basis_.begin(), basis_.end(), finite) ||
      !std::all_of(eigenvalues_.begin(), eigenvalues_.end(), finite) ||
      !std::isfinite(total_variance_)) {
    fail(ErrorKind::Data, "PCA model contains non-finite values");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (eigenvalues_[j] < kEigenFloor) {
      fail(ErrorKind::Data, "negative PCA eigenvalue " + std::to_string(eigenvalues_[j]));
    }
    eigenvalues_[j] = std::max(0.0, eigenvalues_[j]);
    if (j > 0 && eigenvalues_[j] > eigenvalues_[j - 1]) {
      fail(ErrorKind::Data, "PCA eigenvalues are not sorted in non-increasing order");
    }
  }
}

PcaModel pca_fit(const FeatureMatrix& train, std::size_t k, PcaSolver solver) {
  const std::size_t limit = std::min(train.rows(), train.cols());
  if (train.empty()) {
    fail(ErrorKind::Parameter, "cannot fit PCA on an empty matrix");
  }
  if (k < 1 || k > limit) {
    fail(ErrorKind::Parameter, "component count k=" + std::to_string(k) +
                                   " must be in [1, " + std::to_string(limit) + "]");
  }
  const Eigen::VectorXd mean = column_means(train);
  const double denom = train.rows() > 1 ? static_cast<double>(train.rows() - 1) : 1.0;

  if (solver == PcaSolver::Auto) {
    solver = train.rows() > train.cols() ? PcaSolver::Covariance : PcaSolver::Svd;
  }
  Decomposition dec = solver == PcaSolver::Svd ? fit_svd(train, mean, k, denom)
                                               : fit_covariance(train, mean, k, denom);

  const std::size_t d = train.cols();
  std::vector<double> basis(d * k);
  std::vector<double> values(k);
  for (std::size_t j = 0; j < k; ++j) {
    Eigen::VectorXd col = dec.vectors.col(static_cast<Eigen::Index>(j));
    col.normalize();
    normalize_sign(col);
    std::copy(col.data(), col.data() + col.size(), basis.begin() + static_cast<std::ptrdiff_t>(j * d));
    values[j] = std::max(0.0, dec.values[static_cast<Eigen::Index>(j)]);
  }
  // Rounding can leave adjacent eigenvalues a hair out of order.
  for (std::size_t j = 1; j < k; ++j) {
    values[j] = std::min(values[j], values[j - 1]);
  }
  return PcaModel(std::vector<double>(mean.data(), mean.data() + mean.size()), std::move(basis),
                  std::move(values), std::max(0.0, dec.total_variance));
}

std::vector<double> pca_project(const PcaModel& model, std::span<const float> row) {
  if (row.size() != model.dim()) {
    fail(ErrorKind::Dimension, "row has " + std::to_string(row.size()) +
                                   " columns but the PCA model expects " +
                                   std::to_string(model.dim()));
  }
  const std::size_t d = model.dim();
  std::vector<double> centered(d);
  for (std::size_t c = 0; c < d; ++c) {
    centered[c] = static_cast<double>(row[c]) - model.mean()[c];
  }
  std::vector<double> out(model.components());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto comp = model.component(j);
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      acc += centered[c] * comp[c];
    }
    out[j] = acc;
  }
  return out;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& m, unsigned threads) {
  if (m.cols() != model.dim()) {
    fail(ErrorKind::Dimension, "feature matrix has " + std::to_string(m.cols()) +
                                   " columns but the PCA model expects " +
                                   std::to_string(model.dim()));
  }
  const std::size_t k = model.components();
  if (k < 2) {
    fail(ErrorKind::Parameter, "reduced feature matrices need at least 2 components, model has " +
                                   std::to_string(k));
  }
  std::vector<float> values(m.rows() * k);
  parallel_for(m.rows(), threads, [&](std::size_t r) {
    const auto coords = pca_project(model, m.row(r));
    for (std::size_t j = 0; j < k; ++j) {
      values[r * k + j] = static_cast<float>(coords[j]);
    }
  });
  return {m.rows(), k, std::move(values)};
}

std::vector<double> explained_variance_ratio(const PcaModel& model) {
  std::vector<double> out(model.components(), 0.0);
  const double total = model.total_variance();
  if (total <= 0.0) {
    return out;
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = model.eigenvalues()[j] / total;
  }
  return out;
}

std::vector<std::uint8_t> encode_pca_model(const PcaModel& model) {
  detail::ByteWriter w;
  w.magic(kPcaMagic);
  w.u32(static_cast<std::uint32_t>(model.dim()));
  w.u32(static_cast<std::uint32_t>(model.components()));
  for (double v : model.mean()) {
    w.f32(static_cast<float>(v));
  }
  for (double v : model.basis()) {
    w.f32(static_cast<float>(v));
  }
  for (double v : model.eigenvalues()) {
    w.f32(static_cast<float>(v));
  }
  return w.take();
}

PcaModel decode_pca_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kPcaMagic, "PCA model file");
  const std::size_t d = r.u32();
  const std::size_t k = r.u32();
  if (d < 1 || k < 1 || k > d) {
    fail(ErrorKind::Format, "PCA model file declares d=" + std::to_string(d) +
                                " k=" + std::to_string(k));
  }
  const std::size_t floats = d + d * k + k;
  if (r.remaining() != floats * 4) {
    fail(ErrorKind::Truncation, "PCA model payload is " + std::to_string(r.remaining()) +
                                    " bytes, expected " + std::to_string(floats * 4));
  }
  const auto read = [&r](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) {
      x = r.f32();
    }
    return v;
  };
  auto mean = read(d);
  auto basis = read(d * k);
  auto eigenvalues = read(k);
  double total = 0.0;
  for (double e : eigenvalues) {
    total += std::max(0.0, e);
  }
  return PcaModel(std::move(mean), std::move(basis), std::move(eigenvalues), total);
}

PcaModel load_pca_model(const std::filesystem::path& path) {
  return decode_pca_model(read_file_bytes(path));
}

void save_pca_model(const PcaModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_pca_model(model));
}

}  // namespace deepbarcode
