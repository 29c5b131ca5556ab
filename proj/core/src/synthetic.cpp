#include "deepbarcode/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "deepbarcode/error.hpp"

namespace deepbarcode {

namespace {

// std::normal_distribution is implementation-defined, so sampling is done
// by hand on top of the fully specified mt19937_64 engine.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1) with 53 random bits
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<std::vector<double>> class_directions(const SyntheticSpec& spec, GaussianSource& rng) {
  std::vector<std::vector<double>> dirs;
  dirs.reserve(spec.classes);
  const bool orthogonal = spec.classes <= spec.dim;
  while (dirs.size() < spec.classes) {
    std::vector<double> v(spec.dim);
    for (double& x : v) {
      x = rng.normal();
    }
    if (orthogonal) {
      // Modified Gram-Schmidt against the directions accepted so far.
      for (const auto& u : dirs) {
        double dot = 0.0;
        for (std::size_t i = 0; i < spec.dim; ++i) {
          dot += v[i] * u[i];
        }
        for (std::size_t i = 0; i < spec.dim; ++i) {
          v[i] -= dot * u[i];
        }
      }
    }
    double norm = 0.0;
    for (double x : v) {
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-6) {
      continue;  // numerically dependent draw; resample
    }
    for (double& x : v) {
      x /= norm;
    }
    dirs.push_back(std::move(v));
  }
  return dirs;
}

void sample(const std::vector<std::vector<double>>& means, std::size_t per_class, double sigma,
            GaussianSource& rng, std::vector<float>& values, std::vector<ClassId>& labels) {
  for (std::size_t c = 0; c < means.size(); ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      for (double m : means[c]) {
        values.push_back(static_cast<float>(m + sigma * rng.normal()));
      }
      labels.push_back(static_cast<ClassId>(c));
    }
  }
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.classes < 2) {
    fail(ErrorKind::Parameter, "synthetic data needs at least 2 classes");
  }
  if (spec.per_class < 1 || spec.test_per_class < 1) {
    fail(ErrorKind::Parameter, "synthetic data needs at least 1 train and 1 test row per class");
  }
  if (spec.dim < 2) {
    fail(ErrorKind::Parameter, "synthetic data needs dim >= 2");
  }
  if (!std::isfinite(spec.separation) || spec.separation < 0.0) {
    fail(ErrorKind::Parameter, "separation must be a finite non-negative number");
  }
}

SyntheticData generate(const SyntheticSpec& spec) {
  validate(spec);
  GaussianSource rng(spec.seed);
  auto means = class_directions(spec, rng);
  const double radius = spec.separation / std::sqrt(2.0);
  for (auto& m : means) {
    for (double& x : m) {
      x *= radius;
    }
  }
  const double sigma = 1.0 / std::sqrt(static_cast<double>(spec.dim));

  std::vector<float> train_values;
  std::vector<ClassId> train_labels;
  train_values.reserve(spec.classes * spec.per_class * spec.dim);
  sample(means, spec.per_class, sigma, rng, train_values, train_labels);

  std::vector<float> test_values;
  std::vector<ClassId> test_labels;
  test_values.reserve(spec.classes * spec.test_per_class * spec.dim);
  sample(means, spec.test_per_class, sigma, rng, test_values, test_labels);

  return {FeatureMatrix(train_labels.size(), spec.dim, std::move(train_values)),
          LabelVector(std::move(train_labels)),
          FeatureMatrix(test_labels.size(), spec.dim, std::move(test_values)),
          LabelVector(std::move(test_labels))};
}

}  // namespace deepbarcode
