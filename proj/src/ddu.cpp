#include "uqbench/ddu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uqbench::ddu {

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw std::invalid_argument("FeatureMatrix: N and D must be >= 1");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_.values()[i])) {
      throw std::invalid_argument("FeatureMatrix: non-finite feature at index " + std::to_string(i));
    }
  }
}

ClassGaussians FitClassGaussians(const FeatureMatrix& features, const LabelTensor& labels,
                                 double jitter) {
  if (labels.samples() != features.samples()) {
    throw std::invalid_argument("FitClassGaussians: feature and label sample counts differ");
  }
  if (!(jitter > 0.0) || !std::isfinite(jitter)) {
    throw std::invalid_argument("FitClassGaussians: jitter must be finite and > 0");
  }
  const std::size_t dims = features.dims();
  ClassGaussians out{dims, jitter, std::vector<ClassGaussian>(labels.classes())};

  std::vector<std::size_t> members;
  std::vector<double> column;
  for (std::size_t c = 0; c < labels.classes(); ++c) {
    ClassGaussian& fit = out.classes[c];
    members.clear();
    for (std::size_t n = 0; n < labels.samples(); ++n) {
      if (labels(n, c) == LabelTensor::kPositive) members.push_back(n);
    }
    fit.count = members.size();
    if (members.empty()) {
      fit.warnings.emplace_back("no positive samples; class not fitted");
      continue;
    }
    fit.fitted = true;
    fit.mean.resize(dims);
    fit.variance.resize(dims);
    if (fit.count == 1) {
      fit.warnings.emplace_back("single positive sample; variance set to jitter");
    }
    const double count = static_cast<double>(fit.count);
    for (std::size_t d = 0; d < dims; ++d) {
      column.clear();
      for (std::size_t n : members) column.push_back(features.values()(n, d));
      std::sort(column.begin(), column.end());

      double sum = 0.0;
      for (double x : column) sum += x;
      // A constant column keeps its exact value so the variance is exactly 0.
      const double mean = column.front() == column.back() ? column.front() : sum / count;

      double variance = 0.0;
      if (fit.count > 1) {
        double squares = 0.0;
        for (double x : column) squares += (x - mean) * (x - mean);
        variance = squares / (count - 1.0);
      }
      if (!(variance > 0.0) || !std::isfinite(variance)) {
        variance = (std::isfinite(variance) ? std::max(variance, 0.0) : 0.0) + jitter;
        fit.jitter_applied = true;
      }
      fit.mean[d] = mean;
      fit.variance[d] = variance;
    }
  }
  return out;
}

DduScores DduScore(const FeatureMatrix& features, const ClassGaussians& gaussians) {
  if (features.dims() != gaussians.dims) {
    throw std::invalid_argument("DduScore: feature dimension " + std::to_string(features.dims()) +
                                " does not match fitted dimension " +
                                std::to_string(gaussians.dims));
  }
  const std::size_t n_classes = gaussians.classes.size();
  DduScores out{{ScoreKind::kDduNll, ScoreShape::kPerClass, Matrix(features.samples(), n_classes)},
                std::vector<bool>(n_classes, false)};
  const double log_two_pi = std::log(2.0 * std::numbers::pi);

  for (std::size_t c = 0; c < n_classes; ++c) {
    const ClassGaussian& fit = gaussians.classes[c];
    out.class_valid[c] = fit.fitted;
    if (!fit.fitted) {
      for (std::size_t n = 0; n < features.samples(); ++n) {
        out.scores.values(n, c) = std::numeric_limits<double>::quiet_NaN();
      }
      continue;
    }
    if (fit.mean.size() != gaussians.dims || fit.variance.size() != gaussians.dims) {
      throw std::invalid_argument("DduScore: malformed parameters for class " + std::to_string(c));
    }
    double normalizer = 0.0;
    for (double v : fit.variance) normalizer += 0.5 * (log_two_pi + std::log(v));
    for (std::size_t n = 0; n < features.samples(); ++n) {
      const auto x = features.values().row(n);
      double quadratic = 0.0;
      for (std::size_t d = 0; d < gaussians.dims; ++d) {
        const double diff = x[d] - fit.mean[d];
        quadratic += diff * diff / (2.0 * fit.variance[d]);
      }
      out.scores.values(n, c) = normalizer + quadratic;
    }
  }
  return out;
}

}  // namespace uqbench::ddu
