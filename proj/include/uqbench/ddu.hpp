#pragma once

// Post-hoc density scoring for multilabel classifiers. Each class gets an
// independent diagonal Gaussian over penultimate-layer features, fitted on
// the samples labelled positive for that class; the score is the negative
// log density.

#include <cstddef>
#include <string>
#include <vector>

#include "uqbench/tensor.hpp"

namespace uqbench::ddu {

inline constexpr double kDefaultJitter = 1e-6;

// N x D finite features.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values);

  std::size_t samples() const { return values_.rows(); }
  std::size_t dims() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

struct ClassGaussian {
  // False when the class had no positive samples; mean/variance are empty.
  bool fitted = false;
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t count = 0;
  bool jitter_applied = false;
  // Human-readable notes, e.g. the single-sample variance fallback.
  std::vector<std::string> warnings;
};

struct ClassGaussians {
  std::size_t dims = 0;
  double jitter = kDefaultJitter;
  std::vector<ClassGaussian> classes;
};

// Labels are N x C in {-1,0,1}; only label 1 contributes to a class. The
// variance uses the N_c - 1 denominator; jitter is added to any dimension
// whose variance is <= 0 or not finite. Sums run over sorted values so the
// result does not depend on sample order.
ClassGaussians FitClassGaussians(const FeatureMatrix& features, const LabelTensor& labels,
                                 double jitter = kDefaultJitter);

struct DduScores {
  // N x C, kind DDU-NLL. Columns of unfitted classes hold NaN.
  UncertaintyScores scores;
  std::vector<bool> class_valid;
};

// score[n][c] = sum_d 0.5 ln(2 pi var_cd) + (x_nd - mean_cd)^2 / (2 var_cd)
DduScores DduScore(const FeatureMatrix& features, const ClassGaussians& gaussians);

}  // namespace uqbench::ddu
