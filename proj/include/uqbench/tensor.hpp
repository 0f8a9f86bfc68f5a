#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqbench {

// Row-major N x C matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  // Copy of column c (strided access).
  std::vector<double> column(std::size_t c) const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// M sampled forward passes x N samples x C classes of per-class probabilities.
// Storage is member-major, then sample, then class (the UQB1 payload order).
class PredictionTensor {
 public:
  PredictionTensor(std::size_t members, std::size_t samples, std::size_t classes,
                   std::vector<double> values);

  static PredictionTensor FromMembers(const std::vector<Matrix>& members);

  std::size_t members() const { return members_; }
  std::size_t samples() const { return samples_; }
  std::size_t classes() const { return classes_; }

  double operator()(std::size_t m, std::size_t n, std::size_t c) const {
    return values_[(m * samples_ + n) * classes_ + c];
  }
  Matrix member(std::size_t m) const;
  std::span<const double> values() const { return values_; }

  bool operator==(const PredictionTensor&) const = default;

 private:
  std::size_t members_;
  std::size_t samples_;
  std::size_t classes_;
  std::vector<double> values_;
};

// Annotations in {-1, 0, 1}: uncertain, negative, positive.
class LabelTensor {
 public:
  static constexpr std::int8_t kUncertain = -1;
  static constexpr std::int8_t kNegative = 0;
  static constexpr std::int8_t kPositive = 1;

  LabelTensor(std::size_t samples, std::size_t classes, std::vector<std::int8_t> values);

  std::size_t samples() const { return samples_; }
  std::size_t classes() const { return classes_; }
  std::int8_t operator()(std::size_t n, std::size_t c) const { return values_[n * classes_ + c]; }
  std::span<const std::int8_t> values() const { return values_; }

  bool operator==(const LabelTensor&) const = default;

 private:
  std::size_t samples_;
  std::size_t classes_;
  std::vector<std::int8_t> values_;
};

enum class ScoreKind : std::uint8_t {
  kPU = 0,
  kAU = 1,
  kEU = 2,
  kEdlPU = 3,
  kEdlAU = 4,
  kEdlEU = 5,
  kDduNll = 6,
  kExternal = 7,
};

std::string_view ScoreKindName(ScoreKind kind);
// Accepts the names produced by ScoreKindName, case-insensitive. Throws
// std::invalid_argument on unknown names.
ScoreKind ParseScoreKind(std::string_view name);

enum class ScoreShape : std::uint8_t { kPerClass = 0, kPerSample = 1 };

// Uncertainty values in nats, either per sample and class (N x C) or
// aggregated per sample (N x 1).
struct UncertaintyScores {
  ScoreKind kind = ScoreKind::kExternal;
  ScoreShape shape = ScoreShape::kPerClass;
  Matrix values;

  std::size_t samples() const { return values.rows(); }
  std::size_t classes() const { return values.cols(); }
  // Per-sample view; requires shape == kPerSample.
  std::vector<double> per_sample() const;
};

}  // namespace uqbench
