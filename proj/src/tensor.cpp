#include "uqbench/tensor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace uqbench {

namespace {

std::string Describe(std::size_t index) { return "index " + std::to_string(index); }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: value count " + std::to_string(values_.size()) +
                                " does not match shape " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

PredictionTensor::PredictionTensor(std::size_t members, std::size_t samples, std::size_t classes,
                                   std::vector<double> values)
    : members_(members), samples_(samples), classes_(classes), values_(std::move(values)) {
  if (members_ == 0 || samples_ == 0 || classes_ == 0) {
    throw std::invalid_argument("PredictionTensor: M, N and C must all be >= 1");
  }
  if (values_.size() != members_ * samples_ * classes_) {
    throw std::invalid_argument("PredictionTensor: expected " +
                                std::to_string(members_ * samples_ * classes_) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("PredictionTensor: probability out of [0,1] at " + Describe(i));
    }
  }
}

PredictionTensor PredictionTensor::FromMembers(const std::vector<Matrix>& members) {
  if (members.empty()) throw std::invalid_argument("PredictionTensor: no members");
  const std::size_t n = members.front().rows();
  const std::size_t c = members.front().cols();
  std::vector<double> values;
  values.reserve(members.size() * n * c);
  for (const Matrix& m : members) {
    if (m.rows() != n || m.cols() != c) {
      throw std::invalid_argument("PredictionTensor: member shapes differ");
    }
    values.insert(values.end(), m.values().begin(), m.values().end());
  }
  return PredictionTensor(members.size(), n, c, std::move(values));
}

Matrix PredictionTensor::member(std::size_t m) const {
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(m * samples_ * classes_);
  return Matrix(samples_, classes_,
                std::vector<double>(first, first + static_cast<std::ptrdiff_t>(samples_ * classes_)));
}

LabelTensor::LabelTensor(std::size_t samples, std::size_t classes, std::vector<std::int8_t> values)
    : samples_(samples), classes_(classes), values_(std::move(values)) {
  if (samples_ == 0 || classes_ == 0) {
    throw std::invalid_argument("LabelTensor: N and C must be >= 1");
  }
  if (values_.size() != samples_ * classes_) {
    throw std::invalid_argument("LabelTensor: expected " + std::to_string(samples_ * classes_) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < kUncertain || values_[i] > kPositive) {
      throw std::invalid_argument("LabelTensor: label outside {-1,0,1} at " + Describe(i));
    }
  }
}

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {
    "PU", "AU", "EU", "EDL-PU", "EDL-AU", "EDL-EU", "DDU-NLL", "external"};

}  // namespace

std::string_view ScoreKindName(ScoreKind kind) {
  return kKindNames.at(static_cast<std::size_t>(kind));
}

ScoreKind ParseScoreKind(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
  };
  const std::string wanted = lower(name);
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (lower(kKindNames[i]) == wanted) return static_cast<ScoreKind>(i);
  }
  throw std::invalid_argument("unknown score kind '" + std::string(name) + "'");
}

std::vector<double> UncertaintyScores::per_sample() const {
  if (shape != ScoreShape::kPerSample || values.cols() != 1) {
    throw std::invalid_argument("UncertaintyScores: per-sample scores required; aggregate first");
  }
  return {values.values().begin(), values.values().end()};
}

}  // namespace uqbench
