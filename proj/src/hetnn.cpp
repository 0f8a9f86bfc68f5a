#include "uqbench/hetnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uqbench/random.hpp"

namespace uqbench::hetnn {

namespace {

void RequireBinaryLabels(const Matrix& labels, const HetLogits& logits) {
  if (labels.rows() != logits.samples() || labels.cols() != logits.classes()) {
    throw std::invalid_argument("HetnnLoss: label shape does not match logits");
  }
  for (double y : labels.values()) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("HetnnLoss: labels must be 0 or 1");
  }
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Epsilon(std::uint64_t seed, std::uint64_t stream, std::size_t n, std::size_t c,
               std::size_t draw, NoiseSharing sharing) {
  const std::size_t class_key = sharing == NoiseSharing::kPerCell ? c : 0;
  return random::StandardNormal(seed, stream, n, class_key, draw);
}

}  // namespace

HetLogits::HetLogits(Matrix mu, Matrix sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.rows() != sigma_.rows() || mu_.cols() != sigma_.cols()) {
    throw std::invalid_argument("HetLogits: mu and sigma shapes differ");
  }
  if (mu_.empty()) throw std::invalid_argument("HetLogits: empty logits");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    const double s = sigma_.values()[i];
    if (!(s >= 0.0) || !std::isfinite(s) || !std::isfinite(mu_.values()[i])) {
      throw std::invalid_argument("HetLogits: sigma must be finite and >= 0, mu finite (index " +
                                  std::to_string(i) + ")");
    }
  }
}

double BceWithLogit(double y, double logit) {
  // softplus(z) - y z, written to avoid overflow for large |z|.
  return std::max(logit, 0.0) - y * logit + std::log1p(std::exp(-std::abs(logit)));
}

double HetnnLoss(const HetLogits& logits, const Matrix& labels, const LossOptions& options) {
  RequireBinaryLabels(labels, logits);
  if (options.mc_samples == 0) throw std::invalid_argument("HetnnLoss: mc_samples must be >= 1");

  double total = 0.0;
  for (std::size_t n = 0; n < logits.samples(); ++n) {
    for (std::size_t c = 0; c < logits.classes(); ++c) {
      const double mu = logits.mu()(n, c);
      const double sigma = logits.sigma()(n, c);
      const double y = labels(n, c);
      double cell = 0.0;
      for (std::size_t k = 0; k < options.mc_samples; ++k) {
        const double eps =
            sigma == 0.0 ? 0.0 : Epsilon(options.seed, random::kHetLoss, n, c, k, options.sharing);
        cell += BceWithLogit(y, mu + sigma * eps);
      }
      total += cell / static_cast<double>(options.mc_samples);
    }
  }
  return total / static_cast<double>(logits.samples());
}

Matrix HetnnLossGradientMu(const HetLogits& logits, const Matrix& labels,
                           const LossOptions& options) {
  RequireBinaryLabels(labels, logits);
  if (options.mc_samples == 0) throw std::invalid_argument("HetnnLoss: mc_samples must be >= 1");

  Matrix grad(logits.samples(), logits.classes());
  const double scale =
      1.0 / (static_cast<double>(logits.samples()) * static_cast<double>(options.mc_samples));
  for (std::size_t n = 0; n < logits.samples(); ++n) {
    for (std::size_t c = 0; c < logits.classes(); ++c) {
      const double mu = logits.mu()(n, c);
      const double sigma = logits.sigma()(n, c);
      double g = 0.0;
      for (std::size_t k = 0; k < options.mc_samples; ++k) {
        const double eps =
            sigma == 0.0 ? 0.0 : Epsilon(options.seed, random::kHetLoss, n, c, k, options.sharing);
        g += Sigmoid(mu + sigma * eps) - labels(n, c);
      }
      grad(n, c) = g * scale;
    }
  }
  return grad;
}

PredictionTensor HetnnSamplePredictions(const HetLogits& logits, std::size_t members,
                                        std::uint64_t seed, NoiseSharing sharing) {
  if (members == 0) throw std::invalid_argument("HetnnSamplePredictions: members must be >= 1");
  const std::size_t n_samples = logits.samples();
  const std::size_t n_classes = logits.classes();
  std::vector<double> values(members * n_samples * n_classes);
  for (std::size_t m = 0; m < members; ++m) {
    for (std::size_t n = 0; n < n_samples; ++n) {
      for (std::size_t c = 0; c < n_classes; ++c) {
        const double sigma = logits.sigma()(n, c);
        const double eps = sigma == 0.0 ? 0.0 : Epsilon(seed, random::kHetMembers, n, c, m, sharing);
        values[(m * n_samples + n) * n_classes + c] = Sigmoid(logits.mu()(n, c) + sigma * eps);
      }
    }
  }
  return PredictionTensor(members, n_samples, n_classes, std::move(values));
}

}  // namespace uqbench::hetnn
