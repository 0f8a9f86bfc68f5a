#pragma once

// Multilabel heteroscedastic classifier: each class has a Gaussian logit
// N(mu, sigma^2) squashed through a sigmoid. The loss is binary cross-entropy
// averaged over Monte Carlo logit draws.

#include <cstddef>
#include <cstdint>

#include "uqbench/tensor.hpp"

namespace uqbench::hetnn {

inline constexpr std::size_t kDefaultMcSamples = 16;
inline constexpr std::size_t kDefaultMembers = 5;

class HetLogits {
 public:
  HetLogits(Matrix mu, Matrix sigma);

  const Matrix& mu() const { return mu_; }
  const Matrix& sigma() const { return sigma_; }
  std::size_t samples() const { return mu_.rows(); }
  std::size_t classes() const { return mu_.cols(); }

 private:
  Matrix mu_;
  Matrix sigma_;
};

enum class NoiseSharing {
  // Independent epsilon per (sample, class, draw).
  kPerCell,
  // One epsilon per (sample, draw), shared by all classes of that sample.
  kSharedAcrossClasses,
};

struct LossOptions {
  std::size_t mc_samples = kDefaultMcSamples;
  std::uint64_t seed = 0;
  NoiseSharing sharing = NoiseSharing::kPerCell;
};

// BCE(y, sigmoid(z)) evaluated from the logit without forming the sigmoid.
double BceWithLogit(double y, double logit);

// (1/N) sum_i sum_c mean_k BCE(y_ic, sigmoid(mu_ic + sigma_ic * eps_ick)).
double HetnnLoss(const HetLogits& logits, const Matrix& labels, const LossOptions& options = {});

// Pathwise gradient of HetnnLoss with respect to mu, using the same draws.
Matrix HetnnLossGradientMu(const HetLogits& logits, const Matrix& labels,
                           const LossOptions& options = {});

// Member m holds sigmoid(mu + sigma * eps_m). Draws come from a stream
// separate from the loss.
PredictionTensor HetnnSamplePredictions(const HetLogits& logits,
                                        std::size_t members = kDefaultMembers,
                                        std::uint64_t seed = 0,
                                        NoiseSharing sharing = NoiseSharing::kPerCell);

}  // namespace uqbench::hetnn
