#pragma once

// Synthetic prediction tensors with separately controllable aleatoric and
// epistemic factors.
//
// Per sample n and class c:
//   p_nc      ~ Beta(a, b)                     latent Bernoulli parameter
//   y_nc      ~ Bernoulli(p_nc)
//   s_n       = s * (ood_n ? ood_multiplier : 1) * (1 + kCouplingGain * coupling * z_n)
//   member m  = sigmoid(logit(p_nc) * (1 - coupling * z_n) + s_n * eps_ncm)
//
// z_n ~ U(0,1) is a shared driver: with coupling > 0 it raises the logit
// noise and pulls the latent probability towards 0.5 at the same time. The
// label_uncertain_rate fraction of cells with the highest latent entropy is
// relabelled -1. Ground truth per sample is the mean latent entropy
// (aleatoric) and s_n (epistemic).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "uqbench/decomposition.hpp"
#include "uqbench/tensor.hpp"

namespace uqbench::synth {

inline constexpr double kCouplingGain = 4.0;

struct SynthConfig {
  std::size_t samples = 2000;
  std::size_t classes = 14;
  std::size_t members = 5;
  double aleatoric_a = 2.0;
  double aleatoric_b = 2.0;
  double epistemic_std = 0.3;
  double ood_fraction = 0.5;
  double ood_multiplier = 5.0;
  double label_uncertain_rate = 0.0;
  double coupling = 0.0;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument describing the first violated constraint.
void Validate(const SynthConfig& config);

struct GroundTruth {
  // Per sample.
  std::vector<double> aleatoric;
  std::vector<double> epistemic;
  // N x C latent Bernoulli parameters after coupling.
  Matrix latent;
};

struct SynthData {
  PredictionTensor predictions;
  LabelTensor labels;
  std::vector<std::int8_t> ood_labels;
  GroundTruth truth;
};

// Deterministic in the config, seed included.
SynthData Generate(const SynthConfig& config);

// Regimes used by the acceptance suite. Their constants were fixed once
// against the generator and are not tuned per run.
SynthConfig PlantedOodRegime(std::uint64_t seed = 7);
SynthConfig IndependentRegime(std::uint64_t seed = 11);
SynthConfig CoupledRegime(std::uint64_t seed = 13);

struct FactorRecovery {
  bool eu_recoverable = false;
  // Spearman correlations; nullopt when a side is constant.
  std::optional<double> au_vs_aleatoric;
  std::optional<double> eu_vs_epistemic;
  std::optional<double> au_vs_epistemic;
  std::optional<double> eu_vs_aleatoric;
};

FactorRecovery FactorRecoveryReport(
    const PredictionTensor& preds, const GroundTruth& truth,
    decomposition::Aggregation aggregation = decomposition::Aggregation::kMean);

}  // namespace uqbench::synth
