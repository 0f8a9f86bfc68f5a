#pragma once

// Information-theoretic split of predictive uncertainty for multilabel
// outputs. Each class is an independent Bernoulli, so entropies are binary
// entropies in nats and the split holds cell by cell:
//
//   BMA = mean over members of the class probability
//   PU  = H(BMA)
//   AU  = mean over members of H(member probability)
//   EU  = PU - AU   (>= 0 by concavity of H)

#include "uqbench/tensor.hpp"

namespace uqbench::decomposition {

// Probabilities are clamped to [kClampEps, 1 - kClampEps] before taking logs.
inline constexpr double kClampEps = 1e-12;

// Lower bound accepted for EU values; anything below is a numerical defect.
inline constexpr double kEuTolerance = 1e-9;

enum class Aggregation { kMean, kSum, kMax };

Aggregation ParseAggregation(std::string_view name);
std::string_view AggregationName(Aggregation aggregation);

// -p ln p - (1-p) ln(1-p), with 0 ln 0 = 0. Throws std::domain_error for p
// outside [0, 1] (including NaN).
double BinaryEntropy(double p);

// N x C mean over the member axis.
Matrix BayesianModelAverage(const PredictionTensor& preds);

UncertaintyScores PredictiveUncertainty(const PredictionTensor& preds);
UncertaintyScores AleatoricUncertainty(const PredictionTensor& preds);
UncertaintyScores EpistemicUncertainty(const PredictionTensor& preds);

struct Decomposition {
  Matrix bma;
  UncertaintyScores pu;
  UncertaintyScores au;
  UncertaintyScores eu;
};

// All three scores in a single pass; identical values to the individual
// functions above.
Decomposition Decompose(const PredictionTensor& preds);

// Reduces per-class scores to one value per sample. Scores that are already
// per-sample are returned unchanged.
UncertaintyScores AggregateClasses(const UncertaintyScores& scores,
                                   Aggregation strategy = Aggregation::kMean);

}  // namespace uqbench::decomposition
