#include "uqbench/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uqbench::decomposition {

Aggregation ParseAggregation(std::string_view name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "sum") return Aggregation::kSum;
  if (name == "max") return Aggregation::kMax;
  throw std::invalid_argument("unknown aggregation '" + std::string(name) +
                              "' (expected mean, sum or max)");
}

std::string_view AggregationName(Aggregation aggregation) {
  switch (aggregation) {
    case Aggregation::kMean: return "mean";
    case Aggregation::kSum: return "sum";
    case Aggregation::kMax: return "max";
  }
  return "mean";
}

double BinaryEntropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("BinaryEntropy: probability " + std::to_string(p) +
                            " outside [0,1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  const double q = std::clamp(p, kClampEps, 1.0 - kClampEps);
  return -q * std::log(q) - (1.0 - q) * std::log1p(-q);
}

namespace {

// Per-cell kernel shared by every public entry point so that PU, AU and EU
// always agree bit for bit. Members are summed in index order.
struct CellValues {
  double bma;
  double pu;
  double au;
};

CellValues EvaluateCell(const PredictionTensor& preds, std::size_t n, std::size_t c) {
  const std::size_t members = preds.members();
  double sum = 0.0;
  double entropy_sum = 0.0;
  for (std::size_t m = 0; m < members; ++m) {
    const double p = preds(m, n, c);
    sum += p;
    entropy_sum += BinaryEntropy(p);
  }
  const double scale = static_cast<double>(members);
  // Averaging can overshoot 1 by an ulp; keep the BMA a probability.
  const double bma = std::min(sum / scale, 1.0);
  return {bma, BinaryEntropy(bma), entropy_sum / scale};
}

UncertaintyScores MakeScores(ScoreKind kind, std::size_t n, std::size_t c) {
  return {kind, ScoreShape::kPerClass, Matrix(n, c)};
}

}  // namespace

Matrix BayesianModelAverage(const PredictionTensor& preds) {
  Matrix out(preds.samples(), preds.classes());
  for (std::size_t n = 0; n < preds.samples(); ++n) {
    for (std::size_t c = 0; c < preds.classes(); ++c) {
      double sum = 0.0;
      for (std::size_t m = 0; m < preds.members(); ++m) sum += preds(m, n, c);
      out(n, c) = std::min(sum / static_cast<double>(preds.members()), 1.0);
    }
  }
  return out;
}

Decomposition Decompose(const PredictionTensor& preds) {
  const std::size_t n_samples = preds.samples();
  const std::size_t n_classes = preds.classes();
  Decomposition out{Matrix(n_samples, n_classes), MakeScores(ScoreKind::kPU, n_samples, n_classes),
                    MakeScores(ScoreKind::kAU, n_samples, n_classes),
                    MakeScores(ScoreKind::kEU, n_samples, n_classes)};
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      const CellValues cell = EvaluateCell(preds, n, c);
      out.bma(n, c) = cell.bma;
      out.pu.values(n, c) = cell.pu;
      out.au.values(n, c) = cell.au;
      out.eu.values(n, c) = cell.pu - cell.au;
    }
  }
  return out;
}

UncertaintyScores PredictiveUncertainty(const PredictionTensor& preds) {
  return Decompose(preds).pu;
}

UncertaintyScores AleatoricUncertainty(const PredictionTensor& preds) {
  return Decompose(preds).au;
}

UncertaintyScores EpistemicUncertainty(const PredictionTensor& preds) {
  return Decompose(preds).eu;
}

UncertaintyScores AggregateClasses(const UncertaintyScores& scores, Aggregation strategy) {
  if (scores.shape == ScoreShape::kPerSample) return scores;
  const std::size_t n_classes = scores.values.cols();
  if (n_classes == 0) throw std::invalid_argument("AggregateClasses: empty class axis");

  UncertaintyScores out{scores.kind, ScoreShape::kPerSample, Matrix(scores.values.rows(), 1)};
  for (std::size_t n = 0; n < scores.values.rows(); ++n) {
    const auto row = scores.values.row(n);
    double value = 0.0;
    switch (strategy) {
      case Aggregation::kMean:
      case Aggregation::kSum:
        for (double v : row) value += v;
        if (strategy == Aggregation::kMean) value /= static_cast<double>(n_classes);
        break;
      case Aggregation::kMax:
        value = *std::max_element(row.begin(), row.end());
        break;
    }
    out.values(n, 0) = value;
  }
  return out;
}

}  // namespace uqbench::decomposition
