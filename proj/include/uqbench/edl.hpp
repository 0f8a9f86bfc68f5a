#pragma once

// Multilabel evidential learning: every class carries Beta(alpha, beta)
// evidence instead of a shared Dirichlet. Network link functions (softplus+1
// and friends) are the caller's business; this module starts from the Beta
// parameters.

#include <cstddef>
#include <vector>

#include "uqbench/tensor.hpp"

namespace uqbench::edl {

// psi(x) for x > 0. Recurrence up to x >= 10, then the asymptotic series.
// Absolute error below 1e-12 on [1e-3, 1e6].
double Digamma(double x);

// psi'(x) for x > 0, same construction as Digamma. Used by the analytic
// loss gradient.
double Trigamma(double x);

// N x C evidence; alpha and beta strictly positive and finite.
class BetaParams {
 public:
  BetaParams(Matrix alpha, Matrix beta);

  const Matrix& alpha() const { return alpha_; }
  const Matrix& beta() const { return beta_; }
  std::size_t samples() const { return alpha_.rows(); }
  std::size_t classes() const { return alpha_.cols(); }

 private:
  Matrix alpha_;
  Matrix beta_;
};

struct EdlLossTerms {
  double squared_error = 0.0;
  double variance_term = 0.0;
  double kl_term = 0.0;
  double lambda_t = 0.0;
  double total = 0.0;
};

// lambda_t = min(1, epoch / horizon).
double AnnealingCoefficient(double epoch, double horizon = 10.0);

// KL(Beta(alpha, beta) || Beta(1, 1)) per cell, closed form.
Matrix KlBetaUniform(const BetaParams& params);

// Mean over samples of the per-class sum of
//   (alpha/S - y)^2 + (alpha/S)(1 - alpha/S)/(S + 1) + lambda_t * KL
// with S = alpha + beta per class. Labels must be 0/1 (N x C).
EdlLossTerms BetaEdlLoss(const BetaParams& params, const Matrix& labels, double lambda_t);

struct EdlLossGradient {
  Matrix d_alpha;
  Matrix d_beta;
};

// Analytic d(total)/d(alpha) and d(total)/d(beta) for BetaEdlLoss.
EdlLossGradient BetaEdlLossGradient(const BetaParams& params, const Matrix& labels,
                                    double lambda_t);

// psi(a + b) - a/(a+b) psi(a) - b/(a+b) psi(b)
UncertaintyScores EdlPredictiveUncertainty(const BetaParams& params);
// Binary entropy of the Beta mean a/(a+b).
UncertaintyScores EdlAleatoricUncertainty(const BetaParams& params);

struct EdlEpistemic {
  // PU - AU, unclamped.
  UncertaintyScores scores;
  // Cells where the difference came out negative.
  std::vector<bool> negative;
  std::size_t negative_count = 0;
};

EdlEpistemic EdlEpistemicUncertainty(const BetaParams& params);

}  // namespace uqbench::edl
