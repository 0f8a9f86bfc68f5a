#include "uqbench/edl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uqbench/decomposition.hpp"

namespace uqbench::edl {

namespace {

constexpr double kAsymptoticThreshold = 10.0;

void RequirePositive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": argument must be finite and > 0, got " +
                            std::to_string(x));
  }
}

void RequireBinaryLabels(const Matrix& labels, const BetaParams& params) {
  if (labels.rows() != params.samples() || labels.cols() != params.classes()) {
    throw std::invalid_argument("BetaEdlLoss: label shape does not match parameters");
  }
  for (double y : labels.values()) {
    if (y != 0.0 && y != 1.0) {
      throw std::invalid_argument("BetaEdlLoss: labels must be 0 or 1 (resolve -1 upstream)");
    }
  }
}

}  // namespace

double Digamma(double x) {
  RequirePositive(x, "Digamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number series: 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760, 1/12.
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 -
                                              inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double Trigamma(double x) {
  RequirePositive(x, "Trigamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
  const double series =
      inv * inv2 *
      (1.0 / 6 -
       inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66 - inv2 * 691.0 / 2730)))));
  return shift + inv + 0.5 * inv2 + series;
}

BetaParams::BetaParams(Matrix alpha, Matrix beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.rows() != beta_.rows() || alpha_.cols() != beta_.cols()) {
    throw std::invalid_argument("BetaParams: alpha and beta shapes differ");
  }
  if (alpha_.empty()) throw std::invalid_argument("BetaParams: empty parameters");
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    const double a = alpha_.values()[i];
    const double b = beta_.values()[i];
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw std::invalid_argument("BetaParams: alpha and beta must be finite and > 0 (index " +
                                  std::to_string(i) + ")");
    }
  }
}

double AnnealingCoefficient(double epoch, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("AnnealingCoefficient: horizon must be > 0");
  return std::clamp(epoch / horizon, 0.0, 1.0);
}

namespace {

double KlCell(double a, double b) {
  const double s = a + b;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(s);
  const double psi_s = Digamma(s);
  // ln B(1,1) = 0.
  return -log_beta + (a - 1.0) * (Digamma(a) - psi_s) + (b - 1.0) * (Digamma(b) - psi_s);
}

}  // namespace

Matrix KlBetaUniform(const BetaParams& params) {
  Matrix out(params.samples(), params.classes());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Rounding can leave a -1e-17 residue near the minimum.
    out.values()[i] = std::max(0.0, KlCell(params.alpha().values()[i], params.beta().values()[i]));
  }
  return out;
}

EdlLossTerms BetaEdlLoss(const BetaParams& params, const Matrix& labels, double lambda_t) {
  RequireBinaryLabels(labels, params);
  if (!(lambda_t >= 0.0)) throw std::invalid_argument("BetaEdlLoss: lambda_t must be >= 0");

  const Matrix kl = KlBetaUniform(params);
  EdlLossTerms terms;
  terms.lambda_t = lambda_t;
  for (std::size_t i = 0; i < kl.size(); ++i) {
    const double a = params.alpha().values()[i];
    const double s = a + params.beta().values()[i];
    const double mean = a / s;
    const double err = mean - labels.values()[i];
    terms.squared_error += err * err;
    terms.variance_term += mean * (1.0 - mean) / (s + 1.0);
    terms.kl_term += kl.values()[i];
  }
  const double scale = 1.0 / static_cast<double>(params.samples());
  terms.squared_error *= scale;
  terms.variance_term *= scale;
  terms.kl_term *= scale;
  terms.total = terms.squared_error + terms.variance_term + lambda_t * terms.kl_term;
  return terms;
}

EdlLossGradient BetaEdlLossGradient(const BetaParams& params, const Matrix& labels,
                                    double lambda_t) {
  RequireBinaryLabels(labels, params);
  const double scale = 1.0 / static_cast<double>(params.samples());
  EdlLossGradient grad{Matrix(params.samples(), params.classes()),
                       Matrix(params.samples(), params.classes())};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double a = params.alpha().values()[i];
    const double b = params.beta().values()[i];
    const double y = labels.values()[i];
    const double s = a + b;
    const double s2 = s * s;
    const double mean = a / s;

    // d(mean)/da = b/S^2, d(mean)/db = -a/S^2.
    const double d_se_a = 2.0 * (mean - y) * b / s2;
    const double d_se_b = -2.0 * (mean - y) * a / s2;

    // variance term = ab / (S^2 (S+1))
    const double common = a * b * (3.0 * s + 2.0) / (s2 * s * (s + 1.0) * (s + 1.0));
    const double d_var_a = b / (s2 * (s + 1.0)) - common;
    const double d_var_b = a / (s2 * (s + 1.0)) - common;

    const double tri_s = Trigamma(s);
    const double d_kl_a = (a - 1.0) * Trigamma(a) - (s - 2.0) * tri_s;
    const double d_kl_b = (b - 1.0) * Trigamma(b) - (s - 2.0) * tri_s;

    grad.d_alpha.values()[i] = scale * (d_se_a + d_var_a + lambda_t * d_kl_a);
    grad.d_beta.values()[i] = scale * (d_se_b + d_var_b + lambda_t * d_kl_b);
  }
  return grad;
}

UncertaintyScores EdlPredictiveUncertainty(const BetaParams& params) {
  UncertaintyScores out{ScoreKind::kEdlPU, ScoreShape::kPerClass,
                        Matrix(params.samples(), params.classes())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double a = params.alpha().values()[i];
    const double b = params.beta().values()[i];
    const double s = a + b;
    out.values.values()[i] = Digamma(s) - (a / s) * Digamma(a) - (b / s) * Digamma(b);
  }
  return out;
}

UncertaintyScores EdlAleatoricUncertainty(const BetaParams& params) {
  UncertaintyScores out{ScoreKind::kEdlAU, ScoreShape::kPerClass,
                        Matrix(params.samples(), params.classes())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double a = params.alpha().values()[i];
    const double b = params.beta().values()[i];
    out.values.values()[i] = decomposition::BinaryEntropy(a / (a + b));
  }
  return out;
}

EdlEpistemic EdlEpistemicUncertainty(const BetaParams& params) {
  const UncertaintyScores pu = EdlPredictiveUncertainty(params);
  const UncertaintyScores au = EdlAleatoricUncertainty(params);
  EdlEpistemic out{{ScoreKind::kEdlEU, ScoreShape::kPerClass, Matrix(pu.samples(), pu.classes())},
                   std::vector<bool>(pu.values.size(), false),
                   0};
  for (std::size_t i = 0; i < pu.values.size(); ++i) {
    const double eu = pu.values.values()[i] - au.values.values()[i];
    out.scores.values.values()[i] = eu;
    if (eu < 0.0) {
      out.negative[i] = true;
      ++out.negative_count;
    }
  }
  return out;
}

}  // namespace uqbench::edl
