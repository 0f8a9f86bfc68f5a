#include "uqbench/edl.hpp"

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <gtest/gtest.h>

#include "uqbench/decomposition.hpp"

namespace uqbench::edl {
namespace {

const double kLn2 = std::log(2.0);

BetaParams One(double a, double b) { return BetaParams(Matrix(1, 1, a), Matrix(1, 1, b)); }

// KL(Beta(a,b) || U(0,1)) = integral of f ln f over (0,1), by double-exponential
// quadrature. The complement argument keeps ln(1-p) accurate near p = 1.
double KlQuadrature(double a, double b) {
  const double log_b = std::log(boost::math::beta(a, b));
  auto integrand = [&](double x, double xc) {
    const double log_p = x < 0.5 ? std::log(x) : std::log1p(-xc);
    const double log_q = x < 0.5 ? std::log1p(-x) : std::log(xc);
    const double log_f = (a - 1.0) * log_p + (b - 1.0) * log_q - log_b;
    return std::exp(log_f) * log_f;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(integrand, 0.0, 1.0);
}

TEST(Digamma, PublishedValues) {
  EXPECT_NEAR(Digamma(1.0), -0.5772156649015329, 1e-14);
  EXPECT_NEAR(Digamma(2.0), 0.4227843350984671, 1e-14);
  EXPECT_NEAR(Digamma(2.0) - Digamma(1.0), 1.0, 1e-15);
}

TEST(Digamma, MatchesBoostAcrossRange) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_x(std::log(1e-3), std::log(1e6));
  for (int i = 0; i < 2000; ++i) {
    const double x = std::exp(log_x(rng));
    EXPECT_NEAR(Digamma(x), boost::math::digamma(x), 1e-12) << x;
    EXPECT_NEAR(Trigamma(x), boost::math::trigamma(x), 1e-9 * std::max(1.0, boost::math::trigamma(x)))
        << x;
  }
}

TEST(Annealing, Schedule) {
  EXPECT_EQ(AnnealingCoefficient(0.0), 0.0);
  EXPECT_DOUBLE_EQ(AnnealingCoefficient(5.0), 0.5);
  EXPECT_EQ(AnnealingCoefficient(25.0), 1.0);
  EXPECT_DOUBLE_EQ(AnnealingCoefficient(2.0, 4.0), 0.5);
}

TEST(BetaEdlLoss, UniformEvidenceExample) {
  const EdlLossTerms t = BetaEdlLoss(One(1.0, 1.0), Matrix(1, 1, 1.0), 0.0);
  EXPECT_NEAR(t.squared_error, 0.25, 1e-15);
  EXPECT_NEAR(t.variance_term, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(t.total, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.variance_term, 0.0833333, 5e-8);
}

TEST(BetaEdlLoss, KlVanishesForUniformEvidence) {
  for (double y : {0.0, 1.0}) {
    const EdlLossTerms t = BetaEdlLoss(One(1.0, 1.0), Matrix(1, 1, y), 5.0);
    EXPECT_NEAR(t.kl_term, 0.0, 1e-15);
  }
}

TEST(BetaEdlLoss, ConfidentCorrectLimit) {
  double previous = 1.0;
  for (double a : {10.0, 1e2, 1e3, 1e4, 1e6}) {
    const double total = BetaEdlLoss(One(a, 1.0), Matrix(1, 1, 1.0), 0.0).total;
    EXPECT_LT(total, previous);
    previous = total;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(BetaEdlLoss, RejectsNonBinaryLabels) {
  EXPECT_THROW(BetaEdlLoss(One(1.0, 1.0), Matrix(1, 1, -1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(BetaEdlLoss(One(1.0, 1.0), Matrix(1, 2, 1.0), 0.0), std::invalid_argument);
}

TEST(BetaEdlLossProperty, DecreasingInCorrectEvidence) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.5, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double b = u(rng);
    double previous = std::numeric_limits<double>::infinity();
    for (double a = 0.5; a < 60.0; a *= 1.3) {
      const double total = BetaEdlLoss(One(a, b), Matrix(1, 1, 1.0), 0.0).total;
      EXPECT_LT(total, previous) << "a=" << a << " b=" << b;
      previous = total;
    }
  }
}

TEST(BetaEdlLossProperty, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.5, 50.0);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  const std::size_t n = 3, c = 4;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix alpha(n, c), beta(n, c), y(n, c);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      alpha.values()[i] = u(rng);
      beta.values()[i] = u(rng);
      y.values()[i] = (rng() & 1) ? 1.0 : 0.0;
    }
    const double lambda = lam(rng);
    const EdlLossGradient g = BetaEdlLossGradient(BetaParams(alpha, beta), y, lambda);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (int which = 0; which < 2; ++which) {
        Matrix& target = which == 0 ? alpha : beta;
        const double x0 = target.values()[i];
        const double h = 1e-5 * x0;
        target.values()[i] = x0 + h;
        const double up = BetaEdlLoss(BetaParams(alpha, beta), y, lambda).total;
        target.values()[i] = x0 - h;
        const double down = BetaEdlLoss(BetaParams(alpha, beta), y, lambda).total;
        target.values()[i] = x0;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = which == 0 ? g.d_alpha.values()[i] : g.d_beta.values()[i];
        const double scale = std::max(std::abs(analytic), 1e-6);
        EXPECT_LE(std::abs(numeric - analytic) / scale, 1e-4)
            << (which == 0 ? "alpha" : "beta") << " cell " << i << " analytic=" << analytic
            << " numeric=" << numeric;
      }
    }
  }
}

TEST(KlBetaUniform, ZeroAtUniform) {
  EXPECT_NEAR(KlBetaUniform(One(1.0, 1.0))(0, 0), 0.0, 1e-15);
}

TEST(KlBetaUniform, MatchesQuadrature) {
  EXPECT_NEAR(KlBetaUniform(One(2.0, 1.0))(0, 0), KlQuadrature(2.0, 1.0), 1e-6);
  // Closed form for Beta(2,1): ln 2 - 1/2.
  EXPECT_NEAR(KlBetaUniform(One(2.0, 1.0))(0, 0), kLn2 - 0.5, 1e-12);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_NEAR(KlBetaUniform(One(a, b))(0, 0), KlQuadrature(a, b), 1e-6) << a << "," << b;
  }
}

TEST(KlBetaUniform, PositiveAwayFromUniform) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.05, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng);
    const double kl = KlBetaUniform(One(a, b))(0, 0);
    EXPECT_GE(kl, 0.0);
    if (std::abs(a - 1.0) > 0.05 || std::abs(b - 1.0) > 0.05) EXPECT_GT(kl, 1e-9) << a << "," << b;
  }
}

TEST(EdlUncertainty, UniformEvidence) {
  const BetaParams p = One(1.0, 1.0);
  EXPECT_NEAR(EdlPredictiveUncertainty(p).values(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(EdlAleatoricUncertainty(p).values(0, 0), kLn2, 1e-15);
  EXPECT_NEAR(EdlEpistemicUncertainty(p).scores.values(0, 0), 1.0 - kLn2, 1e-12);
  EXPECT_NEAR(EdlEpistemicUncertainty(p).scores.values(0, 0), 0.306853, 5e-7);
}

TEST(EdlUncertainty, AleatoricFromMean) {
  EXPECT_NEAR(EdlAleatoricUncertainty(One(9.0, 1.0)).values(0, 0), 0.325083, 5e-7);
  EXPECT_NEAR(EdlAleatoricUncertainty(One(9.0, 1.0)).values(0, 0),
              decomposition::BinaryEntropy(0.9), 1e-15);
}

TEST(EdlUncertainty, AleatoricScaleInvariant) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    const double base = EdlAleatoricUncertainty(One(a, b)).values(0, 0);
    for (double k : {2.0, 10.0, 100.0}) {
      EXPECT_NEAR(EdlAleatoricUncertainty(One(k * a, k * b)).values(0, 0), base, 1e-15);
    }
  }
}

// Along alpha = beta = k the predictive term falls monotonically towards
// ln 2 (psi(2k) - psi(k) -> ln 2), so the epistemic difference tends to 0.
TEST(EdlUncertainty, LargeSymmetricEvidence) {
  double previous = std::numeric_limits<double>::infinity();
  for (double k = 0.5; k <= 1e6; k *= 2.0) {
    const double pu = EdlPredictiveUncertainty(One(k, k)).values(0, 0);
    EXPECT_LT(pu, previous) << k;
    EXPECT_GT(pu, kLn2);
    previous = pu;
  }
  EXPECT_NEAR(EdlPredictiveUncertainty(One(1e6, 1e6)).values(0, 0), kLn2, 1e-6);
  EXPECT_NEAR(EdlEpistemicUncertainty(One(1000.0, 1000.0)).scores.values(0, 0), 0.0, 1e-3);
  EXPECT_NEAR(EdlEpistemicUncertainty(One(1e6, 1e6)).scores.values(0, 0), 0.0, 1e-6);
}

TEST(EdlUncertainty, NegativeEpistemicIsFlagged) {
  // Skewed evidence pushes the paper's predictive term below the entropy of
  // the mean.
  const BetaParams p(Matrix(1, 2, {1.0, 50.0}), Matrix(1, 2, {1.0, 0.6}));
  const EdlEpistemic eu = EdlEpistemicUncertainty(p);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_EQ(eu.negative[c], eu.scores.values(0, c) < 0.0);
  }
  std::size_t count = 0;
  for (bool b : eu.negative) count += b;
  EXPECT_EQ(eu.negative_count, count);
}

TEST(BetaParams, Validation) {
  EXPECT_THROW(One(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(One(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(One(std::numeric_limits<double>::infinity(), 1.0), std::invalid_argument);
  EXPECT_THROW(BetaParams(Matrix(1, 2, 1.0), Matrix(1, 1, 1.0)), std::invalid_argument);
}

}  // namespace
}  // namespace uqbench::edl
