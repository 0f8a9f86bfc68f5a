#include "uqbench/metrics.hpp"

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

namespace uqbench::metrics {
namespace {

// Pairwise oracle: twice the concordant count plus ties, over 2 P N.
std::optional<double> BruteAuroc(const std::vector<double>& s, const std::vector<double>& y) {
  std::uint64_t twice = 0, pos = 0, neg = 0;
  for (double l : y) (l == 1.0 ? pos : neg)++;
  if (pos == 0 || neg == 0) return std::nullopt;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1.0) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0.0) continue;
      twice += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

// Binning oracle: explicit interval membership, long double accumulation.
std::pair<double, double> BruteCalibration(const std::vector<double>& p, const std::vector<double>& y,
                                           std::size_t bins, CalibrationMode mode) {
  long double ece = 0.0L;
  double mce = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) / static_cast<double>(bins);
    const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    long double conf = 0.0L, acc = 0.0L;
    std::size_t count = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double stat = p[i], hit = y[i];
      if (mode == CalibrationMode::kConfidence) {
        stat = p[i] >= 0.5 ? p[i] : 1.0 - p[i];
        hit = ((p[i] >= 0.5) == (y[i] == 1.0)) ? 1.0 : 0.0;
      }
      const bool inside = stat >= lo && (stat < hi || (b + 1 == bins && stat <= 1.0));
      if (!inside) continue;
      conf += stat;
      acc += hit;
      ++count;
    }
    if (count == 0) continue;
    const double gap = static_cast<double>(std::fabs(acc / count - conf / count));
    ece += static_cast<long double>(count) * gap / static_cast<long double>(p.size());
    mce = std::max(mce, gap);
  }
  return {static_cast<double>(ece), mce};
}

TEST(Auroc, WorkedExample) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8}, y{0, 0, 1, 1};
  EXPECT_EQ(*Auroc(s, y), 0.75);
}

TEST(Auroc, Degenerate) {
  EXPECT_EQ(*Auroc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{1, 0, 1}), 0.5);
  EXPECT_EQ(*Auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<double>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(*Auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<double>{1, 1, 0, 0}), 0.0);
  EXPECT_FALSE(Auroc(std::vector<double>{0.1, 0.2}, std::vector<double>{1, 1}));
  EXPECT_THROW(Auroc(std::vector<double>{0.1}, std::vector<double>{0.5}), std::invalid_argument);
  EXPECT_THROW(Auroc(std::vector<double>{0.1}, std::vector<double>{1, 0}), std::invalid_argument);
}

TEST(AurocProperty, EqualsPairwiseOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 500;
    const int levels = 1 + static_cast<int>(rng() % 12);  // few levels -> heavy ties
    const bool continuous = trial % 3 == 0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = continuous ? u(rng) : static_cast<double>(rng() % levels) / levels;
      y[i] = u(rng) < 0.3 ? 1.0 : 0.0;
    }
    EXPECT_EQ(Auroc(s, y), BruteAuroc(s, y));
  }
}

TEST(AurocProperty, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(200), t(200), y(200);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = static_cast<double>(rng() % 40);
      t[i] = std::exp(s[i] / 7.0) * 3.0 - 11.0;
      y[i] = (rng() & 1) ? 1.0 : 0.0;
    }
    EXPECT_EQ(Auroc(s, y), Auroc(t, y));
  }
}

TEST(MacroAuroc, MeanOfDefinedClasses) {
  // Column 0: AUROC 0.75 (worked example). Column 1: 0.5 by ties.
  const Matrix s(4, 2, {0.1, 0.2, 0.4, 0.2, 0.35, 0.2, 0.8, 0.2});
  const Matrix y(4, 2, {0, 1, 0, 0, 1, 1, 1, 0});
  const MacroAuroc m = MacroAurocPerClass(s, y);
  EXPECT_EQ(*m.per_class[0], 0.75);
  EXPECT_EQ(*m.per_class[1], 0.5);
  EXPECT_EQ(*m.value, 0.625);
}

TEST(MacroAuroc, SkipsUndefinedClass) {
  const Matrix s(4, 2, {0.1, 0.1, 0.2, 0.2, 0.8, 0.3, 0.9, 0.4});
  const Matrix y(4, 2, {0, 1, 0, 1, 1, 1, 1, 1});
  const MacroAuroc m = MacroAurocPerClass(s, y);
  EXPECT_EQ(*m.value, 1.0);
  ASSERT_EQ(m.skipped_classes.size(), 1u);
  EXPECT_EQ(m.skipped_classes[0], 1u);
  EXPECT_FALSE(m.per_class[1]);
  EXPECT_THROW(MacroAurocValue(Matrix(2, 1, {0.1, 0.2}), Matrix(2, 1, {1, 1})), std::domain_error);
}

TEST(MacroAuroc, ReplicatedColumns) {
  std::mt19937_64 rng(43);
  std::vector<double> sv, yv;
  for (int i = 0; i < 30; ++i) {
    const double s = static_cast<double>(rng() % 7), y = (rng() & 1) ? 1.0 : 0.0;
    for (int c = 0; c < 3; ++c) {
      sv.push_back(s);
      yv.push_back(y);
    }
  }
  const MacroAuroc m = MacroAurocPerClass(Matrix(30, 3, sv), Matrix(30, 3, yv));
  EXPECT_EQ(m.per_class[0], m.per_class[1]);
  EXPECT_EQ(m.per_class[0], m.per_class[2]);
  EXPECT_EQ(m.value, m.per_class[0]);
}

TEST(MacroAuroc, MaskSelectsCells) {
  const Matrix s(4, 1, {0.9, 0.1, 0.2, 0.8});
  const Matrix y(4, 1, {0, 0, 1, 1});
  const std::vector<std::uint8_t> mask{0, 1, 1, 1};
  EXPECT_EQ(*MacroAurocPerClass(s, y, mask).value, 1.0);
}

TEST(Calibration, Examples) {
  EXPECT_EQ(Ece(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)), 0.0);
  std::vector<double> p(10, 0.9), y9(10, 1.0), y5(10, 1.0);
  y9[0] = 0.0;
  for (int i = 0; i < 5; ++i) y5[i] = 0.0;
  EXPECT_NEAR(Ece(p, y9), 0.0, 1e-15);
  EXPECT_NEAR(Ece(p, y5), 0.4, 1e-15);
  EXPECT_NEAR(Mce(p, y5), 0.4, 1e-15);
  // Positive mode on the same data: bin value 0.9, positive rate 0.5.
  EXPECT_NEAR(Ece(p, y5, 15, CalibrationMode::kPositive), 0.4, 1e-15);
}

TEST(Calibration, BinEdges) {
  const Calibration c = CalibrationError(std::vector<double>{0.0, 1.0, 0.5}, std::vector<double>{1, 1, 0},
                                         10, CalibrationMode::kPositive);
  EXPECT_EQ(c.bins[0].count, 1u);
  EXPECT_EQ(c.bins[5].count, 1u);
  EXPECT_EQ(c.bins[9].count, 1u);
  EXPECT_THROW(Ece(std::vector<double>{1.2}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(Ece(std::vector<double>{0.2}, std::vector<double>{1}, 0), std::invalid_argument);
}

TEST(CalibrationProperty, MatchesBinningOracle) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    const std::size_t bins = 1 + rng() % 30;
    const CalibrationMode mode = trial % 2 ? CalibrationMode::kPositive : CalibrationMode::kConfidence;
    std::vector<double> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = u(rng);
      p[i] = r < 0.05 ? 0.0 : (r < 0.1 ? 1.0 : (r < 0.15 ? 0.5 : u(rng)));
      y[i] = u(rng) < p[i] ? 1.0 : 0.0;
    }
    const Calibration c = CalibrationError(p, y, bins, mode);
    const auto [ece, mce] = BruteCalibration(p, y, bins, mode);
    EXPECT_NEAR(c.ece, ece, 1e-12);
    EXPECT_NEAR(c.mce, mce, 1e-12);
    EXPECT_GE(c.mce, c.ece);
  }
}

TEST(Auac, WorkedExample) {
  const std::vector<double> correct{1, 1, 0, 0}, u{0.1, 0.2, 0.9, 0.8};
  const AccuracyCoverage curve = AccuracyCoverageCurve(u, correct, 0.25);
  ASSERT_EQ(curve.coverage.size(), 4u);
  const double expected_acc[] = {0.5, 2.0 / 3.0, 1.0, 1.0};
  const double expected_cov[] = {1.0, 0.75, 0.5, 0.25};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(curve.coverage[i], expected_cov[i], 1e-15);
    EXPECT_NEAR(curve.accuracy[i], expected_acc[i], 1e-15);
  }
  // ((0.5 + 2/3)/2 + (2/3 + 1)/2 + 1) * 0.25 / 0.75
  const double hand = ((0.5 + 2.0 / 3.0) / 2.0 + (2.0 / 3.0 + 1.0) / 2.0 + 1.0) * 0.25 / 0.75;
  EXPECT_NEAR(curve.auac, hand, 1e-15);
  EXPECT_NEAR(curve.auac, 0.80556, 1e-5);
}

TEST(Auac, PerfectAndConstant) {
  std::mt19937_64 rng(45);
  std::vector<double> u(37), ones(37, 1.0), c(37);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = static_cast<double>(rng() % 100);
    c[i] = (rng() % 3) ? 1.0 : 0.0;
  }
  EXPECT_NEAR(Auac(u, ones), 1.0, 1e-15);
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= static_cast<double>(c.size());
  EXPECT_NEAR(Auac(std::vector<double>(37, 0.4), c), mean, 1e-12);
}

TEST(Auac, OracleOrderingHelps) {
  std::mt19937_64 rng(46);
  std::vector<double> c(101), u(101);
  double mean = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = (rng() % 4) ? 1.0 : 0.0;
    u[i] = 1.0 - c[i];
    mean += c[i];
  }
  mean /= static_cast<double>(c.size());
  EXPECT_GE(Auac(u, c), mean);
}

TEST(AuacProperty, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng() % 200;
    std::vector<double> u(n), t(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = static_cast<double>(rng() % 30);
      t[i] = std::exp(u[i] / 5.0) + 2.0;
      c[i] = (rng() & 1) ? 1.0 : 0.0;
    }
    EXPECT_EQ(Auac(u, c), Auac(t, c));
  }
}

TEST(Auac, Validation) {
  EXPECT_THROW(Auac(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Auac(std::vector<double>{0.1}, std::vector<double>{1}, 0.0), std::invalid_argument);
  EXPECT_THROW(Auac(std::vector<double>{0.1}, std::vector<double>{1}, 0.7), std::invalid_argument);
}

TEST(Spearman, Examples) {
  const std::vector<double> x{1, 2, 3, 4, 5}, neg{-1, -2, -3, -4, -5};
  EXPECT_NEAR(*Spearman(x, x), 1.0, 1e-15);
  EXPECT_NEAR(*Spearman(x, neg), -1.0, 1e-15);
  EXPECT_NEAR(*Spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 2}), -0.5, 1e-15);
  EXPECT_FALSE(Spearman(x, std::vector<double>(5, 2.0)));
  EXPECT_THROW(Spearman(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}

TEST(MidRanks, Ties) {
  const std::vector<double> r = MidRanks(std::vector<double>{3, 1, 3, 2});
  EXPECT_EQ(r, (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(SpearmanProperty, RankInvarianceAndSymmetry) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 100;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng() % 20);
      y[i] = static_cast<double>(rng() % 20) + 0.1 * x[i];
    }
    const auto a = Spearman(x, y);
    const auto b = Spearman(y, x);
    const auto c = Spearman(MidRanks(x), MidRanks(y));
    ASSERT_EQ(a.has_value(), c.has_value());
    if (!a) continue;
    EXPECT_NEAR(*a, *b, 1e-15);
    EXPECT_NEAR(*a, *c, 1e-15);
  }
}

}  // namespace
}  // namespace uqbench::metrics
