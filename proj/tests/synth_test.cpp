#include "uqbench/synth.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "uqbench/tasks.hpp"

namespace uqbench::synth {
namespace {

SynthConfig Small(std::uint64_t seed = 3) {
  SynthConfig cfg;
  cfg.samples = 400;
  cfg.classes = 6;
  cfg.members = 5;
  cfg.seed = seed;
  return cfg;
}

double MeanOf(const UncertaintyScores& s) {
  double sum = 0.0;
  for (double v : s.values.values()) sum += v;
  return sum / static_cast<double>(s.values.size());
}

TEST(Generate, Deterministic) {
  const SynthData a = Generate(Small());
  const SynthData b = Generate(Small());
  EXPECT_EQ(a.predictions, b.predictions);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.ood_labels, b.ood_labels);
  EXPECT_EQ(a.truth.aleatoric, b.truth.aleatoric);
  EXPECT_EQ(a.truth.epistemic, b.truth.epistemic);
  EXPECT_NE(Generate(Small(4)).predictions, a.predictions);
}

TEST(Generate, ZeroNoiseHasNoEpistemic) {
  SynthConfig cfg = Small();
  cfg.epistemic_std = 0.0;
  const auto d = decomposition::Decompose(Generate(cfg).predictions);
  for (double eu : d.eu.values.values()) EXPECT_NEAR(eu, 0.0, 1e-12);
}

TEST(Generate, SymmetricBetaCentersLatent) {
  SynthConfig cfg = Small();
  cfg.samples = 5000;
  cfg.aleatoric_a = cfg.aleatoric_b = 3.0;
  const SynthData data = Generate(cfg);
  double mean = 0.0;
  for (double p : data.truth.latent.values()) mean += p;
  mean /= static_cast<double>(data.truth.latent.size());
  EXPECT_NEAR(mean, 0.5, 0.01);
}

TEST(Generate, UncertainLabelsOnHighestEntropyCells) {
  SynthConfig cfg = Small();
  cfg.label_uncertain_rate = 0.1;
  const SynthData data = Generate(cfg);
  std::size_t count = 0;
  double min_flagged = 1.0, max_other = 0.0;
  for (std::size_t n = 0; n < cfg.samples; ++n) {
    for (std::size_t c = 0; c < cfg.classes; ++c) {
      const double h = decomposition::BinaryEntropy(data.truth.latent(n, c));
      if (data.labels(n, c) == -1) {
        ++count;
        min_flagged = std::min(min_flagged, h);
      } else {
        max_other = std::max(max_other, h);
      }
    }
  }
  EXPECT_EQ(count, static_cast<std::size_t>(std::llround(0.1 * cfg.samples * cfg.classes)));
  EXPECT_GE(min_flagged, max_other);
}

TEST(Generate, PlantedOodRegimeSeparatesWithEpistemic) {
  const SynthData data = Generate(PlantedOodRegime());
  const auto d = decomposition::Decompose(data.predictions);
  const double auroc_eu = tasks::Task1Ood(decomposition::AggregateClasses(d.eu), data.ood_labels).value;
  const double auroc_au = tasks::Task1Ood(decomposition::AggregateClasses(d.au), data.ood_labels).value;
  EXPECT_GE(auroc_eu, 0.95);
  EXPECT_GT(auroc_eu - auroc_au, 0.0);
}

TEST(GenerateProperty, EpistemicMonotoneInNoise) {
  double previous = -1.0;
  for (double s : {0.0, 0.1, 0.3, 0.6, 1.0, 2.0}) {
    SynthConfig cfg = Small();
    cfg.epistemic_std = s;
    const double mean_eu = MeanOf(decomposition::Decompose(Generate(cfg).predictions).eu);
    EXPECT_GE(mean_eu, previous) << s;
    previous = mean_eu;
  }
}

// Beta(k, k) piles mass around 0.5 as k grows, so the latent entropy and the
// estimated AU both rise with concentration.
TEST(GenerateProperty, ConcentrationRaisesAleatoric) {
  double prev_truth = 0.0, prev_au = 0.0;
  for (double k : {0.3, 0.7, 1.5, 4.0, 10.0}) {
    SynthConfig cfg = Small();
    cfg.aleatoric_a = cfg.aleatoric_b = k;
    const SynthData data = Generate(cfg);
    double truth = 0.0;
    for (double v : data.truth.aleatoric) truth += v;
    truth /= static_cast<double>(cfg.samples);
    const double au = MeanOf(decomposition::Decompose(data.predictions).au);
    EXPECT_GT(truth, prev_truth) << k;
    EXPECT_GT(au, prev_au) << k;
    prev_truth = truth;
    prev_au = au;
  }
}

TEST(FactorRecovery, DiagonalBeatsCross) {
  SynthConfig cfg = Small();
  cfg.samples = 3000;
  cfg.aleatoric_a = cfg.aleatoric_b = 0.5;
  const SynthData data = Generate(cfg);
  const FactorRecovery r = FactorRecoveryReport(data.predictions, data.truth);
  ASSERT_TRUE(r.eu_recoverable);
  EXPECT_GT(*r.au_vs_aleatoric, std::abs(*r.au_vs_epistemic));
  EXPECT_GT(*r.eu_vs_epistemic, std::abs(*r.eu_vs_aleatoric));
}

TEST(FactorRecovery, ConstantNoiseIsUndefined) {
  SynthConfig cfg = Small();
  cfg.ood_fraction = 0.0;
  const SynthData data = Generate(cfg);
  const FactorRecovery r = FactorRecoveryReport(data.predictions, data.truth);
  EXPECT_FALSE(r.eu_vs_epistemic);
  EXPECT_FALSE(r.au_vs_epistemic);
}

TEST(FactorRecovery, SingleMemberFlagged) {
  SynthConfig cfg = Small();
  cfg.members = 1;
  const SynthData data = Generate(cfg);
  const FactorRecovery r = FactorRecoveryReport(data.predictions, data.truth);
  EXPECT_FALSE(r.eu_recoverable);
  EXPECT_FALSE(r.eu_vs_epistemic);
  EXPECT_TRUE(r.au_vs_aleatoric);
}

TEST(Validate, RejectsBadConfigs) {
  auto with = [](auto mutate) {
    SynthConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(Validate(with([](SynthConfig& c) { c.samples = 0; })), std::invalid_argument);
  EXPECT_THROW(Validate(with([](SynthConfig& c) { c.aleatoric_a = 0.0; })), std::invalid_argument);
  EXPECT_THROW(Validate(with([](SynthConfig& c) { c.epistemic_std = -1.0; })), std::invalid_argument);
  EXPECT_THROW(Validate(with([](SynthConfig& c) { c.ood_fraction = 1.5; })), std::invalid_argument);
  EXPECT_THROW(Validate(with([](SynthConfig& c) { c.coupling = -0.1; })), std::invalid_argument);
  EXPECT_NO_THROW(Validate(SynthConfig{}));
}

}  // namespace
}  // namespace uqbench::synth
