#include "uqbench/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace uqbench::tasks {
namespace {

using testing::PerClass;
using testing::PerSample;

TEST(Task1, PerfectSeparation) {
  const std::vector<std::int8_t> ood{0, 0, 1, 1};
  const TaskResult r = Task1Ood(PerSample({0.1, 0.2, 0.7, 0.9}, ScoreKind::kEU), ood);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.task, 1);
  EXPECT_EQ(r.metric, "auroc");
  EXPECT_EQ(r.score_kind, ScoreKind::kEU);
}

TEST(Task1, RandomScoresNearChance) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 4000;
  std::vector<double> s(n);
  std::vector<std::int8_t> ood(n);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = u(rng);
    ood[i] = u(rng) < 0.5;
    pos += ood[i];
  }
  const double neg = static_cast<double>(n - pos);
  const double sigma = std::sqrt((pos + neg + 1.0) / (12.0 * pos * neg));
  EXPECT_NEAR(Task1Ood(PerSample(s), ood).value, 0.5, 3.0 * sigma);
}

TEST(Task1, Errors) {
  EXPECT_THROW(Task1Ood(PerSample({0.1, 0.2}), std::vector<std::int8_t>{1, 1}), TaskError);
  EXPECT_THROW(Task1Ood(PerSample({0.1, 0.2}), std::vector<std::int8_t>{1}), std::invalid_argument);
  EXPECT_THROW(Task1Ood(PerClass(Matrix(2, 2, 0.1)), std::vector<std::int8_t>{0, 1}),
               std::invalid_argument);
}

TEST(Task2, TargetMapping) {
  const LabelTensor labels(1, 3, {-1, 0, 1});
  const LabelTensor t = Task2Targets(labels);
  EXPECT_EQ(std::vector<std::int8_t>(t.values().begin(), t.values().end()),
            (std::vector<std::int8_t>{1, 0, 0}));
}

TEST(Task2, NoUncertainLabelsIsAnError) {
  const LabelTensor labels(2, 2, {0, 1, 1, 0});
  try {
    Task2UncertaintyLabels(PerClass(Matrix(2, 2, 0.3)), labels);
    FAIL();
  } catch (const TaskError& e) {
    EXPECT_EQ(e.task(), 2);
    EXPECT_NE(std::string(e.what()).find("task 2 filter"), std::string::npos);
  }
}

TEST(Task2, FilterAndSkip) {
  // Sample 1 has no -1 and is dropped; class 1 never has -1 among retained
  // samples and is skipped.
  const LabelTensor labels(4, 3, {-1, 0, 0, 0, 1, 0, -1, 1, 0, 0, 0, -1});
  const Matrix s(4, 3, {0.9, 0.5, 0.1, 0.0, 0.0, 0.0, 0.4, 0.4, 0.2, 0.2, 0.1, 0.7});
  const TaskResult r = Task2UncertaintyLabels(PerClass(s), labels);
  EXPECT_EQ(Task2RetainedSamples(labels), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(r.evaluated_samples, 3u);
  EXPECT_EQ(r.value, 1.0);
  ASSERT_EQ(r.skipped_classes.size(), 1u);
  EXPECT_EQ(r.skipped_classes[0], 1u);
}

TEST(Task2Property, RetainedSamplesHaveUncertainLabel) {
  std::mt19937_64 rng(52);
  const LabelTensor labels = testing::RandomLabels(rng, 300, 5, 0.05);
  const auto retained = Task2RetainedSamples(labels);
  std::size_t r = 0;
  for (std::size_t n = 0; n < labels.samples(); ++n) {
    bool has = false;
    for (std::size_t c = 0; c < labels.classes(); ++c) has |= labels(n, c) == -1;
    if (has) {
      ASSERT_LT(r, retained.size());
      EXPECT_EQ(retained[r++], n);
    }
  }
  EXPECT_EQ(r, retained.size());
  for (std::int8_t v : Task2Targets(labels).values()) EXPECT_NE(v, -1);
}

TEST(Correctness, Threshold) {
  const Matrix bma(1, 4, {0.7, 0.7, 0.5, 0.2});
  const LabelTensor labels(1, 4, {1, 0, 1, -1});
  const Correctness c = DeriveCorrectness(bma, labels);
  EXPECT_EQ(c.correct(0, 0), 1.0);
  EXPECT_EQ(c.correct(0, 1), 0.0);
  EXPECT_EQ(c.correct(0, 2), 1.0);
  EXPECT_EQ(c.valid, (std::vector<std::uint8_t>{1, 1, 1, 0}));
}

struct Fixture {
  Matrix bma;
  LabelTensor labels;
  Matrix error;  // 1 - correctness
};

Fixture RandomFixture(std::uint64_t seed, std::size_t n = 200, std::size_t c = 4) {
  std::mt19937_64 rng(seed);
  Matrix bma = testing::RandomMatrix(rng, n, c);
  LabelTensor labels = testing::RandomLabels(rng, n, c, 0.05);
  const Correctness corr = DeriveCorrectness(bma, labels);
  Matrix error(n, c);
  for (std::size_t i = 0; i < error.size(); ++i) error.values()[i] = 1.0 - corr.correct.values()[i];
  return {std::move(bma), std::move(labels), std::move(error)};
}

TEST(Task3, Orientation) {
  const Fixture f = RandomFixture(53);
  EXPECT_EQ(Task3Correctness(PerClass(f.error), f.bma, f.labels).value, 1.0);
  Matrix inverted = f.error;
  for (double& v : inverted.values()) v = 1.0 - v;
  EXPECT_EQ(Task3Correctness(PerClass(inverted), f.bma, f.labels).value, 0.0);
  EXPECT_EQ(Task3Correctness(PerClass(Matrix(200, 4, 0.3)), f.bma, f.labels).value, 0.5);
}

TEST(Task4, OracleAndConstant) {
  const Fixture f = RandomFixture(54);
  const SampleCorrectness sc = PerSampleCorrectness(DeriveCorrectness(f.bma, f.labels));
  std::vector<double> oracle(sc.values.size());
  double mean = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < oracle.size(); ++n) {
    oracle[n] = 1.0 - sc.values[n];
    if (sc.included[n]) {
      mean += sc.values[n];
      ++count;
    }
  }
  mean /= static_cast<double>(count);
  EXPECT_GE(Task4Abstain(PerSample(oracle), f.bma, f.labels).value, mean);
  EXPECT_NEAR(Task4Abstain(PerSample(std::vector<double>(200, 1.0)), f.bma, f.labels).value, mean,
              1e-12);
}

TEST(Task4, WorkedExample) {
  // One class; correctness [1,1,0,0] via BMA vs labels.
  const Matrix bma(4, 1, {0.9, 0.1, 0.8, 0.3});
  const LabelTensor labels(4, 1, {1, 0, 0, 1});
  const TaskResult r = Task4Abstain(PerSample({0.1, 0.2, 0.9, 0.8}), bma, labels, 0.25);
  EXPECT_NEAR(r.value, 0.80556, 1e-5);
}

TEST(TaskProperty, InvariantUnderSampleReordering) {
  const Fixture f = RandomFixture(55, 150, 3);
  std::mt19937_64 rng(56);
  const Matrix scores = testing::RandomMatrix(rng, 150, 3);
  std::vector<double> per_sample(150);
  for (double& v : per_sample) v = static_cast<double>(rng() % 10);
  std::vector<std::int8_t> ood(150);
  for (auto& v : ood) v = rng() & 1;

  std::vector<std::size_t> order(150);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix bma_p(150, 3), scores_p(150, 3);
  std::vector<std::int8_t> labels_p(450), ood_p(150);
  std::vector<double> per_sample_p(150);
  for (std::size_t i = 0; i < 150; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      bma_p(i, c) = f.bma(order[i], c);
      scores_p(i, c) = scores(order[i], c);
      labels_p[i * 3 + c] = f.labels(order[i], c);
    }
    per_sample_p[i] = per_sample[order[i]];
    ood_p[i] = ood[order[i]];
  }
  const LabelTensor lp(150, 3, labels_p);
  EXPECT_EQ(Task1Ood(PerSample(per_sample), ood).value, Task1Ood(PerSample(per_sample_p), ood_p).value);
  EXPECT_EQ(Task2UncertaintyLabels(PerClass(scores), f.labels).value,
            Task2UncertaintyLabels(PerClass(scores_p), lp).value);
  EXPECT_EQ(Task3Correctness(PerClass(scores), f.bma, f.labels).value,
            Task3Correctness(PerClass(scores_p), bma_p, lp).value);
  EXPECT_NEAR(Task4Abstain(PerSample(per_sample), f.bma, f.labels).value,
              Task4Abstain(PerSample(per_sample_p), bma_p, lp).value, 1e-12);
  const CalibrationReport a = Task5Task6Calibration(f.bma, f.labels);
  const CalibrationReport b = Task5Task6Calibration(bma_p, lp);
  EXPECT_NEAR(a.macro_ece, b.macro_ece, 1e-12);
  EXPECT_NEAR(a.macro_mce, b.macro_mce, 1e-12);
}

TEST(Task5Task6, Examples) {
  const CalibrationReport perfect = Task5Task6Calibration(Matrix(8, 2, 1.0), LabelTensor(8, 2, std::vector<std::int8_t>(16, 1)));
  EXPECT_EQ(perfect.macro_ece, 0.0);
  EXPECT_EQ(perfect.macro_mce, 0.0);

  std::vector<std::int8_t> half(20);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = (i / 2) % 2;
  const CalibrationReport r = Task5Task6Calibration(Matrix(10, 2, 0.9), LabelTensor(10, 2, half));
  EXPECT_NEAR(Task5Result(r).value, 0.4, 1e-15);
  EXPECT_NEAR(Task6Result(r).value, 0.4, 1e-15);
  EXPECT_EQ(Task5Result(r).metric, "ece");
  EXPECT_EQ(Task6Result(r).metric, "mce");
  EXPECT_FALSE(Task5Result(r).score_kind);
}

TEST(Task5Task6, CalibratedBernoulliConverges) {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 100000, c = 2;
  Matrix bma(n, c);
  std::vector<std::int8_t> y(n * c);
  for (std::size_t i = 0; i < n * c; ++i) {
    bma.values()[i] = u(rng);
    y[i] = u(rng) < bma.values()[i] ? 1 : 0;
  }
  EXPECT_LE(Task5Task6Calibration(bma, LabelTensor(n, c, y)).macro_ece, 0.02);
}

TEST(Task5Task6, MasksUncertainAndSkipsEmptyClass) {
  const LabelTensor labels(2, 2, {1, -1, 0, -1});
  const CalibrationReport r = Task5Task6Calibration(Matrix(2, 2, 0.8), labels);
  EXPECT_EQ(r.skipped_classes, (std::vector<std::size_t>{1}));
  EXPECT_FALSE(r.per_class[1]);
  const TaskResult t = Task5Result(r);
  EXPECT_FALSE(t.per_class[1]);
  EXPECT_EQ(t.value, *t.per_class[0]);
}

}  // namespace
}  // namespace uqbench::tasks
