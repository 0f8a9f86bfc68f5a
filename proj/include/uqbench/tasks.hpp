#pragma once

// The six benchmark evaluators. Uncertain (-1) annotations are only
// meaningful for task 2; tasks 3-6 mask those cells out.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqbench/metrics.hpp"
#include "uqbench/tensor.hpp"

namespace uqbench::tasks {

inline constexpr double kDecisionThreshold = 0.5;

// Raised when a task cannot be evaluated on the given data (as opposed to
// malformed arguments, which raise std::invalid_argument).
class TaskError : public std::runtime_error {
 public:
  TaskError(int task, const std::string& what)
      : std::runtime_error(what), task_(task) {}
  int task() const { return task_; }

 private:
  int task_;
};

struct TaskResult {
  int task = 0;
  // "auroc", "macro_auroc", "auac", "ece", "mce".
  std::string metric;
  double value = 0.0;
  // Empty for tasks evaluated on a single per-sample score.
  std::vector<std::optional<double>> per_class;
  // Which uncertainty produced the score; calibration tasks use the BMA and
  // record std::nullopt.
  std::optional<ScoreKind> score_kind;
  std::vector<std::size_t> skipped_classes;
  std::size_t evaluated_samples = 0;
};

// Task 1: AUROC of per-sample scores against OOD labels (0 = ID, 1 = OOD).
TaskResult Task1Ood(const UncertaintyScores& scores, std::span<const std::int8_t> ood_labels);

// Task 2 helpers, exposed for tests.
// Samples with at least one -1 label.
std::vector<std::size_t> Task2RetainedSamples(const LabelTensor& labels);
// -1 -> 1 (uncertain), 0 and 1 -> 0 (certain).
LabelTensor Task2Targets(const LabelTensor& labels);

// Task 2: macro AUROC of per-class scores against the uncertain-label
// targets, on samples with at least one -1 label.
TaskResult Task2UncertaintyLabels(const UncertaintyScores& scores, const LabelTensor& labels);

struct Correctness {
  // N x C, 1 where the thresholded BMA agrees with the label.
  Matrix correct;
  // N x C, 0 for -1 cells.
  std::vector<std::uint8_t> valid;
};

// A BMA equal to the threshold counts as a positive prediction.
Correctness DeriveCorrectness(const Matrix& bma, const LabelTensor& labels,
                              double threshold = kDecisionThreshold);

// Per-sample mean correctness over valid cells. Samples without any valid
// cell are reported through `included` = 0.
struct SampleCorrectness {
  std::vector<double> values;
  std::vector<std::uint8_t> included;
};
SampleCorrectness PerSampleCorrectness(const Correctness& correctness);

// Task 3: per class, AUROC of the uncertainty for predicting an error.
TaskResult Task3Correctness(const UncertaintyScores& scores, const Matrix& bma,
                            const LabelTensor& labels);

// Task 4: AUAC of per-sample scores against per-sample correctness.
TaskResult Task4Abstain(const UncertaintyScores& scores, const Matrix& bma,
                        const LabelTensor& labels, double step = metrics::kDefaultAuacStep);

struct CalibrationReport {
  std::size_t bins = metrics::kDefaultCalibrationBins;
  metrics::CalibrationMode mode = metrics::CalibrationMode::kConfidence;
  // nullopt for classes without any valid cell.
  std::vector<std::optional<metrics::Calibration>> per_class;
  std::vector<std::size_t> skipped_classes;
  double macro_ece = 0.0;
  double macro_mce = 0.0;
};

// Tasks 5 and 6: per-class ECE and MCE of the BMA, macro-averaged.
CalibrationReport Task5Task6Calibration(
    const Matrix& bma, const LabelTensor& labels,
    std::size_t bins = metrics::kDefaultCalibrationBins,
    metrics::CalibrationMode mode = metrics::CalibrationMode::kConfidence);

// TaskResult views of a calibration report (task 5 = ECE, task 6 = MCE).
TaskResult Task5Result(const CalibrationReport& report);
TaskResult Task6Result(const CalibrationReport& report);

}  // namespace uqbench::tasks
