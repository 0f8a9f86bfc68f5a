#include "uqbench/tasks.hpp"

#include <algorithm>

namespace uqbench::tasks {

namespace {

void RequireShape(const Matrix& m, const LabelTensor& labels, const char* what) {
  if (m.rows() != labels.samples() || m.cols() != labels.classes()) {
    throw std::invalid_argument(std::string(what) + ": shape " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " does not match labels " +
                                std::to_string(labels.samples()) + "x" +
                                std::to_string(labels.classes()));
  }
}

void RequirePerClass(const UncertaintyScores& scores, const char* what) {
  if (scores.shape != ScoreShape::kPerClass) {
    throw std::invalid_argument(std::string(what) + ": per-class scores required");
  }
}

TaskResult FromMacro(int task, const metrics::MacroAuroc& macro, ScoreKind kind,
                     std::size_t samples) {
  if (!macro.value) {
    throw TaskError(task, "task " + std::to_string(task) + ": AUROC undefined for every class");
  }
  TaskResult result;
  result.task = task;
  result.metric = "macro_auroc";
  result.value = *macro.value;
  result.per_class = macro.per_class;
  result.score_kind = kind;
  result.skipped_classes = macro.skipped_classes;
  result.evaluated_samples = samples;
  return result;
}

}  // namespace

TaskResult Task1Ood(const UncertaintyScores& scores, std::span<const std::int8_t> ood_labels) {
  const std::vector<double> values = scores.per_sample();
  if (values.size() != ood_labels.size()) {
    throw std::invalid_argument("task 1: score and OOD label counts differ");
  }
  std::vector<double> targets(ood_labels.size());
  for (std::size_t i = 0; i < ood_labels.size(); ++i) {
    if (ood_labels[i] != 0 && ood_labels[i] != 1) {
      throw std::invalid_argument("task 1: OOD labels must be 0 (ID) or 1 (OOD)");
    }
    targets[i] = ood_labels[i];
  }
  const std::optional<double> auroc = metrics::Auroc(values, targets);
  if (!auroc) throw TaskError(1, "task 1: OOD labels contain a single class");
  TaskResult result;
  result.task = 1;
  result.metric = "auroc";
  result.value = *auroc;
  result.score_kind = scores.kind;
  result.evaluated_samples = values.size();
  return result;
}

std::vector<std::size_t> Task2RetainedSamples(const LabelTensor& labels) {
  std::vector<std::size_t> retained;
  for (std::size_t n = 0; n < labels.samples(); ++n) {
    for (std::size_t c = 0; c < labels.classes(); ++c) {
      if (labels(n, c) == LabelTensor::kUncertain) {
        retained.push_back(n);
        break;
      }
    }
  }
  return retained;
}

LabelTensor Task2Targets(const LabelTensor& labels) {
  std::vector<std::int8_t> mapped(labels.values().begin(), labels.values().end());
  for (std::int8_t& v : mapped) v = v == LabelTensor::kUncertain ? 1 : 0;
  return LabelTensor(labels.samples(), labels.classes(), std::move(mapped));
}

TaskResult Task2UncertaintyLabels(const UncertaintyScores& scores, const LabelTensor& labels) {
  RequirePerClass(scores, "task 2");
  RequireShape(scores.values, labels, "task 2");
  const std::vector<std::size_t> retained = Task2RetainedSamples(labels);
  if (retained.empty()) {
    throw TaskError(2, "task 2 filter: no sample has an uncertain (-1) label");
  }
  const std::size_t n_classes = labels.classes();
  Matrix s(retained.size(), n_classes);
  Matrix t(retained.size(), n_classes);
  for (std::size_t r = 0; r < retained.size(); ++r) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      s(r, c) = scores.values(retained[r], c);
      t(r, c) = labels(retained[r], c) == LabelTensor::kUncertain ? 1.0 : 0.0;
    }
  }
  return FromMacro(2, metrics::MacroAurocPerClass(s, t), scores.kind, retained.size());
}

Correctness DeriveCorrectness(const Matrix& bma, const LabelTensor& labels, double threshold) {
  RequireShape(bma, labels, "correctness");
  Correctness out{Matrix(bma.rows(), bma.cols()), std::vector<std::uint8_t>(bma.size(), 0)};
  for (std::size_t n = 0; n < bma.rows(); ++n) {
    for (std::size_t c = 0; c < bma.cols(); ++c) {
      const std::int8_t y = labels(n, c);
      if (y == LabelTensor::kUncertain) continue;
      out.valid[n * bma.cols() + c] = 1;
      const bool predicted_positive = bma(n, c) >= threshold;
      out.correct(n, c) = predicted_positive == (y == LabelTensor::kPositive) ? 1.0 : 0.0;
    }
  }
  return out;
}

SampleCorrectness PerSampleCorrectness(const Correctness& correctness) {
  const std::size_t rows = correctness.correct.rows();
  const std::size_t cols = correctness.correct.cols();
  SampleCorrectness out{std::vector<double>(rows, 0.0), std::vector<std::uint8_t>(rows, 0)};
  for (std::size_t n = 0; n < rows; ++n) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (correctness.valid[n * cols + c] == 0) continue;
      sum += correctness.correct(n, c);
      ++count;
    }
    if (count > 0) {
      out.values[n] = sum / static_cast<double>(count);
      out.included[n] = 1;
    }
  }
  return out;
}

TaskResult Task3Correctness(const UncertaintyScores& scores, const Matrix& bma,
                            const LabelTensor& labels) {
  RequirePerClass(scores, "task 3");
  RequireShape(scores.values, labels, "task 3");
  const Correctness correctness = DeriveCorrectness(bma, labels);
  Matrix incorrect(bma.rows(), bma.cols());
  for (std::size_t i = 0; i < incorrect.size(); ++i) {
    incorrect.values()[i] = 1.0 - correctness.correct.values()[i];
  }
  return FromMacro(3, metrics::MacroAurocPerClass(scores.values, incorrect, correctness.valid),
                   scores.kind, labels.samples());
}

TaskResult Task4Abstain(const UncertaintyScores& scores, const Matrix& bma,
                        const LabelTensor& labels, double step) {
  const std::vector<double> values = scores.per_sample();
  if (values.size() != labels.samples()) {
    throw std::invalid_argument("task 4: score and label sample counts differ");
  }
  const SampleCorrectness per_sample = PerSampleCorrectness(DeriveCorrectness(bma, labels));
  std::vector<double> u;
  std::vector<double> correct;
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (per_sample.included[n] == 0) continue;
    u.push_back(values[n]);
    correct.push_back(per_sample.values[n]);
  }
  if (u.empty()) throw TaskError(4, "task 4: no sample has a non-uncertain label");
  TaskResult result;
  result.task = 4;
  result.metric = "auac";
  result.value = metrics::Auac(u, correct, step);
  result.score_kind = scores.kind;
  result.evaluated_samples = u.size();
  return result;
}

CalibrationReport Task5Task6Calibration(const Matrix& bma, const LabelTensor& labels,
                                        std::size_t bins, metrics::CalibrationMode mode) {
  RequireShape(bma, labels, "calibration");
  CalibrationReport report;
  report.bins = bins;
  report.mode = mode;
  report.per_class.resize(labels.classes());
  double ece_sum = 0.0;
  double mce_sum = 0.0;
  std::size_t defined = 0;
  std::vector<double> p;
  std::vector<double> y;
  for (std::size_t c = 0; c < labels.classes(); ++c) {
    p.clear();
    y.clear();
    for (std::size_t n = 0; n < labels.samples(); ++n) {
      if (labels(n, c) == LabelTensor::kUncertain) continue;
      p.push_back(bma(n, c));
      y.push_back(labels(n, c));
    }
    if (p.empty()) {
      report.skipped_classes.push_back(c);
      continue;
    }
    report.per_class[c] = metrics::CalibrationError(p, y, bins, mode);
    ece_sum += report.per_class[c]->ece;
    mce_sum += report.per_class[c]->mce;
    ++defined;
  }
  if (defined == 0) throw TaskError(5, "calibration: no class has a non-uncertain label");
  report.macro_ece = ece_sum / static_cast<double>(defined);
  report.macro_mce = mce_sum / static_cast<double>(defined);
  return report;
}

namespace {

TaskResult CalibrationResult(const CalibrationReport& report, int task) {
  TaskResult result;
  result.task = task;
  result.metric = task == 5 ? "ece" : "mce";
  result.value = task == 5 ? report.macro_ece : report.macro_mce;
  result.skipped_classes = report.skipped_classes;
  for (const auto& cls : report.per_class) {
    if (cls) {
      result.per_class.emplace_back(task == 5 ? cls->ece : cls->mce);
    } else {
      result.per_class.emplace_back(std::nullopt);
    }
  }
  std::size_t samples = 0;
  for (const auto& cls : report.per_class) {
    if (!cls) continue;
    std::size_t count = 0;
    for (const auto& bin : cls->bins) count += bin.count;
    samples = std::max(samples, count);
  }
  result.evaluated_samples = samples;
  return result;
}

}  // namespace

TaskResult Task5Result(const CalibrationReport& report) { return CalibrationResult(report, 5); }
TaskResult Task6Result(const CalibrationReport& report) { return CalibrationResult(report, 6); }

}  // namespace uqbench::tasks
