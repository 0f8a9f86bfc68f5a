#include "uqbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uqbench::metrics {

namespace {

void RequireSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": input lengths differ (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void RequireBinary(std::span<const double> labels, const char* what) {
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument(std::string(what) + ": labels must be 0 or 1");
  }
}

void RequireFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

// Indices sorted by value, ties kept in index order.
std::vector<std::size_t> StableOrder(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

}  // namespace

std::optional<double> Auroc(std::span<const double> scores, std::span<const double> labels) {
  RequireSameLength(scores.size(), labels.size(), "Auroc");
  RequireBinary(labels, "Auroc");
  RequireFinite(scores, "Auroc");

  const std::vector<std::size_t> order = StableOrder(scores);
  std::uint64_t positives = 0;
  // Twice the positive rank sum, so that mid-ranks stay integral.
  std::uint64_t rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t group_positives = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1.0) ++group_positives;
      ++j;
    }
    // Ranks i+1 .. j share the mean rank (i + 1 + j) / 2.
    rank_sum_x2 += group_positives * static_cast<std::uint64_t>(i + 1 + j);
    positives += group_positives;
    i = j;
  }
  const std::uint64_t negatives = order.size() - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  const std::uint64_t u_x2 = rank_sum_x2 - positives * (positives + 1);
  return static_cast<double>(u_x2) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

MacroAuroc MacroAurocPerClass(const Matrix& scores, const Matrix& targets,
                              std::span<const std::uint8_t> mask) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw std::invalid_argument("MacroAuroc: score and target shapes differ");
  }
  if (!mask.empty() && mask.size() != scores.size()) {
    throw std::invalid_argument("MacroAuroc: mask shape differs from scores");
  }
  MacroAuroc out;
  out.per_class.resize(scores.cols());
  double sum = 0.0;
  std::size_t defined = 0;
  std::vector<double> s;
  std::vector<double> t;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    s.clear();
    t.clear();
    for (std::size_t n = 0; n < scores.rows(); ++n) {
      if (!mask.empty() && mask[n * scores.cols() + c] == 0) continue;
      s.push_back(scores(n, c));
      t.push_back(targets(n, c));
    }
    out.per_class[c] = Auroc(s, t);
    if (out.per_class[c]) {
      sum += *out.per_class[c];
      ++defined;
    } else {
      out.skipped_classes.push_back(c);
    }
  }
  if (defined > 0) out.value = sum / static_cast<double>(defined);
  return out;
}

double MacroAurocValue(const Matrix& scores, const Matrix& targets,
                       std::span<const std::uint8_t> mask) {
  const MacroAuroc macro = MacroAurocPerClass(scores, targets, mask);
  if (!macro.value) throw std::domain_error("MacroAuroc: AUROC undefined for every class");
  return *macro.value;
}

CalibrationMode ParseCalibrationMode(std::string_view name) {
  if (name == "confidence") return CalibrationMode::kConfidence;
  if (name == "positive") return CalibrationMode::kPositive;
  throw std::invalid_argument("unknown calibration mode '" + std::string(name) +
                              "' (expected confidence or positive)");
}

std::string_view CalibrationModeName(CalibrationMode mode) {
  return mode == CalibrationMode::kConfidence ? "confidence" : "positive";
}

Calibration CalibrationError(std::span<const double> probs, std::span<const double> labels,
                             std::size_t bins, CalibrationMode mode) {
  RequireSameLength(probs.size(), labels.size(), "CalibrationError");
  RequireBinary(labels, "CalibrationError");
  if (probs.empty()) throw std::invalid_argument("CalibrationError: empty input");
  if (bins == 0) throw std::invalid_argument("CalibrationError: bins must be >= 1");

  const double width = 1.0 / static_cast<double>(bins);
  Calibration out;
  out.bins.resize(bins);
  std::vector<double> stat_sum(bins, 0.0);
  std::vector<double> hit_sum(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    out.bins[b].lower = static_cast<double>(b) * width;
    out.bins[b].upper = static_cast<double>(b + 1) * width;
  }

  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("CalibrationError: probability outside [0,1] at index " +
                                  std::to_string(i));
    }
    double stat = p;
    double hit = labels[i];
    if (mode == CalibrationMode::kConfidence) {
      const bool predicted_positive = p >= 0.5;
      stat = predicted_positive ? p : 1.0 - p;
      hit = (predicted_positive == (labels[i] == 1.0)) ? 1.0 : 0.0;
    }
    const auto b = std::min(static_cast<std::size_t>(stat * static_cast<double>(bins)), bins - 1);
    ++out.bins[b].count;
    stat_sum[b] += stat;
    hit_sum[b] += hit;
  }

  double weighted_gap = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    CalibrationBin& bin = out.bins[b];
    if (bin.count == 0) continue;
    const double n = static_cast<double>(bin.count);
    bin.confidence = stat_sum[b] / n;
    bin.accuracy = hit_sum[b] / n;
    const double gap = std::abs(bin.accuracy - bin.confidence);
    weighted_gap += n * gap;
    out.mce = std::max(out.mce, gap);
  }
  // A weighted mean cannot exceed its maximum; clip rounding residue.
  out.ece = std::min(weighted_gap / static_cast<double>(probs.size()), out.mce);
  return out;
}

double Ece(std::span<const double> probs, std::span<const double> labels, std::size_t bins,
           CalibrationMode mode) {
  return CalibrationError(probs, labels, bins, mode).ece;
}

double Mce(std::span<const double> probs, std::span<const double> labels, std::size_t bins,
           CalibrationMode mode) {
  return CalibrationError(probs, labels, bins, mode).mce;
}

AccuracyCoverage AccuracyCoverageCurve(std::span<const double> uncertainty,
                                       std::span<const double> correctness, double step) {
  RequireSameLength(uncertainty.size(), correctness.size(), "Auac");
  if (uncertainty.empty()) throw std::invalid_argument("Auac: empty input");
  if (!(step > 0.0 && step < 1.0)) throw std::invalid_argument("Auac: step must lie in (0, 1)");
  RequireFinite(uncertainty, "Auac");
  for (double v : correctness) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("Auac: correctness must lie in [0,1]");
  }

  constexpr double kSlack = 1e-9;
  AccuracyCoverage out;
  for (std::size_t j = 0;; ++j) {
    const double coverage = 1.0 - static_cast<double>(j) * step;
    if (coverage < step - kSlack) break;
    out.coverage.push_back(coverage);
  }
  if (out.coverage.size() < 2) {
    throw std::invalid_argument("Auac: step yields fewer than two coverage levels");
  }

  const std::size_t n = uncertainty.size();
  const std::vector<std::size_t> order = StableOrder(uncertainty);
  // Tie groups in ascending uncertainty: end offset and correctness sum.
  std::vector<std::size_t> group_end;
  std::vector<double> group_sum;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < n && uncertainty[order[j]] == uncertainty[order[i]]) sum += correctness[order[j++]];
    group_end.push_back(j);
    group_sum.push_back(sum);
    i = j;
  }

  for (double coverage : out.coverage) {
    const auto wanted = static_cast<double>(n) * coverage - kSlack;
    const std::size_t keep = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(wanted)), std::size_t{1}, n);
    double sum = 0.0;
    std::size_t begin = 0;
    for (std::size_t g = 0; g < group_end.size() && begin < keep; ++g) {
      const std::size_t size = group_end[g] - begin;
      const std::size_t taken = std::min(keep, group_end[g]) - begin;
      sum += taken == size ? group_sum[g]
                           : group_sum[g] * static_cast<double>(taken) / static_cast<double>(size);
      begin = group_end[g];
    }
    out.accuracy.push_back(sum / static_cast<double>(keep));
  }

  double area = 0.0;
  for (std::size_t j = 0; j + 1 < out.coverage.size(); ++j) {
    area += (out.coverage[j] - out.coverage[j + 1]) * (out.accuracy[j] + out.accuracy[j + 1]) / 2.0;
  }
  out.auac = area / (out.coverage.front() - out.coverage.back());
  return out;
}

double Auac(std::span<const double> uncertainty, std::span<const double> correctness, double step) {
  return AccuracyCoverageCurve(uncertainty, correctness, step).auac;
}

std::vector<double> MidRanks(std::span<const double> values) {
  RequireFinite(values, "MidRanks");
  const std::vector<std::size_t> order = StableOrder(values);
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> Spearman(std::span<const double> x, std::span<const double> y) {
  RequireSameLength(x.size(), y.size(), "Spearman");
  if (x.size() < 2) throw std::invalid_argument("Spearman: need at least two observations");
  const std::vector<double> rx = MidRanks(x);
  const std::vector<double> ry = MidRanks(y);
  const double mean = static_cast<double>(x.size() + 1) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace uqbench::metrics
