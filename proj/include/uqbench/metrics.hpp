#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uqbench/tensor.hpp"

namespace uqbench::metrics {

inline constexpr std::size_t kDefaultCalibrationBins = 15;
inline constexpr double kDefaultAuacStep = 0.05;

// Binary AUROC as the Mann-Whitney statistic with mid-rank ties:
// P(score_pos > score_neg) + 0.5 P(tie). Labels must be 0/1. Returns
// nullopt when only one class is present.
std::optional<double> Auroc(std::span<const double> scores, std::span<const double> labels);

struct MacroAuroc {
  // nullopt when no class was defined; see skipped_classes.
  std::optional<double> value;
  std::vector<std::optional<double>> per_class;
  std::vector<std::size_t> skipped_classes;
};

// Unweighted mean of per-class AUROC over the classes where both labels
// occur among the cells selected by `mask` (N x C, nonzero = use; empty span
// = use everything). Undefined classes are skipped and listed.
MacroAuroc MacroAurocPerClass(const Matrix& scores, const Matrix& targets,
                              std::span<const std::uint8_t> mask = {});

// Throws std::domain_error when every class is undefined.
double MacroAurocValue(const Matrix& scores, const Matrix& targets,
                       std::span<const std::uint8_t> mask = {});

enum class CalibrationMode {
  // Bin on max(p, 1-p); accuracy is [ (p >= 0.5) == y ].
  kConfidence,
  // Bin on p; accuracy is the empirical positive rate.
  kPositive,
};

CalibrationMode ParseCalibrationMode(std::string_view name);
std::string_view CalibrationModeName(CalibrationMode mode);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  // Means over the bin's members; 0 when the bin is empty.
  double confidence = 0.0;
  double accuracy = 0.0;
};

struct Calibration {
  double ece = 0.0;
  double mce = 0.0;
  std::vector<CalibrationBin> bins;
};

// Equal-width binning of the statistic on [0, 1]; bin b holds values in
// [b/B, (b+1)/B), the last bin also takes 1.0.
Calibration CalibrationError(std::span<const double> probs, std::span<const double> labels,
                             std::size_t bins = kDefaultCalibrationBins,
                             CalibrationMode mode = CalibrationMode::kConfidence);

double Ece(std::span<const double> probs, std::span<const double> labels,
           std::size_t bins = kDefaultCalibrationBins,
           CalibrationMode mode = CalibrationMode::kConfidence);
double Mce(std::span<const double> probs, std::span<const double> labels,
           std::size_t bins = kDefaultCalibrationBins,
           CalibrationMode mode = CalibrationMode::kConfidence);

struct AccuracyCoverage {
  std::vector<double> coverage;  // descending, starting at 1.0
  std::vector<double> accuracy;
  double auac = 0.0;
};

// Abstains on the most uncertain samples in steps of `step` coverage, from
// 1.0 down to `step`. At each level the ceil(coverage * N) least uncertain
// samples are retained. When the cut falls inside a group of tied
// uncertainties, the group contributes its mean correctness pro rata, i.e.
// the expected accuracy under a random tie order. AUAC is the trapezoidal
// area over coverage divided by the coverage span.
AccuracyCoverage AccuracyCoverageCurve(std::span<const double> uncertainty,
                                       std::span<const double> correctness,
                                       double step = kDefaultAuacStep);

double Auac(std::span<const double> uncertainty, std::span<const double> correctness,
            double step = kDefaultAuacStep);

// 1-based ranks with ties sharing their mean rank.
std::vector<double> MidRanks(std::span<const double> values);

// Pearson correlation of mid-ranks. nullopt when either input is constant.
std::optional<double> Spearman(std::span<const double> x, std::span<const double> y);

}  // namespace uqbench::metrics
