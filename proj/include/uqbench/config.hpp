#pragma once

// Run configuration for `uqbench eval`, loaded from a JSON object whose keys
// mirror the fields below. Unknown keys and out-of-range values are rejected
// before anything is computed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqbench/decomposition.hpp"
#include "uqbench/metrics.hpp"
#include "uqbench/report.hpp"
#include "uqbench/tensor.hpp"

namespace uqbench::config {

// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "UQBENCH_OUTPUT_DIR";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string method = "method";
  std::string predictions;
  std::string labels;
  std::string ood_labels;
  // Optional UQS1 file with externally computed scores (e.g. DDU-NLL).
  std::string scores;
  std::vector<int> tasks = {1, 2, 3, 4, 5, 6};
  // Empty selects the kinds natural to the prediction payload.
  std::vector<ScoreKind> score_kinds;
  decomposition::Aggregation aggregation = decomposition::Aggregation::kMean;
  std::size_t calibration_bins = metrics::kDefaultCalibrationBins;
  metrics::CalibrationMode calibration_mode = metrics::CalibrationMode::kConfidence;
  double auac_step = metrics::kDefaultAuacStep;
  std::uint64_t seed = 0;
  // Members drawn when the predictions file holds het logits.
  std::size_t het_members = 5;
  std::string output_dir;
};

// Throws ConfigError naming the offending field.
void Validate(const RunConfig& config);

RunConfig RunConfigFromJson(const report::Json& json);
report::Json RunConfigToJson(const RunConfig& config);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// First non-empty of: the explicit value, the config field, the environment
// variable, ".".
std::filesystem::path ResolveOutputDir(const std::string& explicit_dir, const RunConfig& config);

}  // namespace uqbench::config
