#include "uqbench/config.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "uqbench/io.hpp"

namespace uqbench::config {

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "method",           "predictions",      "labels",    "ood_labels",
      "scores",           "tasks",            "score_kinds", "aggregation",
      "calibration_bins", "calibration_mode", "auac_step", "seed",
      "het_members",      "output_dir"};
  return keys;
}

template <typename T>
T Field(const report::Json& json, const std::string& key, T fallback) {
  if (!json.contains(key)) return fallback;
  try {
    return json.at(key).get<T>();
  } catch (const report::Json::exception&) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

}  // namespace

void Validate(const RunConfig& config) {
  if (config.method.empty()) throw ConfigError("config: method must be non-empty");
  if (config.tasks.empty()) throw ConfigError("config: tasks must list at least one task");
  std::set<int> seen;
  for (int t : config.tasks) {
    if (t < 1 || t > 6) throw ConfigError("config: task ids must lie in 1..6");
    if (!seen.insert(t).second) throw ConfigError("config: duplicate task " + std::to_string(t));
  }
  if (config.calibration_bins == 0) throw ConfigError("config: calibration_bins must be >= 1");
  if (!(config.auac_step > 0.0 && config.auac_step <= 1.0)) {
    throw ConfigError("config: auac_step must lie in (0, 1]");
  }
  if (config.het_members == 0) throw ConfigError("config: het_members must be >= 1");
}

RunConfig RunConfigFromJson(const report::Json& json) {
  if (!json.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& item : json.items()) {
    if (!KnownKeys().count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");
  }
  RunConfig c;
  c.method = Field(json, "method", c.method);
  c.predictions = Field(json, "predictions", c.predictions);
  c.labels = Field(json, "labels", c.labels);
  c.ood_labels = Field(json, "ood_labels", c.ood_labels);
  c.scores = Field(json, "scores", c.scores);
  c.tasks = Field(json, "tasks", c.tasks);
  try {
    for (const std::string& name : Field(json, "score_kinds", std::vector<std::string>{})) {
      c.score_kinds.push_back(ParseScoreKind(name));
    }
    c.aggregation = decomposition::ParseAggregation(
        Field(json, "aggregation", std::string(decomposition::AggregationName(c.aggregation))));
    c.calibration_mode = metrics::ParseCalibrationMode(Field(
        json, "calibration_mode", std::string(metrics::CalibrationModeName(c.calibration_mode))));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (json.contains("calibration_bins") && !json["calibration_bins"].is_number_unsigned()) {
    throw ConfigError("config: calibration_bins must be a positive integer");
  }
  c.calibration_bins = Field(json, "calibration_bins", c.calibration_bins);
  c.auac_step = Field(json, "auac_step", c.auac_step);
  if (json.contains("seed") && !json["seed"].is_number_unsigned()) {
    throw ConfigError("config: seed must be a non-negative integer");
  }
  c.seed = Field(json, "seed", c.seed);
  c.het_members = Field(json, "het_members", c.het_members);
  c.output_dir = Field(json, "output_dir", c.output_dir);
  Validate(c);
  return c;
}

report::Json RunConfigToJson(const RunConfig& c) {
  report::Json j;
  j["method"] = c.method;
  j["predictions"] = c.predictions;
  j["labels"] = c.labels;
  j["ood_labels"] = c.ood_labels;
  j["scores"] = c.scores;
  j["tasks"] = c.tasks;
  report::Json kinds = report::Json::array();
  for (ScoreKind k : c.score_kinds) kinds.push_back(std::string(ScoreKindName(k)));
  j["score_kinds"] = std::move(kinds);
  j["aggregation"] = std::string(decomposition::AggregationName(c.aggregation));
  j["calibration_bins"] = c.calibration_bins;
  j["calibration_mode"] = std::string(metrics::CalibrationModeName(c.calibration_mode));
  j["auac_step"] = c.auac_step;
  j["seed"] = c.seed;
  j["het_members"] = c.het_members;
  return j;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::ReadFileBytes(path);
  report::Json json;
  try {
    json = report::Json::parse(bytes.begin(), bytes.end());
  } catch (const report::Json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return RunConfigFromJson(json);
}

std::filesystem::path ResolveOutputDir(const std::string& explicit_dir, const RunConfig& config) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

}  // namespace uqbench::config
