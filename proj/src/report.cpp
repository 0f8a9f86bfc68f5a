#include "uqbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "uqbench/io.hpp"

namespace uqbench::report {

double Round9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::string FormatReal(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Json RealToJson(double v) {
  if (!std::isfinite(v)) return nullptr;
  return Round9(v);
}

Json OptionalToJson(const std::optional<double>& v) {
  return v ? RealToJson(*v) : Json(nullptr);
}

namespace {

std::optional<double> OptionalFromJson(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json IndexArray(const std::vector<std::size_t>& v) {
  Json out = Json::array();
  for (std::size_t i : v) out.push_back(i);
  return out;
}

}  // namespace

Json TaskResultToJson(const tasks::TaskResult& result) {
  Json j;
  j["task"] = result.task;
  j["metric"] = result.metric;
  j["score_kind"] =
      result.score_kind ? Json(std::string(ScoreKindName(*result.score_kind))) : Json(nullptr);
  j["value"] = RealToJson(result.value);
  Json per_class = Json::array();
  for (const auto& v : result.per_class) per_class.push_back(OptionalToJson(v));
  j["per_class"] = std::move(per_class);
  j["skipped_classes"] = IndexArray(result.skipped_classes);
  j["evaluated_samples"] = result.evaluated_samples;
  return j;
}

tasks::TaskResult TaskResultFromJson(const Json& j) {
  tasks::TaskResult r;
  r.task = j.at("task").get<int>();
  r.metric = j.at("metric").get<std::string>();
  if (!j.at("score_kind").is_null()) r.score_kind = ParseScoreKind(j.at("score_kind").get<std::string>());
  r.value = j.at("value").is_null() ? std::nan("") : j.at("value").get<double>();
  for (const Json& v : j.at("per_class")) r.per_class.push_back(OptionalFromJson(v));
  for (const Json& v : j.at("skipped_classes")) r.skipped_classes.push_back(v.get<std::size_t>());
  r.evaluated_samples = j.at("evaluated_samples").get<std::size_t>();
  return r;
}

Json CalibrationToJson(const tasks::CalibrationReport& report) {
  Json j;
  j["bins"] = report.bins;
  j["mode"] = std::string(metrics::CalibrationModeName(report.mode));
  j["macro_ece"] = RealToJson(report.macro_ece);
  j["macro_mce"] = RealToJson(report.macro_mce);
  Json classes = Json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& cls = report.per_class[c];
    Json entry;
    entry["class"] = c;
    if (!cls) {
      entry["ece"] = nullptr;
      entry["mce"] = nullptr;
      entry["table"] = Json::array();
    } else {
      entry["ece"] = RealToJson(cls->ece);
      entry["mce"] = RealToJson(cls->mce);
      Json table = Json::array();
      for (const metrics::CalibrationBin& bin : cls->bins) {
        table.push_back(Json{{"lower", RealToJson(bin.lower)},
                             {"upper", RealToJson(bin.upper)},
                             {"count", bin.count},
                             {"confidence", RealToJson(bin.confidence)},
                             {"accuracy", RealToJson(bin.accuracy)}});
      }
      entry["table"] = std::move(table);
    }
    classes.push_back(std::move(entry));
  }
  j["classes"] = std::move(classes);
  j["skipped_classes"] = IndexArray(report.skipped_classes);
  return j;
}

Json RecordToJson(const disentangle::DisentanglementRecord& record) {
  Json j;
  j["method"] = record.method;
  j["applicable"] = record.applicable;
  j["auroc_eu"] = record.applicable ? RealToJson(record.auroc_eu) : Json(nullptr);
  j["auroc_au"] = record.applicable ? RealToJson(record.auroc_au) : Json(nullptr);
  j["gap"] = record.applicable ? RealToJson(record.gap) : Json(nullptr);
  j["rank_corr"] = OptionalToJson(record.rank_corr);
  j["avg_performance"] = OptionalToJson(record.avg_performance);
  return j;
}

disentangle::DisentanglementRecord RecordFromJson(const Json& j) {
  disentangle::DisentanglementRecord r;
  r.method = j.at("method").get<std::string>();
  r.applicable = j.at("applicable").get<bool>();
  if (r.applicable) {
    r.auroc_eu = j.at("auroc_eu").get<double>();
    r.auroc_au = j.at("auroc_au").get<double>();
    r.gap = j.at("gap").get<double>();
  }
  r.rank_corr = OptionalFromJson(j.at("rank_corr"));
  if (j.contains("avg_performance")) r.avg_performance = OptionalFromJson(j.at("avg_performance"));
  return r;
}

Json ResultsDocument(const MethodResults& results) {
  Json j;
  j["schema"] = kResultsSchema;
  j["method"] = results.method;
  j["config"] = results.config;
  Json list = Json::array();
  for (const tasks::TaskResult& r : results.results) list.push_back(TaskResultToJson(r));
  j["results"] = std::move(list);
  j["calibration"] = results.calibration ? CalibrationToJson(*results.calibration) : Json(nullptr);
  return j;
}

MethodResults ResultsFromDocument(const Json& j) {
  if (j.value("schema", std::string()) != kResultsSchema) {
    throw std::invalid_argument(std::string("results document: schema must be ") + kResultsSchema);
  }
  MethodResults out;
  out.method = j.at("method").get<std::string>();
  out.config = j.at("config");
  for (const Json& r : j.at("results")) out.results.push_back(TaskResultFromJson(r));
  return out;
}

Json RecordDocument(const disentangle::DisentanglementRecord& record) {
  Json j;
  j["schema"] = kRecordsSchema;
  j["record"] = RecordToJson(record);
  return j;
}

namespace {

std::vector<const MethodResults*> SortedMethods(const ReportInputs& inputs) {
  std::vector<const MethodResults*> sorted;
  for (const MethodResults& m : inputs.methods) sorted.push_back(&m);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MethodResults* a, const MethodResults* b) { return a->method < b->method; });
  return sorted;
}

std::vector<disentangle::DisentanglementRecord> SortedRecords(const ReportInputs& inputs) {
  std::vector<disentangle::DisentanglementRecord> sorted = inputs.records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.method < b.method; });
  return sorted;
}

// Task results sorted by (task, kind) so the emitted order does not depend
// on the order in which stages ran.
std::vector<tasks::TaskResult> SortedResults(const std::vector<tasks::TaskResult>& results) {
  std::vector<tasks::TaskResult> sorted = results;
  auto key = [](const tasks::TaskResult& r) {
    return std::make_pair(r.task, r.score_kind ? static_cast<int>(*r.score_kind) : -1);
  };
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return sorted;
}

std::vector<disentangle::OverviewRow> Overview(const ReportInputs& inputs) {
  std::map<std::string, std::vector<tasks::TaskResult>> by_method;
  for (const MethodResults& m : inputs.methods) {
    auto& list = by_method[m.method];
    list.insert(list.end(), m.results.begin(), m.results.end());
  }
  return disentangle::OverviewAggregate(by_method, inputs.records);
}

// Highest value per task among score kinds; calibration tasks keep the
// lowest error.
Json BestPerTask(const std::vector<tasks::TaskResult>& results) {
  Json out = Json::array();
  for (int task = 1; task <= 6; ++task) {
    const tasks::TaskResult* best = nullptr;
    for (const tasks::TaskResult& r : results) {
      if (r.task != task) continue;
      const bool lower_better = task >= 5;
      if (best == nullptr || (lower_better ? r.value < best->value : r.value > best->value)) best = &r;
    }
    if (best == nullptr) continue;
    out.push_back(Json{{"task", task},
                       {"score_kind", best->score_kind
                                          ? Json(std::string(ScoreKindName(*best->score_kind)))
                                          : Json(nullptr)},
                       {"value", RealToJson(best->value)}});
  }
  return out;
}

}  // namespace

Json BuildReport(const ReportInputs& inputs) {
  Json j;
  j["schema"] = kReportSchema;
  j["conventions"] = Json{
      {"entropy_units", "nats"},
      {"avg_performance",
       "mean of tasks 1-4 (best score kind per task), 1 - ECE and 1 - MCE; higher is better"},
      {"gap", "AUROC(EU) - AUROC(AU) on OOD detection"},
      {"bubble_size", "1 - Spearman(EU, AU), clamped to [0, 2]"},
      {"real_format", "9 significant digits"}};
  j["config"] = inputs.config;

  Json methods = Json::array();
  for (const MethodResults* m : SortedMethods(inputs)) {
    const std::vector<tasks::TaskResult> results = SortedResults(m->results);
    Json entry;
    entry["method"] = m->method;
    entry["config"] = m->config;
    Json list = Json::array();
    for (const tasks::TaskResult& r : results) list.push_back(TaskResultToJson(r));
    entry["tasks"] = std::move(list);
    entry["best"] = BestPerTask(results);
    entry["calibration"] = m->calibration ? CalibrationToJson(*m->calibration) : Json(nullptr);
    methods.push_back(std::move(entry));
  }
  j["methods"] = std::move(methods);

  Json records = Json::array();
  for (const auto& r : SortedRecords(inputs)) records.push_back(RecordToJson(r));
  j["disentanglement"] = std::move(records);

  Json overview = Json::array();
  for (const disentangle::OverviewRow& row : Overview(inputs)) {
    Json missing = Json::array();
    for (int t : row.missing_tasks) missing.push_back(t);
    overview.push_back(Json{{"method", row.method},
                            {"complete", row.complete()},
                            {"missing_tasks", std::move(missing)},
                            {"avg_performance", OptionalToJson(row.avg_performance)},
                            {"gap", OptionalToJson(row.gap)},
                            {"bubble_size", OptionalToJson(row.bubble_size)}});
  }
  j["overview"] = std::move(overview);
  return j;
}

namespace {

void Check(std::vector<std::string>& problems, bool ok, const std::string& what) {
  if (!ok) problems.push_back(what);
}

bool IsRealOrNull(const Json& j) { return j.is_null() || j.is_number(); }

}  // namespace

std::vector<std::string> ValidateReport(const Json& report) {
  std::vector<std::string> problems;
  if (!report.is_object()) return {"report is not an object"};
  Check(problems, report.value("schema", std::string()) == kReportSchema, "schema tag");
  Check(problems, report.contains("config") && report["config"].is_object(), "config object");
  Check(problems, report.contains("conventions") && report["conventions"].is_object(),
        "conventions object");
  for (const char* key : {"methods", "disentanglement", "overview"}) {
    Check(problems, report.contains(key) && report[key].is_array(), std::string(key) + " array");
  }
  if (!problems.empty()) return problems;

  for (const Json& m : report["methods"]) {
    const std::string name = m.value("method", std::string("?"));
    Check(problems, m.contains("method") && m["method"].is_string(), "method name");
    if (!m.contains("tasks") || !m["tasks"].is_array()) {
      problems.push_back(name + ": tasks array");
      continue;
    }
    for (const Json& t : m["tasks"]) {
      const bool shape_ok = t.contains("task") && t["task"].is_number_integer() &&
                            t.contains("metric") && t["metric"].is_string() &&
                            t.contains("value") && IsRealOrNull(t["value"]) &&
                            t.contains("per_class") && t["per_class"].is_array() &&
                            t.contains("skipped_classes") && t["skipped_classes"].is_array() &&
                            t.contains("score_kind");
      if (!shape_ok) {
        problems.push_back(name + ": malformed task result");
        continue;
      }
      const int task = t["task"].get<int>();
      Check(problems, task >= 1 && task <= 6, name + ": task id out of range");
      double sum = 0.0;
      std::size_t defined = 0;
      for (const Json& v : t["per_class"]) {
        Check(problems, IsRealOrNull(v), name + ": per-class value type");
        if (v.is_number()) {
          sum += v.get<double>();
          ++defined;
        }
      }
      if (defined > 0 && t["value"].is_number()) {
        const double macro = sum / static_cast<double>(defined);
        Check(problems, std::abs(macro - t["value"].get<double>()) <= 1e-8,
              name + ": task " + std::to_string(task) + " macro value disagrees with per-class values");
      }
      if (t["value"].is_number()) {
        const double v = t["value"].get<double>();
        Check(problems, v >= 0.0 && v <= 1.0,
              name + ": task " + std::to_string(task) + " value outside [0,1]");
      }
    }
  }
  for (const Json& r : report["disentanglement"]) {
    Check(problems,
          r.contains("method") && r.contains("applicable") && r.contains("gap") &&
              r.contains("auroc_eu") && r.contains("auroc_au") && r.contains("rank_corr"),
          "malformed disentanglement record");
    if (r.value("applicable", false) && r["gap"].is_number() && r["auroc_eu"].is_number() &&
        r["auroc_au"].is_number()) {
      const double gap = r["auroc_eu"].get<double>() - r["auroc_au"].get<double>();
      Check(problems, std::abs(gap - r["gap"].get<double>()) <= 1e-8,
            "gap disagrees with AUROC(EU) - AUROC(AU)");
    }
  }
  for (const Json& o : report["overview"]) {
    Check(problems,
          o.contains("method") && o.contains("complete") && o.contains("avg_performance") &&
              IsRealOrNull(o["avg_performance"]) && o.contains("gap") && o.contains("bubble_size"),
          "malformed overview row");
  }
  return problems;
}

std::string TaskResultsCsv(const ReportInputs& inputs) {
  std::string out = "method,task,metric,score_kind,value\n";
  for (const MethodResults* m : SortedMethods(inputs)) {
    for (const tasks::TaskResult& r : SortedResults(m->results)) {
      out += m->method + "," + std::to_string(r.task) + "," + r.metric + "," +
             (r.score_kind ? std::string(ScoreKindName(*r.score_kind)) : std::string("BMA")) + "," +
             FormatReal(r.value) + "\n";
    }
  }
  return out;
}

std::string DisentanglementCsv(const ReportInputs& inputs) {
  std::string out = "method,auroc_eu,auroc_au,gap,rank_corr\n";
  for (const auto& r : SortedRecords(inputs)) {
    if (!r.applicable) continue;
    out += r.method + "," + FormatReal(r.auroc_eu) + "," + FormatReal(r.auroc_au) + "," +
           FormatReal(r.gap) + "," + (r.rank_corr ? FormatReal(*r.rank_corr) : "") + "\n";
  }
  return out;
}

std::string OverviewCsv(const ReportInputs& inputs) {
  std::string out = "method,avg_performance,gap,bubble_size,complete\n";
  auto opt = [](const std::optional<double>& v) { return v ? FormatReal(*v) : std::string(); };
  for (const disentangle::OverviewRow& row : Overview(inputs)) {
    out += row.method + "," + opt(row.avg_performance) + "," + opt(row.gap) + "," +
           opt(row.bubble_size) + "," + (row.complete() ? "true" : "false") + "\n";
  }
  return out;
}

std::string CalibrationBinsCsv(const ReportInputs& inputs) {
  std::string out = "method,class,bin,lower,upper,count,confidence,accuracy\n";
  for (const MethodResults* m : SortedMethods(inputs)) {
    if (!m->calibration) continue;
    for (std::size_t c = 0; c < m->calibration->per_class.size(); ++c) {
      const auto& cls = m->calibration->per_class[c];
      if (!cls) continue;
      for (std::size_t b = 0; b < cls->bins.size(); ++b) {
        const metrics::CalibrationBin& bin = cls->bins[b];
        out += m->method + "," + std::to_string(c) + "," + std::to_string(b) + "," +
               FormatReal(bin.lower) + "," + FormatReal(bin.upper) + "," +
               std::to_string(bin.count) + "," + FormatReal(bin.confidence) + "," +
               FormatReal(bin.accuracy) + "\n";
      }
    }
  }
  return out;
}

std::string Dump(const Json& json) { return json.dump(2) + "\n"; }

EmittedFiles EmitReport(const ReportInputs& inputs, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw io::FormatError(io::FormatErrorKind::kIo, 0,
                          "cannot create output directory " + dir.string() + ": " + ec.message());
  }
  EmittedFiles files;
  files.report = dir / "report.json";
  io::WriteTextFile(files.report, Dump(BuildReport(inputs)));
  const std::pair<const char*, std::string> tables[] = {
      {"task_results.csv", TaskResultsCsv(inputs)},
      {"disentanglement.csv", DisentanglementCsv(inputs)},
      {"overview.csv", OverviewCsv(inputs)},
      {"calibration_bins.csv", CalibrationBinsCsv(inputs)},
  };
  for (const auto& [name, text] : tables) {
    files.tables.push_back(dir / name);
    io::WriteTextFile(files.tables.back(), text);
  }
  return files;
}

}  // namespace uqbench::report
