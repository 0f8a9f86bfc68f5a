#pragma once

// JSON documents exchanged between CLI stages and the final report.
//
//   uqbench.results/1   one method's task results (written by `eval`)
//   uqbench.records/1   one method's disentanglement record (`disentangle`)
//   uqbench.report/1    the merged report (`report`)
//
// Reals are rounded to 9 significant digits before serialization and keys
// are emitted in a fixed order, so identical inputs give identical bytes.
// Non-finite reals become null.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uqbench/disentangle.hpp"
#include "uqbench/tasks.hpp"

namespace uqbench::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kResultsSchema = "uqbench.results/1";
inline constexpr const char* kRecordsSchema = "uqbench.records/1";
inline constexpr const char* kReportSchema = "uqbench.report/1";

// Rounds to 9 significant digits.
double Round9(double v);
// "%.9g" rendering used in CSV output.
std::string FormatReal(double v);

Json RealToJson(double v);
Json OptionalToJson(const std::optional<double>& v);

Json TaskResultToJson(const tasks::TaskResult& result);
tasks::TaskResult TaskResultFromJson(const Json& json);

Json CalibrationToJson(const tasks::CalibrationReport& report);

Json RecordToJson(const disentangle::DisentanglementRecord& record);
disentangle::DisentanglementRecord RecordFromJson(const Json& json);

struct MethodResults {
  std::string method;
  std::vector<tasks::TaskResult> results;
  std::optional<tasks::CalibrationReport> calibration;
  Json config = Json::object();
};

Json ResultsDocument(const MethodResults& results);
// Calibration tables are not read back; only task results and config.
MethodResults ResultsFromDocument(const Json& json);

Json RecordDocument(const disentangle::DisentanglementRecord& record);

struct ReportInputs {
  std::vector<MethodResults> methods;
  std::vector<disentangle::DisentanglementRecord> records;
  Json config = Json::object();
};

// Builds the merged report. Methods and records are ordered by method name.
Json BuildReport(const ReportInputs& inputs);

// Empty when the document conforms to uqbench.report/1, otherwise one entry
// per violation.
std::vector<std::string> ValidateReport(const Json& report);

// CSV tables for external plotting.
std::string TaskResultsCsv(const ReportInputs& inputs);       // method,task,metric,kind,value
std::string DisentanglementCsv(const ReportInputs& inputs);   // method,auroc_eu,auroc_au,gap
std::string OverviewCsv(const ReportInputs& inputs);          // method,avg_performance,gap,bubble
std::string CalibrationBinsCsv(const ReportInputs& inputs);   // method,class,bin,...

struct EmittedFiles {
  std::filesystem::path report;
  std::vector<std::filesystem::path> tables;
};

// Writes report.json and the CSV tables into `dir` (created if needed).
EmittedFiles EmitReport(const ReportInputs& inputs, const std::filesystem::path& dir);

std::string Dump(const Json& json);

}  // namespace uqbench::report
