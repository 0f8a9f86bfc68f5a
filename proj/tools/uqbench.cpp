// uqbench command-line front end.
//
// Exit status: 0 on success, 2 for usage errors (bad flags, unknown
// subcommand, invalid config), 1 for data errors. Failures print exactly one
// line to stderr of the form
//
//   uqbench: error code=<code> [task=<k>] [offset=<bytes>] msg="<text>"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uqbench/config.hpp"
#include "uqbench/ddu.hpp"
#include "uqbench/decomposition.hpp"
#include "uqbench/disentangle.hpp"
#include "uqbench/edl.hpp"
#include "uqbench/hetnn.hpp"
#include "uqbench/io.hpp"
#include "uqbench/report.hpp"
#include "uqbench/synth.hpp"
#include "uqbench/tasks.hpp"

namespace fs = std::filesystem;
using uqbench::report::Json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out;
}

void ErrorLine(const std::string& code, const std::string& msg, const std::string& extra = "") {
  std::cerr << "uqbench: error code=" << code << extra << " msg=\"" << Escape(msg) << "\"\n";
}

void PrintJson(const Json& json) { std::cout << uqbench::report::Dump(json); }

void WriteJson(const fs::path& path, const Json& json) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  uqbench::io::WriteTextFile(path, uqbench::report::Dump(json));
}

Json ReadJson(const fs::path& path) {
  const auto bytes = uqbench::io::ReadFileBytes(path);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path.string() + " is not valid JSON: " + e.what());
  }
}

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double Min(std::span<const double> v) {
  double m = v.empty() ? 0.0 : v[0];
  for (double x : v) m = std::min(m, x);
  return m;
}

uqbench::Matrix BinaryLabels(const uqbench::LabelTensor& labels) {
  uqbench::Matrix m(labels.samples(), labels.classes());
  for (std::size_t n = 0; n < labels.samples(); ++n) {
    for (std::size_t c = 0; c < labels.classes(); ++c) {
      if (labels(n, c) == uqbench::LabelTensor::kUncertain) {
        throw std::invalid_argument("labels must be 0/1 here; found -1 at sample " +
                                    std::to_string(n) + ", class " + std::to_string(c));
      }
      m(n, c) = labels(n, c);
    }
  }
  return m;
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string preds;
  std::string out_dir;
  std::string aggregation = "mean";
  bool per_sample = false;
};

int RunDecompose(const DecomposeArgs& a) {
  using namespace uqbench;
  const PredictionTensor preds = io::ReadPredictions(a.preds);
  const auto agg = decomposition::ParseAggregation(a.aggregation);
  decomposition::Decomposition d = decomposition::Decompose(preds);
  if (a.per_sample) {
    d.pu = decomposition::AggregateClasses(d.pu, agg);
    d.au = decomposition::AggregateClasses(d.au, agg);
    d.eu = decomposition::AggregateClasses(d.eu, agg);
  }
  Json summary;
  summary["members"] = preds.members();
  summary["samples"] = preds.samples();
  summary["classes"] = preds.classes();
  summary["mean_pu"] = report::RealToJson(Mean(d.pu.values.values()));
  summary["mean_au"] = report::RealToJson(Mean(d.au.values.values()));
  summary["mean_eu"] = report::RealToJson(Mean(d.eu.values.values()));
  summary["min_eu"] = report::RealToJson(Min(d.eu.values.values()));
  if (!a.out_dir.empty()) {
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    io::WriteScores(dir / "pu.uqs", d.pu);
    io::WriteScores(dir / "au.uqs", d.au);
    io::WriteScores(dir / "eu.uqs", d.eu);
  }
  PrintJson(summary);
  return 0;
}

// ---------------------------------------------------------------------- edl

struct EdlArgs {
  std::string params;
  std::string labels;
  std::string out_dir;
  double epoch = 10.0;
  double horizon = 10.0;
};

int RunEdl(const EdlArgs& a) {
  using namespace uqbench;
  const edl::BetaParams params = io::ReadBetaParams(a.params);
  const UncertaintyScores pu = edl::EdlPredictiveUncertainty(params);
  const UncertaintyScores au = edl::EdlAleatoricUncertainty(params);
  const edl::EdlEpistemic eu = edl::EdlEpistemicUncertainty(params);
  Json out;
  out["samples"] = params.samples();
  out["classes"] = params.classes();
  out["mean_pu"] = report::RealToJson(Mean(pu.values.values()));
  out["mean_au"] = report::RealToJson(Mean(au.values.values()));
  out["mean_eu"] = report::RealToJson(Mean(eu.scores.values.values()));
  out["negative_eu_cells"] = eu.negative_count;
  if (!a.labels.empty()) {
    const Matrix y = BinaryLabels(io::ReadLabels(a.labels));
    const double lambda = edl::AnnealingCoefficient(a.epoch, a.horizon);
    const edl::EdlLossTerms t = edl::BetaEdlLoss(params, y, lambda);
    out["loss"] = Json{{"squared_error", report::RealToJson(t.squared_error)},
                       {"variance_term", report::RealToJson(t.variance_term)},
                       {"kl_term", report::RealToJson(t.kl_term)},
                       {"lambda_t", report::RealToJson(t.lambda_t)},
                       {"total", report::RealToJson(t.total)}};
  }
  if (!a.out_dir.empty()) {
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    io::WriteScores(dir / "edl_pu.uqs", pu);
    io::WriteScores(dir / "edl_au.uqs", au);
    io::WriteScores(dir / "edl_eu.uqs", eu.scores);
  }
  if (eu.negative_count > 0) {
    std::cerr << "uqbench: warning: " << eu.negative_count << " cells with negative EDL-EU\n";
  }
  PrintJson(out);
  return 0;
}

// ---------------------------------------------------------------------- ddu

Json GaussiansToJson(const uqbench::ddu::ClassGaussians& g) {
  Json j;
  j["schema"] = "uqbench.ddu/1";
  j["dims"] = g.dims;
  j["jitter"] = g.jitter;
  Json classes = Json::array();
  for (const auto& c : g.classes) {
    classes.push_back(Json{{"fitted", c.fitted},
                           {"count", c.count},
                           {"jitter_applied", c.jitter_applied},
                           {"mean", c.mean},
                           {"variance", c.variance},
                           {"warnings", c.warnings}});
  }
  j["classes"] = std::move(classes);
  return j;
}

uqbench::ddu::ClassGaussians GaussiansFromJson(const Json& j) {
  if (j.value("schema", std::string()) != "uqbench.ddu/1") {
    throw std::invalid_argument("gaussians file: schema must be uqbench.ddu/1");
  }
  uqbench::ddu::ClassGaussians g;
  g.dims = j.at("dims").get<std::size_t>();
  g.jitter = j.at("jitter").get<double>();
  for (const Json& c : j.at("classes")) {
    uqbench::ddu::ClassGaussian cg;
    cg.fitted = c.at("fitted").get<bool>();
    cg.count = c.at("count").get<std::size_t>();
    cg.jitter_applied = c.at("jitter_applied").get<bool>();
    cg.mean = c.at("mean").get<std::vector<double>>();
    cg.variance = c.at("variance").get<std::vector<double>>();
    if (cg.fitted && (cg.mean.size() != g.dims || cg.variance.size() != g.dims)) {
      throw std::invalid_argument("gaussians file: class parameters do not match dims");
    }
    for (double v : cg.variance) {
      if (!(v > 0.0)) throw std::invalid_argument("gaussians file: variances must be > 0");
    }
    g.classes.push_back(std::move(cg));
  }
  return g;
}

struct DduFitArgs {
  std::string features;
  std::string labels;
  std::string out;
  double jitter = uqbench::ddu::kDefaultJitter;
};

int RunDduFit(const DduFitArgs& a) {
  using namespace uqbench;
  const ddu::ClassGaussians g =
      ddu::FitClassGaussians(io::ReadFeatures(a.features), io::ReadLabels(a.labels), a.jitter);
  for (std::size_t c = 0; c < g.classes.size(); ++c) {
    for (const std::string& w : g.classes[c].warnings) {
      std::cerr << "uqbench: warning: class " << c << ": " << w << "\n";
    }
  }
  WriteJson(a.out, GaussiansToJson(g));
  return 0;
}

struct DduScoreArgs {
  std::string features;
  std::string gaussians;
  std::string out;
};

int RunDduScore(const DduScoreArgs& a) {
  using namespace uqbench;
  const ddu::DduScores s =
      ddu::DduScore(io::ReadFeatures(a.features), GaussiansFromJson(ReadJson(a.gaussians)));
  io::WriteScores(a.out, s.scores);
  Json out;
  out["samples"] = s.scores.samples();
  out["classes"] = s.scores.classes();
  out["class_valid"] = s.class_valid;
  PrintJson(out);
  return 0;
}

// ---------------------------------------------------------------- hetnn-loss

struct HetArgs {
  std::string logits;
  std::string labels;
  std::size_t mc_samples = uqbench::hetnn::kDefaultMcSamples;
  std::uint64_t seed = 0;
  std::string sharing = "per-cell";
  std::string out_preds;
  std::size_t members = uqbench::hetnn::kDefaultMembers;
};

uqbench::hetnn::NoiseSharing ParseSharing(const std::string& s) {
  if (s == "per-cell") return uqbench::hetnn::NoiseSharing::kPerCell;
  if (s == "shared") return uqbench::hetnn::NoiseSharing::kSharedAcrossClasses;
  throw UsageError("--sharing must be per-cell or shared");
}

int RunHetLoss(const HetArgs& a) {
  using namespace uqbench;
  const hetnn::HetLogits logits = io::ReadHetLogits(a.logits);
  const hetnn::NoiseSharing sharing = ParseSharing(a.sharing);
  const Matrix y = BinaryLabels(io::ReadLabels(a.labels));
  const hetnn::LossOptions opts{a.mc_samples, a.seed, sharing};
  Json out;
  out["mc_samples"] = a.mc_samples;
  out["seed"] = a.seed;
  out["sharing"] = a.sharing;
  out["loss"] = report::RealToJson(hetnn::HetnnLoss(logits, y, opts));
  if (!a.out_preds.empty()) {
    io::WriteUqb1(a.out_preds, hetnn::HetnnSamplePredictions(logits, a.members, a.seed, sharing));
  }
  PrintJson(out);
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string config;
  std::string method;
  std::string preds;
  std::string labels;
  std::string ood;
  std::string scores;
  std::vector<int> tasks;
  std::vector<std::string> kinds;
  std::string aggregation;
  std::size_t bins = 0;
  std::string mode;
  double auac_step = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

uqbench::config::RunConfig MergeConfig(const EvalArgs& a) {
  using namespace uqbench;
  config::RunConfig c = a.config.empty() ? config::RunConfig{} : config::LoadRunConfig(a.config);
  try {
    if (!a.method.empty()) c.method = a.method;
    if (!a.preds.empty()) c.predictions = a.preds;
    if (!a.labels.empty()) c.labels = a.labels;
    if (!a.ood.empty()) c.ood_labels = a.ood;
    if (!a.scores.empty()) c.scores = a.scores;
    if (!a.tasks.empty()) c.tasks = a.tasks;
    if (!a.kinds.empty()) {
      c.score_kinds.clear();
      for (const std::string& k : a.kinds) c.score_kinds.push_back(ParseScoreKind(k));
    }
    if (!a.aggregation.empty()) c.aggregation = decomposition::ParseAggregation(a.aggregation);
    if (a.bins != 0) c.calibration_bins = a.bins;
    if (!a.mode.empty()) c.calibration_mode = metrics::ParseCalibrationMode(a.mode);
    if (a.auac_step != 0.0) c.auac_step = a.auac_step;
    if (a.seed_set) c.seed = a.seed;
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(e.what());
  }
  config::Validate(c);
  if (c.predictions.empty() && c.scores.empty()) {
    throw config::ConfigError("eval needs --preds or --scores");
  }
  return c;
}

// Scores and BMA derived from whatever the inputs provide.
struct EvalInputs {
  std::optional<uqbench::Matrix> bma;
  std::vector<uqbench::UncertaintyScores> scores;
};

EvalInputs LoadEvalInputs(const uqbench::config::RunConfig& c) {
  using namespace uqbench;
  EvalInputs in;
  std::vector<UncertaintyScores> available;
  std::vector<ScoreKind> defaults;
  if (!c.predictions.empty()) {
    auto payload = c.predictions.ends_with(".csv")
                       ? io::Uqb1Payload(io::ReadPredictionsCsv(c.predictions))
                       : io::ReadUqb1(c.predictions);
    if (auto* beta = std::get_if<edl::BetaParams>(&payload)) {
      Matrix bma(beta->samples(), beta->classes());
      for (std::size_t n = 0; n < bma.rows(); ++n) {
        for (std::size_t k = 0; k < bma.cols(); ++k) {
          bma(n, k) = beta->alpha()(n, k) / (beta->alpha()(n, k) + beta->beta()(n, k));
        }
      }
      in.bma = std::move(bma);
      available.push_back(edl::EdlPredictiveUncertainty(*beta));
      available.push_back(edl::EdlAleatoricUncertainty(*beta));
      available.push_back(edl::EdlEpistemicUncertainty(*beta).scores);
      defaults = {ScoreKind::kEdlPU, ScoreKind::kEdlAU, ScoreKind::kEdlEU};
    } else {
      const PredictionTensor preds =
          std::holds_alternative<PredictionTensor>(payload)
              ? std::get<PredictionTensor>(payload)
              : hetnn::HetnnSamplePredictions(std::get<hetnn::HetLogits>(payload), c.het_members,
                                              c.seed);
      decomposition::Decomposition d = decomposition::Decompose(preds);
      in.bma = std::move(d.bma);
      available = {std::move(d.pu), std::move(d.au), std::move(d.eu)};
      defaults = {ScoreKind::kPU, ScoreKind::kAU, ScoreKind::kEU};
    }
  }
  if (!c.scores.empty()) {
    UncertaintyScores ext = io::ReadScores(c.scores);
    defaults.push_back(ext.kind);
    available.push_back(std::move(ext));
  }
  const std::vector<ScoreKind>& wanted = c.score_kinds.empty() ? defaults : c.score_kinds;
  for (ScoreKind k : wanted) {
    bool found = false;
    for (const UncertaintyScores& s : available) {
      if (s.kind == k) {
        in.scores.push_back(s);
        found = true;
        break;
      }
    }
    if (!found) {
      throw config::ConfigError("score kind " + std::string(ScoreKindName(k)) +
                                " is not available from the given inputs");
    }
  }
  return in;
}

int RunEval(const EvalArgs& a) {
  using namespace uqbench;
  const config::RunConfig c = MergeConfig(a);
  const EvalInputs in = LoadEvalInputs(c);

  auto need_labels = [&](int task) {
    if (c.labels.empty()) throw config::ConfigError("task " + std::to_string(task) + " needs --labels");
  };
  std::optional<LabelTensor> labels;
  std::vector<std::int8_t> ood;
  std::vector<int> tasks = c.tasks;
  std::sort(tasks.begin(), tasks.end());
  for (int t : tasks) {
    if (t == 1 && c.ood_labels.empty()) throw config::ConfigError("task 1 needs --ood");
    if (t >= 2) need_labels(t);
    if (t >= 3 && !in.bma) throw config::ConfigError("task " + std::to_string(t) + " needs --preds");
  }
  if (!c.labels.empty()) labels = io::ReadLabels(c.labels);
  if (!c.ood_labels.empty()) ood = io::ReadOodLabels(c.ood_labels);

  report::MethodResults results;
  results.method = c.method;
  results.config = config::RunConfigToJson(c);
  for (int t : tasks) {
    if (t == 5 || t == 6) {
      if (!results.calibration) {
        results.calibration =
            tasks::Task5Task6Calibration(*in.bma, *labels, c.calibration_bins, c.calibration_mode);
      }
      results.results.push_back(t == 5 ? tasks::Task5Result(*results.calibration)
                                       : tasks::Task6Result(*results.calibration));
      continue;
    }
    for (const UncertaintyScores& s : in.scores) {
      switch (t) {
        case 1:
          results.results.push_back(
              tasks::Task1Ood(decomposition::AggregateClasses(s, c.aggregation), ood));
          break;
        case 2:
          results.results.push_back(tasks::Task2UncertaintyLabels(s, *labels));
          break;
        case 3:
          results.results.push_back(tasks::Task3Correctness(s, *in.bma, *labels));
          break;
        case 4:
          results.results.push_back(tasks::Task4Abstain(
              decomposition::AggregateClasses(s, c.aggregation), *in.bma, *labels, c.auac_step));
          break;
      }
    }
  }
  const Json doc = report::ResultsDocument(results);
  if (!a.out.empty()) {
    WriteJson(a.out, doc);
  } else if (!c.output_dir.empty()) {
    WriteJson(fs::path(c.output_dir) / "results.json", doc);
  } else {
    PrintJson(doc);
  }
  return 0;
}

// --------------------------------------------------------------- disentangle

struct DisentangleArgs {
  std::string preds;
  std::string ood;
  std::string method = "method";
  std::string aggregation = "mean";
  std::string out;
};

int RunDisentangle(const DisentangleArgs& a) {
  using namespace uqbench;
  const PredictionTensor preds = io::ReadPredictions(a.preds);
  const auto agg = decomposition::ParseAggregation(a.aggregation);
  const disentangle::GapResult gap =
      disentangle::EuAuGap(preds, io::ReadOodLabels(a.ood), agg);
  const auto record =
      disentangle::MakeRecord(a.method, gap, disentangle::UncertaintyRankCorrelation(preds, agg));
  const Json doc = report::RecordDocument(record);
  if (a.out.empty()) {
    PrintJson(doc);
  } else {
    WriteJson(a.out, doc);
  }
  return 0;
}

// --------------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_dir;
  std::string regime;
  uqbench::synth::SynthConfig config;
  bool seed_set = false;
};

int RunSynth(SynthArgs a) {
  using namespace uqbench;
  synth::SynthConfig cfg = a.config;
  if (!a.regime.empty()) {
    if (a.regime == "planted") {
      cfg = synth::PlantedOodRegime();
    } else if (a.regime == "independent") {
      cfg = synth::IndependentRegime();
    } else if (a.regime == "coupled") {
      cfg = synth::CoupledRegime();
    } else {
      throw UsageError("--regime must be planted, independent or coupled");
    }
    if (a.seed_set) cfg.seed = a.config.seed;
    cfg.label_uncertain_rate = a.config.label_uncertain_rate;
  }
  try {
    synth::Validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const synth::SynthData data = synth::Generate(cfg);
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  io::WriteUqb1(dir / "preds.uqb", data.predictions);
  io::WriteLabels(dir / "labels.uql", data.labels);
  io::WriteOodLabels(dir / "ood.uql", data.ood_labels);
  std::string csv = "sample,aleatoric,epistemic,ood\n";
  for (std::size_t n = 0; n < cfg.samples; ++n) {
    csv += std::to_string(n) + "," + report::FormatReal(data.truth.aleatoric[n]) + "," +
           report::FormatReal(data.truth.epistemic[n]) + "," +
           std::to_string(static_cast<int>(data.ood_labels[n])) + "\n";
  }
  io::WriteTextFile(dir / "factors.csv", csv);
  Json out;
  out["samples"] = cfg.samples;
  out["classes"] = cfg.classes;
  out["members"] = cfg.members;
  out["seed"] = cfg.seed;
  out["files"] = {"preds.uqb", "labels.uql", "ood.uql", "factors.csv"};
  PrintJson(out);
  return 0;
}

// -------------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> results;
  std::vector<std::string> records;
  std::string out_dir;
};

int RunReport(const ReportArgs& a) {
  using namespace uqbench;
  report::ReportInputs inputs;
  Json sources = Json::array();
  for (const std::string& path : a.results) {
    const Json doc = ReadJson(path);
    report::MethodResults m = report::ResultsFromDocument(doc);
    // Calibration tables travel with the results document; rebuild them
    // from JSON only for the CSV export.
    if (doc.contains("calibration") && !doc["calibration"].is_null()) {
      const Json& cal = doc["calibration"];
      tasks::CalibrationReport rep;
      rep.bins = cal.at("bins").get<std::size_t>();
      rep.mode = metrics::ParseCalibrationMode(cal.at("mode").get<std::string>());
      rep.macro_ece = cal.at("macro_ece").is_null() ? 0.0 : cal.at("macro_ece").get<double>();
      rep.macro_mce = cal.at("macro_mce").is_null() ? 0.0 : cal.at("macro_mce").get<double>();
      for (const Json& cls : cal.at("classes")) {
        if (cls.at("ece").is_null()) {
          rep.per_class.push_back(std::nullopt);
          continue;
        }
        metrics::Calibration k;
        k.ece = cls.at("ece").get<double>();
        k.mce = cls.at("mce").get<double>();
        for (const Json& b : cls.at("table")) {
          k.bins.push_back({b.at("lower").get<double>(), b.at("upper").get<double>(),
                            b.at("count").get<std::size_t>(), b.at("confidence").get<double>(),
                            b.at("accuracy").get<double>()});
        }
        rep.per_class.push_back(std::move(k));
      }
      rep.skipped_classes = cal.at("skipped_classes").get<std::vector<std::size_t>>();
      m.calibration = std::move(rep);
    }
    sources.push_back(fs::path(path).filename().string());
    inputs.methods.push_back(std::move(m));
  }
  for (const std::string& path : a.records) {
    const Json doc = ReadJson(path);
    if (doc.value("schema", std::string()) != report::kRecordsSchema) {
      throw std::invalid_argument(path + ": schema must be " + report::kRecordsSchema);
    }
    inputs.records.push_back(report::RecordFromJson(doc.at("record")));
  }
  inputs.config["results_files"] = std::move(sources);
  Json record_files = Json::array();
  for (const std::string& path : a.records) record_files.push_back(fs::path(path).filename().string());
  inputs.config["record_files"] = std::move(record_files);

  const fs::path dir = config::ResolveOutputDir(a.out_dir, config::RunConfig{});
  const report::EmittedFiles files = report::EmitReport(inputs, dir);
  const auto problems = report::ValidateReport(ReadJson(files.report));
  if (!problems.empty()) throw std::runtime_error("emitted report failed validation: " + problems[0]);
  Json out;
  out["report"] = files.report.string();
  Json tables = Json::array();
  for (const fs::path& p : files.tables) tables.push_back(p.string());
  out["tables"] = std::move(tables);
  PrintJson(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqbench: uncertainty decomposition and evaluation for multilabel classifiers"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "PU/AU/EU scores from a UQB1 prediction tensor");
  c_dec->add_option("--preds", dec.preds, "UQB1 (or .csv) predictions")->required();
  c_dec->add_option("--out-dir", dec.out_dir, "write pu.uqs, au.uqs, eu.uqs here");
  c_dec->add_option("--aggregation", dec.aggregation, "mean, sum or max")->capture_default_str();
  c_dec->add_flag("--per-sample", dec.per_sample, "aggregate over classes before writing");

  EdlArgs edl_args;
  auto* c_edl = app.add_subcommand("edl", "EDL uncertainties and loss from Beta parameters");
  c_edl->add_option("--params", edl_args.params, "UQB1 file with kind 1")->required();
  c_edl->add_option("--labels", edl_args.labels, "UQL1 0/1 labels; enables the loss");
  c_edl->add_option("--epoch", edl_args.epoch, "epoch for the KL annealing")->capture_default_str();
  c_edl->add_option("--horizon", edl_args.horizon, "annealing horizon in epochs")->capture_default_str();
  c_edl->add_option("--out-dir", edl_args.out_dir, "write edl_{pu,au,eu}.uqs here");

  DduFitArgs fit;
  auto* c_fit = app.add_subcommand("ddu-fit", "fit per-class diagonal Gaussians on features");
  c_fit->add_option("--features", fit.features, "UQF1 features")->required();
  c_fit->add_option("--labels", fit.labels, "UQL1 labels")->required();
  c_fit->add_option("--jitter", fit.jitter, "variance floor for degenerate dims")->capture_default_str();
  c_fit->add_option("--out", fit.out, "gaussians JSON")->required();

  DduScoreArgs score;
  auto* c_score = app.add_subcommand("ddu-score", "negative log density under fitted Gaussians");
  c_score->add_option("--features", score.features, "UQF1 features")->required();
  c_score->add_option("--gaussians", score.gaussians, "JSON from ddu-fit")->required();
  c_score->add_option("--out", score.out, "UQS1 scores")->required();

  HetArgs het;
  auto* c_het = app.add_subcommand("hetnn-loss", "Monte Carlo BCE of heteroscedastic logits");
  c_het->add_option("--logits", het.logits, "UQB1 file with kind 2")->required();
  c_het->add_option("--labels", het.labels, "UQL1 0/1 labels")->required();
  c_het->add_option("--mc-samples", het.mc_samples, "draws per cell")->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_het->add_option("--seed", het.seed, "noise seed")->capture_default_str();
  c_het->add_option("--sharing", het.sharing, "per-cell or shared")->capture_default_str();
  c_het->add_option("--out-preds", het.out_preds, "also write sampled members as UQB1");
  c_het->add_option("--members", het.members, "members for --out-preds")->capture_default_str()
      ->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "run benchmark tasks and write a results document");
  c_eval->add_option("--config", ev.config, "JSON run configuration");
  c_eval->add_option("--method", ev.method, "method name in the results");
  c_eval->add_option("--preds", ev.preds, "UQB1 predictions, Beta params or het logits");
  c_eval->add_option("--labels", ev.labels, "UQL1 labels");
  c_eval->add_option("--ood", ev.ood, "UQL1 OOD flags (C = 1)");
  c_eval->add_option("--scores", ev.scores, "UQS1 external scores");
  c_eval->add_option("--task", ev.tasks, "task id 1..6 (repeatable)")->check(CLI::Range(1, 6));
  c_eval->add_option("--kind", ev.kinds, "score kind (repeatable), e.g. EU");
  c_eval->add_option("--aggregation", ev.aggregation, "class aggregation for tasks 1 and 4");
  c_eval->add_option("--bins", ev.bins, "calibration bins")->check(CLI::PositiveNumber);
  c_eval->add_option("--mode", ev.mode, "calibration mode: confidence or positive");
  c_eval->add_option("--auac-step", ev.auac_step, "coverage step")->check(CLI::Range(1e-9, 1.0));
  auto* seed_opt = c_eval->add_option("--seed", ev.seed, "seed for het-logit sampling");
  c_eval->add_option("--out", ev.out, "results JSON; defaults to <output_dir>/results.json from --config, else stdout");

  DisentangleArgs dis;
  auto* c_dis = app.add_subcommand("disentangle", "EU-AU gap and rank correlation on OOD data");
  c_dis->add_option("--preds", dis.preds, "UQB1 predictions")->required();
  c_dis->add_option("--ood", dis.ood, "UQL1 OOD flags")->required();
  c_dis->add_option("--method", dis.method, "method name")->capture_default_str();
  c_dis->add_option("--aggregation", dis.aggregation, "mean, sum or max")->capture_default_str();
  c_dis->add_option("--out", dis.out, "record JSON (stdout when omitted)");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "synthetic tensors with known uncertainty factors");
  c_syn->add_option("--out-dir", syn.out_dir, "output directory")->required();
  c_syn->add_option("--regime", syn.regime, "planted, independent or coupled preset");
  c_syn->add_option("--samples", syn.config.samples)->capture_default_str();
  c_syn->add_option("--classes", syn.config.classes)->capture_default_str();
  c_syn->add_option("--members", syn.config.members)->capture_default_str();
  c_syn->add_option("--beta-a", syn.config.aleatoric_a, "latent Beta a")->capture_default_str();
  c_syn->add_option("--beta-b", syn.config.aleatoric_b, "latent Beta b")->capture_default_str();
  c_syn->add_option("--epistemic-std", syn.config.epistemic_std)->capture_default_str();
  c_syn->add_option("--ood-fraction", syn.config.ood_fraction)->capture_default_str();
  c_syn->add_option("--ood-multiplier", syn.config.ood_multiplier)->capture_default_str();
  c_syn->add_option("--uncertain-rate", syn.config.label_uncertain_rate,
                    "fraction of cells relabelled -1")->capture_default_str();
  c_syn->add_option("--coupling", syn.config.coupling)->capture_default_str();
  auto* syn_seed = c_syn->add_option("--seed", syn.config.seed)->capture_default_str();

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "merge results and records into report.json + CSVs");
  c_rep->add_option("--results", rep.results, "results JSON from eval (repeatable)");
  c_rep->add_option("--records", rep.records, "record JSON from disentangle (repeatable)");
  c_rep->add_option("--out-dir", rep.out_dir,
                    std::string("output directory (default $") + uqbench::config::kOutputDirEnv +
                        " or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ErrorLine("usage", e.what());
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (c_dec->parsed()) return RunDecompose(dec);
    if (c_edl->parsed()) return RunEdl(edl_args);
    if (c_fit->parsed()) return RunDduFit(fit);
    if (c_score->parsed()) return RunDduScore(score);
    if (c_het->parsed()) return RunHetLoss(het);
    if (c_eval->parsed()) {
      ev.seed_set = seed_opt->count() > 0;
      return RunEval(ev);
    }
    if (c_dis->parsed()) return RunDisentangle(dis);
    if (c_syn->parsed()) {
      syn.seed_set = syn_seed->count() > 0;
      return RunSynth(syn);
    }
    if (c_rep->parsed()) return RunReport(rep);
  } catch (const UsageError& e) {
    ErrorLine("usage", e.what());
    return kExitUsage;
  } catch (const uqbench::config::ConfigError& e) {
    ErrorLine("config", e.what());
    return kExitUsage;
  } catch (const uqbench::io::FormatError& e) {
    ErrorLine(std::string("format.") + std::string(uqbench::io::FormatErrorKindName(e.kind())),
              e.what(), " offset=" + std::to_string(e.offset()));
    return kExitData;
  } catch (const uqbench::tasks::TaskError& e) {
    ErrorLine("task", e.what(), " task=" + std::to_string(e.task()));
    return kExitData;
  } catch (const std::exception& e) {
    ErrorLine("data", e.what());
    return kExitData;
  }
  return kExitUsage;
}
