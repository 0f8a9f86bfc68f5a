#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqbench/decomposition.hpp"
#include "uqbench/tasks.hpp"
#include "uqbench/tensor.hpp"

namespace uqbench::disentangle {

struct GapResult {
  // False for single-member tensors, where EU is identically zero.
  bool applicable = false;
  double auroc_eu = 0.0;
  double auroc_au = 0.0;
  // auroc_eu - auroc_au
  double gap = 0.0;
};

// OOD AUROC of EU and AU and their difference, on per-sample scores.
GapResult EuAuGap(const UncertaintyScores& eu, const UncertaintyScores& au,
                  std::span<const std::int8_t> ood_labels);

// Decomposes, aggregates over classes, then scores as above. M = 1 yields a
// non-applicable result.
GapResult EuAuGap(const PredictionTensor& preds, std::span<const std::int8_t> ood_labels,
                  decomposition::Aggregation aggregation = decomposition::Aggregation::kMean);

// Spearman between per-sample EU and AU. nullopt for M = 1 or constant
// scores.
std::optional<double> UncertaintyRankCorrelation(
    const PredictionTensor& preds,
    decomposition::Aggregation aggregation = decomposition::Aggregation::kMean);

struct DisentanglementRecord {
  std::string method;
  bool applicable = false;
  double auroc_eu = 0.0;
  double auroc_au = 0.0;
  double gap = 0.0;
  std::optional<double> rank_corr;
  std::optional<double> avg_performance;
};

DisentanglementRecord MakeRecord(std::string method, const GapResult& gap,
                                 std::optional<double> rank_corr);

struct OverviewRow {
  std::string method;
  // Mean over tasks 1-4 (higher is better), 1 - ECE and 1 - MCE; nullopt
  // when any task is missing.
  std::optional<double> avg_performance;
  std::vector<int> missing_tasks;
  std::optional<double> gap;
  // 1 - rank correlation, clamped to [0, 2]: larger means weaker coupling.
  std::optional<double> bubble_size;
  bool complete() const { return missing_tasks.empty(); }
};

// Value a method contributes for one task: the best (largest) among its
// results for tasks 1-4, 1 - min ECE for task 5 and 1 - min MCE for task 6.
std::optional<double> TaskContribution(std::span<const tasks::TaskResult> results, int task);

// One row per method, sorted by method name. Records are matched by method.
std::vector<OverviewRow> OverviewAggregate(
    const std::map<std::string, std::vector<tasks::TaskResult>>& task_results,
    std::span<const DisentanglementRecord> records);

}  // namespace uqbench::disentangle
