#include "uqbench/disentangle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "uqbench/metrics.hpp"

namespace uqbench::disentangle {

GapResult EuAuGap(const UncertaintyScores& eu, const UncertaintyScores& au,
                  std::span<const std::int8_t> ood_labels) {
  const tasks::TaskResult eu_result = tasks::Task1Ood(eu, ood_labels);
  const tasks::TaskResult au_result = tasks::Task1Ood(au, ood_labels);
  return {true, eu_result.value, au_result.value, eu_result.value - au_result.value};
}

GapResult EuAuGap(const PredictionTensor& preds, std::span<const std::int8_t> ood_labels,
                  decomposition::Aggregation aggregation) {
  if (preds.members() < 2) return {};
  const decomposition::Decomposition d = decomposition::Decompose(preds);
  return EuAuGap(decomposition::AggregateClasses(d.eu, aggregation),
                 decomposition::AggregateClasses(d.au, aggregation), ood_labels);
}

std::optional<double> UncertaintyRankCorrelation(const PredictionTensor& preds,
                                                 decomposition::Aggregation aggregation) {
  if (preds.members() < 2 || preds.samples() < 2) return std::nullopt;
  const decomposition::Decomposition d = decomposition::Decompose(preds);
  const std::vector<double> eu = decomposition::AggregateClasses(d.eu, aggregation).per_sample();
  const std::vector<double> au = decomposition::AggregateClasses(d.au, aggregation).per_sample();
  return metrics::Spearman(eu, au);
}

DisentanglementRecord MakeRecord(std::string method, const GapResult& gap,
                                 std::optional<double> rank_corr) {
  DisentanglementRecord record;
  record.method = std::move(method);
  record.applicable = gap.applicable;
  record.auroc_eu = gap.auroc_eu;
  record.auroc_au = gap.auroc_au;
  record.gap = gap.gap;
  record.rank_corr = rank_corr;
  return record;
}

std::optional<double> TaskContribution(std::span<const tasks::TaskResult> results, int task) {
  std::optional<double> best;
  for (const tasks::TaskResult& r : results) {
    if (r.task != task) continue;
    double value = r.value;
    if (task == 5 || task == 6) value = 1.0 - value;
    if (!best || value > *best) best = value;
  }
  return best;
}

std::vector<OverviewRow> OverviewAggregate(
    const std::map<std::string, std::vector<tasks::TaskResult>>& task_results,
    std::span<const DisentanglementRecord> records) {
  std::set<std::string> methods;
  for (const auto& [method, results] : task_results) methods.insert(method);
  for (const DisentanglementRecord& r : records) methods.insert(r.method);

  std::vector<OverviewRow> rows;
  for (const std::string& method : methods) {
    OverviewRow row;
    row.method = method;
    const auto found = task_results.find(method);
    const std::span<const tasks::TaskResult> results =
        found == task_results.end() ? std::span<const tasks::TaskResult>{}
                                    : std::span<const tasks::TaskResult>(found->second);
    double sum = 0.0;
    for (int task = 1; task <= 6; ++task) {
      const std::optional<double> value = TaskContribution(results, task);
      if (value) {
        sum += *value;
      } else {
        row.missing_tasks.push_back(task);
      }
    }
    if (row.missing_tasks.empty()) row.avg_performance = sum / 6.0;

    const auto record = std::find_if(records.begin(), records.end(),
                                     [&](const DisentanglementRecord& r) {
                                       return r.method == method && r.applicable;
                                     });
    if (record != records.end()) {
      row.gap = record->gap;
      if (record->rank_corr) row.bubble_size = std::clamp(1.0 - *record->rank_corr, 0.0, 2.0);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace uqbench::disentangle
