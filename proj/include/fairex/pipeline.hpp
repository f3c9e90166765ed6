#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fairex/config.hpp"
#include "fairex/dataset.hpp"
#include "fairex/metrics.hpp"
#include "fairex/mitigation.hpp"
#include "fairex/shap.hpp"

#include "json.hpp"

namespace fairex {

// Everything computed for one train/test split.
struct SplitRun {
  std::size_t index = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  LogitModel model_perf;
  std::size_t train_epochs = 0;
  double train_cross_entropy = 0.0;
  EvalReport eval_perf;
  ImportanceRanking ranking_perf;

  // Keyed by sensitive attribute.
  std::map<std::string, LogitModel> model_fair;
  std::map<std::string, EvalReport> eval_fair;
  std::map<std::string, ImportanceRanking> ranking_fair;
  std::map<std::string, RankDeltaReport> rank_delta;
  std::map<std::string, MitigationTrace> traces;

  // Largest |base + row sum - logit| over explained instances and models.
  double max_efficiency_residual = 0.0;
};

struct RunReport {
  PipelineConfig config;
  std::vector<std::string> attributes;  // mitigated attributes, in data order
  std::vector<std::string> feature_names;
  std::size_t n_rows = 0;
  std::map<std::string, int> privileged;

  std::vector<SplitRun> splits;
  // Keys "perf" and "fair_<attribute>".
  std::map<std::string, AggregateReport> aggregate;
  std::map<std::string, ImportanceRanking> importance;
  // Cross-split rank comparison per attribute.
  std::map<std::string, RankDeltaReport> rank_delta;

  std::string generated_at;  // UTC ISO-8601
  double wall_clock_seconds = 0.0;
};

// Reads the CSV or runs the generator, as configured.
Dataset LoadPipelineData(const PipelineConfig& config);

// Runs training, mitigation, evaluation and explanation on every split.
// Errors are re-thrown with the split index and phase prepended.
RunReport RunPipeline(const PipelineConfig& config, const Dataset& data);

// Name of a model in reports: "perf" or "fair_<attribute>".
std::string ModelKey(const std::string& attribute);

nlohmann::json ToJson(const EvalReport& report);
nlohmann::json ToJson(const AggregateReport& report);
nlohmann::json ToJson(const ImportanceRanking& ranking, std::size_t limit);
nlohmann::json ToJson(const RankDeltaReport& report);
nlohmann::json ToJson(const LogitModel& model);
nlohmann::json ConfigToJson(const PipelineConfig& config);

nlohmann::json ReportToJson(const RunReport& report);

// Writes report.json, summary.txt, importance_<model>.csv,
// rank_delta_<attribute>.csv and trace_<attribute>.csv into `dir`. Files
// are rendered in memory first; if any write fails, files already written
// are removed.
void WriteRunOutputs(const RunReport& report, const std::filesystem::path& dir);

}  // namespace fairex
