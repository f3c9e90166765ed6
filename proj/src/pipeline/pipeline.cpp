#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include <spdlog/spdlog.h>

#include "fairex/error.hpp"
#include "fairex/generator.hpp"
#include "fairex/pipeline.hpp"
#include "fairex/split.hpp"

namespace fairex {
namespace {

[[noreturn]] void Rethrow(const Error& e, const std::string& context) {
  const std::string message = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::kConfig:
      throw ConfigError(message);
    case ErrorKind::kData:
      throw DataError(message);
    case ErrorKind::kNumerical:
      throw NumericalError(message);
  }
  throw;
}

template <typename F>
auto InPhase(std::size_t split, const std::string& phase, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    Rethrow(e, "split " + std::to_string(split) + ", " + phase);
  }
}

double EfficiencyResidual(const AttributionMatrix& attributions, const LogitModel& model,
                          const Matrix& x) {
  const auto logits = model.Logits(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double total = attributions.base_value;
    for (std::size_t j = 0; j < x.cols(); ++j) total += attributions.values(i, j);
    worst = std::max(worst, std::abs(total - logits[i]));
  }
  return worst;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

std::string ModelKey(const std::string& attribute) {
  return attribute.empty() ? "perf" : "fair_" + attribute;
}

Dataset LoadPipelineData(const PipelineConfig& config) {
  if (config.source == DataSource::kCsv) {
    return LoadCsv(config.csv_path, config.label_column, config.sensitive_columns);
  }
  return Generate(config.generator);
}

RunReport RunPipeline(const PipelineConfig& config, const Dataset& data) {
  const auto started = std::chrono::steady_clock::now();
  config.Validate();

  RunReport report;
  report.config = config;
  report.generated_at = UtcNow();
  report.feature_names = data.feature_names();
  report.n_rows = data.rows();
  if (config.attributes.empty()) {
    report.attributes = data.sensitive_names();
  } else {
    for (const auto& name : config.attributes) {
      if (!data.has_sensitive(name)) {
        throw ConfigError("attribute '" + name + "' is not a sensitive column of the data");
      }
    }
    for (const auto& name : data.sensitive_names()) {
      if (std::find(config.attributes.begin(), config.attributes.end(), name) !=
          config.attributes.end()) {
        report.attributes.push_back(name);
      }
    }
  }
  for (const auto& column : data.sensitive()) {
    const auto it = config.privileged.find(column.name);
    report.privileged[column.name] =
        it != config.privileged.end() ? it->second : LargerGroup(column.values);
  }

  const auto splits = MakeSplits(data, config.split);
  for (std::size_t s = 0; s < splits.size(); ++s) {
    SplitRun run;
    run.index = s;
    const Dataset train = data.Subset(splits[s].train);
    const Dataset test = data.Subset(splits[s].test);
    run.n_train = train.rows();
    run.n_test = test.rows();

    TrainConfig train_config = config.train;
    train_config.seed = MixSeed(config.train.seed, s);
    const TrainOutcome outcome =
        InPhase(s, "train", [&] { return FitPerformanceModel(train, train_config); });
    run.model_perf = outcome.model;
    run.train_epochs = outcome.epochs;
    run.train_cross_entropy = outcome.final_cross_entropy;
    run.eval_perf =
        InPhase(s, "evaluate[perf]", [&] { return Evaluate(run.model_perf, test, report.privileged); });
    spdlog::debug("split {}: perf auroc {:.4f} after {} epochs", s, run.eval_perf.auroc,
                  outcome.epochs);

    for (std::size_t a = 0; a < report.attributes.size(); ++a) {
      const std::string& attribute = report.attributes[a];
      MitigationConfig mitigation = config.MitigationFor(attribute);
      mitigation.seed = MixSeed(mitigation.seed, s * 1000 + a);
      auto result = InPhase(s, "mitigate[" + attribute + "]",
                            [&] { return Mitigate(run.model_perf, train, mitigation); });
      run.eval_fair[attribute] = InPhase(s, "evaluate[" + attribute + "]", [&] {
        return Evaluate(result.model, test, report.privileged);
      });
      const auto explanation = InPhase(s, "explain[" + attribute + "]", [&] {
        return ExplainFairnessShift(run.model_perf, result.model, train, test, config.top_k,
                                    config.aggregation);
      });
      run.max_efficiency_residual = std::max(
          {run.max_efficiency_residual,
           EfficiencyResidual(explanation.attributions_perf, run.model_perf, test.features()),
           EfficiencyResidual(explanation.attributions_fair, result.model, test.features())});
      if (a == 0) run.ranking_perf = explanation.ranking_perf;
      run.ranking_fair[attribute] = explanation.ranking_fair;
      run.rank_delta[attribute] = explanation.deltas;
      spdlog::debug("split {}: {} stop={} epochs={}", s, attribute,
                    StopReasonName(result.trace.stop_reason), result.trace.epochs.size() - 1);
      run.traces[attribute] = std::move(result.trace);
      run.model_fair[attribute] = std::move(result.model);
    }
    if (report.attributes.empty()) {
      const auto background_explain = InPhase(s, "explain[perf]", [&] {
        return ExplainFairnessShift(run.model_perf, run.model_perf, train, test, config.top_k,
                                    config.aggregation);
      });
      run.ranking_perf = background_explain.ranking_perf;
    }
    spdlog::info("split {}/{} done", s + 1, splits.size());
    report.splits.push_back(std::move(run));
  }

  std::vector<EvalReport> perf_reports;
  std::vector<ImportanceRanking> perf_rankings;
  for (const auto& run : report.splits) {
    perf_reports.push_back(run.eval_perf);
    perf_rankings.push_back(run.ranking_perf);
  }
  report.aggregate[ModelKey("")] = Aggregate(perf_reports);
  report.importance[ModelKey("")] = AggregateRankings(perf_rankings);
  for (const auto& attribute : report.attributes) {
    std::vector<EvalReport> reports;
    std::vector<ImportanceRanking> rankings;
    for (const auto& run : report.splits) {
      reports.push_back(run.eval_fair.at(attribute));
      rankings.push_back(run.ranking_fair.at(attribute));
    }
    report.aggregate[ModelKey(attribute)] = Aggregate(reports);
    report.importance[ModelKey(attribute)] = AggregateRankings(rankings);
    report.rank_delta[attribute] = CompareRankings(
        report.importance.at(ModelKey("")), report.importance.at(ModelKey(attribute)),
        config.top_k);
  }

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace fairex
