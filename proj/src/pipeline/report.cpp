#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fairex/error.hpp"
#include "fairex/pipeline.hpp"

namespace fairex {

using nlohmann::json;

namespace {

constexpr const char* kToolName = "fairex";

json OptionalNumber(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json RatesJson(const GroupRates& rates) {
  json groups = json::array();
  for (int z = 0; z < 2; ++z) {
    const auto& g = rates.groups[z];
    groups.push_back({{"z", z},
                      {"tpr", OptionalNumber(g.tpr)},
                      {"fpr", OptionalNumber(g.fpr)},
                      {"positives", g.positives},
                      {"negatives", g.negatives}});
  }
  return {{"attribute", rates.attribute}, {"privileged", rates.privileged}, {"groups", groups}};
}

const MetricSummary* FindMetric(const AggregateReport& report, const std::string& key) {
  const auto it = report.metrics.find(key);
  return it == report.metrics.end() ? nullptr : &it->second;
}

json MeanOf(const AggregateReport& report, const std::string& key) {
  const auto* m = FindMetric(report, key);
  return m ? json(m->mean) : json(nullptr);
}

json DifferenceOf(const AggregateReport& after, const AggregateReport& before,
                  const std::string& key) {
  const auto* a = FindMetric(after, key);
  const auto* b = FindMetric(before, key);
  return a && b ? json(a->mean - b->mean) : json(nullptr);
}

json TopNames(const ImportanceRanking& ranking, std::size_t k) {
  json out = json::array();
  for (std::size_t r = 0; r < ranking.features.size() && r < k; ++r) {
    out.push_back(ranking.features[r].name);
  }
  return out;
}

json Performance(const AggregateReport& report) {
  return {{"auroc", MeanOf(report, "auroc")},
          {"sensitivity", MeanOf(report, "sensitivity")},
          {"specificity", MeanOf(report, "specificity")}};
}

json GroupDifferences(const AggregateReport& report, const std::string& attribute) {
  return {{"tpr_gap", MeanOf(report, "tpr_gap." + attribute)},
          {"fpr_gap", MeanOf(report, "fpr_gap." + attribute)},
          {"eod_abs", MeanOf(report, "eod_abs." + attribute)},
          {"eod_sq", MeanOf(report, "eod_sq." + attribute)}};
}

// Answers to the information- and clarification-style questions, built only
// from fields computed elsewhere in the report.
json Questions(const RunReport& report) {
  const auto& perf = report.aggregate.at(ModelKey(""));
  const std::size_t k = report.config.top_k;
  json information = {
      {"perf",
       {{"performance", Performance(perf)},
        {"top_features", TopNames(report.importance.at(ModelKey("")), k)}}}};
  json what_if = json::object();
  json how_to = json::object();
  for (const auto& attribute : report.attributes) {
    const auto& fair = report.aggregate.at(ModelKey(attribute));
    information[ModelKey(attribute)] = {
        {"performance", Performance(fair)},
        {"top_features", TopNames(report.importance.at(ModelKey(attribute)), k)}};

    what_if[attribute] = {
        {"group_differences_perf", GroupDifferences(perf, attribute)},
        {"group_differences_fair", GroupDifferences(fair, attribute)},
        {"fairness_measures",
         {{"eod_abs", "mean of |TPR gap| and |FPR gap| between groups (headline)"},
          {"eod_sq", "mean of squared TPR and FPR gaps between groups"}}},
        {"fairness_improvement",
         {{"eod_abs_before", MeanOf(perf, "eod_abs." + attribute)},
          {"eod_abs_after", MeanOf(fair, "eod_abs." + attribute)},
          {"eod_abs_change", DifferenceOf(fair, perf, "eod_abs." + attribute)},
          {"eod_sq_before", MeanOf(perf, "eod_sq." + attribute)},
          {"eod_sq_after", MeanOf(fair, "eod_sq." + attribute)},
          {"eod_sq_change", DifferenceOf(fair, perf, "eod_sq." + attribute)}}},
        {"performance_sacrifice",
         {{"auroc", DifferenceOf(fair, perf, "auroc")},
          {"sensitivity", DifferenceOf(fair, perf, "sensitivity")},
          {"specificity", DifferenceOf(fair, perf, "specificity")}}}};

    const auto& deltas = report.rank_delta.at(attribute);
    std::vector<RankDelta> up;
    std::vector<RankDelta> down;
    for (const auto& d : deltas.most_changed) (d.delta > 0 ? up : down).push_back(d);
    auto names = [](const std::vector<RankDelta>& list) {
      json out = json::array();
      for (const auto& d : list) out.push_back({{"feature", d.name}, {"delta", d.delta}});
      return out;
    };
    bool changed = false;
    for (const auto& d : deltas.features) changed = changed || d.delta != 0;
    how_to[attribute] = {{"importance_changed", changed},
                         {"more_important", names(up)},
                         {"less_important", names(down)}};
  }
  return {{"information", information},
          {"clarification", {{"what_if", what_if}, {"how_to_be_that", how_to}}}};
}

std::string Number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string ImportanceCsv(const ImportanceRanking& ranking, std::size_t k) {
  std::ostringstream os;
  os << "rank,feature,mean_rank,mean_score\n";
  for (std::size_t r = 0; r < ranking.features.size() && r < k; ++r) {
    const auto& f = ranking.features[r];
    os << f.rank << ',' << f.name << ',' << Number(f.mean_rank) << ',' << Number(f.score) << '\n';
  }
  return os.str();
}

std::string RankDeltaCsv(const RankDeltaReport& report) {
  std::ostringstream os;
  os << "feature,rank_perf,rank_fair,delta,direction\n";
  for (const auto& d : report.most_changed) {
    os << d.name << ',' << d.rank_perf << ',' << d.rank_fair << ',' << d.delta << ','
       << (d.delta > 0 ? "increase" : "decrease") << '\n';
  }
  return os.str();
}

std::string Summary(const RunReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "fairex run: " << report.n_rows << " rows, " << report.feature_names.size()
     << " features, " << report.splits.size() << " splits\n\n";
  os << "model                 AUROC   Sens    Spec  ";
  for (const auto& a : report.attributes) os << "  EOD[" << a << "]";
  os << '\n';
  auto line = [&](const std::string& key) {
    const auto& agg = report.aggregate.at(key);
    os << std::left << std::setw(20) << key << std::right;
    for (const char* metric : {"auroc", "sensitivity", "specificity"}) {
      os << "  " << agg.metrics.at(metric).mean;
    }
    for (const auto& a : report.attributes) {
      const auto* m = FindMetric(agg, "eod_abs." + a);
      os << "  " << std::setw(static_cast<int>(a.size()) + 4);
      if (m) {
        os << m->mean;
      } else {
        os << "n/a";
      }
    }
    os << '\n';
  };
  line(ModelKey(""));
  for (const auto& a : report.attributes) line(ModelKey(a));
  for (const auto& a : report.attributes) {
    os << "\nlargest rank changes after " << a << " mitigation:\n";
    for (const auto& d : report.rank_delta.at(a).most_changed) {
      os << "  " << std::showpos << d.delta << std::noshowpos << "  " << d.name << '\n';
    }
  }
  return os.str();
}

}  // namespace

json ToJson(const EvalReport& report) {
  json attributes = json::array();
  for (const auto& a : report.attributes) {
    attributes.push_back({{"rates", RatesJson(a.rates)},
                          {"eod_abs", a.eod ? json(a.eod->abs) : json(nullptr)},
                          {"eod_sq", a.eod ? json(a.eod->sq) : json(nullptr)}});
  }
  return {{"auroc", report.auroc},
          {"sensitivity", report.sensitivity},
          {"specificity", report.specificity},
          {"n_test", report.n_test},
          {"attributes", attributes}};
}

json ToJson(const AggregateReport& report) {
  json metrics = json::object();
  for (const auto& [key, m] : report.metrics) {
    metrics[key] = {{"mean", m.mean}, {"std", m.std}, {"count", m.count}};
  }
  return {{"repeats", report.repeats}, {"metrics", metrics}};
}

json ToJson(const ImportanceRanking& ranking, std::size_t limit) {
  json features = json::array();
  for (std::size_t r = 0; r < ranking.features.size() && r < limit; ++r) {
    const auto& f = ranking.features[r];
    features.push_back(
        {{"feature", f.name}, {"rank", f.rank}, {"score", f.score}, {"mean_rank", f.mean_rank}});
  }
  return {{"aggregation", AggregationName(ranking.aggregation)},
          {"degenerate", ranking.degenerate},
          {"features", features}};
}

json ToJson(const RankDeltaReport& report) {
  auto list = [](const std::vector<RankDelta>& deltas) {
    json out = json::array();
    for (const auto& d : deltas) {
      out.push_back({{"feature", d.name},
                     {"rank_perf", d.rank_perf},
                     {"rank_fair", d.rank_fair},
                     {"delta", d.delta}});
    }
    return out;
  };
  return {{"features", list(report.features)}, {"most_changed", list(report.most_changed)}};
}

json ToJson(const LogitModel& model) {
  return {{"feature_names", model.feature_names},
          {"weights", model.weights},
          {"intercept", model.intercept},
          {"threshold", model.threshold}};
}

json ConfigToJson(const PipelineConfig& c) {
  json data = {{"source", c.source == DataSource::kCsv ? "csv" : "synthetic"},
               {"label", c.label_column}};
  if (c.source == DataSource::kCsv) {
    data["path"] = c.csv_path.string();
    data["sensitive"] = c.sensitive_columns;
  } else {
    json groups = json::array();
    for (const auto& g : c.generator.groups) {
      groups.push_back({{"name", g.name}, {"group_fraction", g.group_fraction}});
    }
    data["generator"] = {{"n", c.generator.n},
                         {"m_informative", c.generator.m_informative},
                         {"m_noise", c.generator.m_noise},
                         {"groups", groups},
                         {"positive_rate", c.generator.positive_rate},
                         {"disparity_strength", c.generator.disparity_strength},
                         {"proxy_strength", c.generator.proxy_strength},
                         {"signal_scale", c.generator.signal_scale},
                         {"seed", c.generator.seed}};
  }
  auto mitigation = [](const MitigationConfig& m) {
    return json{{"learning_rate", m.learning_rate},
                {"max_epochs", m.max_epochs},
                {"rate_mode", RateModeName(m.rate_mode)},
                {"ce_anchor_weight", m.ce_anchor_weight},
                {"early_stop_auroc_drop", m.early_stop_auroc_drop},
                {"holdout_fraction", m.holdout_fraction},
                {"grad_tolerance", m.grad_tolerance},
                {"significance_level", m.significance_level},
                {"seed", m.seed}};
  };
  json overrides = json::object();
  for (const auto& [name, m] : c.mitigation_overrides) overrides[name] = mitigation(m);
  return {{"data", data},
          {"split",
           {{"train_fraction", c.split.train_fraction},
            {"repeats", c.split.repeats},
            {"stratify_on", c.split.stratify_on},
            {"seed", c.split.seed}}},
          {"train",
           {{"learning_rate", c.train.learning_rate},
            {"max_epochs", c.train.max_epochs},
            {"grad_tolerance", c.train.grad_tolerance},
            {"l2_penalty", c.train.l2_penalty},
            {"init_jitter", c.train.init_jitter},
            {"seed", c.train.seed}}},
          {"mitigation", mitigation(c.mitigation)},
          {"mitigation_overrides", overrides},
          {"attributes", c.attributes},
          {"top_k", c.top_k},
          {"aggregation", AggregationName(c.aggregation)},
          {"seed", c.seed}};
}

json ReportToJson(const RunReport& report) {
  json splits = json::array();
  for (const auto& run : report.splits) {
    json models = {{ModelKey(""), ToJson(run.eval_perf)}};
    json importance = {{ModelKey(""), ToJson(run.ranking_perf, run.ranking_perf.features.size())}};
    json coefficients = {{ModelKey(""), ToJson(run.model_perf)}};
    json deltas = json::object();
    json mitigation = json::object();
    for (const auto& attribute : report.attributes) {
      models[ModelKey(attribute)] = ToJson(run.eval_fair.at(attribute));
      const auto& ranking = run.ranking_fair.at(attribute);
      importance[ModelKey(attribute)] = ToJson(ranking, ranking.features.size());
      coefficients[ModelKey(attribute)] = ToJson(run.model_fair.at(attribute));
      deltas[attribute] = ToJson(run.rank_delta.at(attribute));
      const auto& trace = run.traces.at(attribute);
      const auto& first = trace.epochs.front();
      const auto& last = trace.epochs.back();
      mitigation[attribute] = {{"stop_reason", StopReasonName(trace.stop_reason)},
                               {"epochs", trace.epochs.size() - 1},
                               {"gated", trace.gated},
                               {"gap_statistic", trace.gap_statistic},
                               {"eod_loss_start", first.eod_loss},
                               {"eod_loss_end", last.eod_loss}};
    }
    splits.push_back({{"index", run.index},
                      {"n_train", run.n_train},
                      {"n_test", run.n_test},
                      {"train_epochs", run.train_epochs},
                      {"train_cross_entropy", run.train_cross_entropy},
                      {"max_efficiency_residual", run.max_efficiency_residual},
                      {"models", models},
                      {"coefficients", coefficients},
                      {"importance", importance},
                      {"rank_delta", deltas},
                      {"mitigation", mitigation}});
  }
  json aggregate = json::object();
  for (const auto& [key, agg] : report.aggregate) aggregate[key] = ToJson(agg);
  json importance = json::object();
  for (const auto& [key, ranking] : report.importance) {
    importance[key] = ToJson(ranking, report.config.top_k);
  }
  json deltas = json::object();
  for (const auto& [key, d] : report.rank_delta) deltas[key] = ToJson(d);

  return {{"tool", {{"name", kToolName}, {"version", FAIREX_VERSION}}},
          {"generated_at", report.generated_at},
          {"wall_clock_seconds", report.wall_clock_seconds},
          {"config", ConfigToJson(report.config)},
          {"dataset",
           {{"rows", report.n_rows},
            {"features", report.feature_names},
            {"privileged", report.privileged}}},
          {"attributes", report.attributes},
          {"splits", splits},
          {"aggregate", aggregate},
          {"importance", importance},
          {"rank_delta", deltas},
          {"questions", Questions(report)}};
}

void WriteRunOutputs(const RunReport& report, const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.json", ReportToJson(report).dump(2) + "\n");
  files.emplace_back("summary.txt", Summary(report));
  for (const auto& [key, ranking] : report.importance) {
    files.emplace_back("importance_" + key + ".csv", ImportanceCsv(ranking, report.config.top_k));
  }
  for (const auto& attribute : report.attributes) {
    files.emplace_back("rank_delta_" + attribute + ".csv",
                       RankDeltaCsv(report.rank_delta.at(attribute)));
    std::ostringstream trace;
    bool header = true;
    for (const auto& run : report.splits) {
      WriteTraceCsv(trace, run.traces.at(attribute), run.index, header);
      header = false;
    }
    files.emplace_back("trace_" + attribute + ".csv", trace.str());
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) {
      for (const auto& p : written) std::filesystem::remove(p, ec);
      std::filesystem::remove(path, ec);
      throw DataError("failed to write '" + path.string() + "'; partial outputs removed");
    }
    written.push_back(path);
  }
}

}  // namespace fairex
