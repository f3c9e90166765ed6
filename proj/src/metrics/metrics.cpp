#include <cmath>

#include "fairex/error.hpp"
#include "fairex/metrics.hpp"

namespace fairex {

double Auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  return AreaUnderCurve(Roc(scores, labels));
}

bool GroupRates::complete() const {
  return groups[0].tpr && groups[0].fpr && groups[1].tpr && groups[1].fpr;
}

int LargerGroup(std::span<const std::uint8_t> values) {
  std::size_t ones = 0;
  for (auto v : values) ones += v;
  return ones * 2 >= values.size() ? 1 : 0;
}

GroupRates ComputeGroupRates(std::span<const std::uint8_t> decisions,
                             std::span<const std::uint8_t> labels,
                             std::span<const std::uint8_t> group, std::string attribute,
                             int privileged) {
  GroupRates rates;
  rates.attribute = std::move(attribute);
  rates.privileged = privileged;
  std::size_t predicted_pos[2][2] = {{0, 0}, {0, 0}};  // [z][y]
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& cell = rates.groups[group[i]];
    (labels[i] ? cell.positives : cell.negatives) += 1;
    predicted_pos[group[i]][labels[i]] += decisions[i];
  }
  for (int z = 0; z < 2; ++z) {
    auto& cell = rates.groups[z];
    if (cell.positives > 0) {
      cell.tpr = static_cast<double>(predicted_pos[z][1]) / static_cast<double>(cell.positives);
    }
    if (cell.negatives > 0) {
      cell.fpr = static_cast<double>(predicted_pos[z][0]) / static_cast<double>(cell.negatives);
    }
  }
  return rates;
}

ConfusionSummary ConfusionRates(const LogitModel& model, const Dataset& test,
                                const std::map<std::string, int>& privileged) {
  const auto decisions = model.Decide(test.features());
  const auto& labels = test.labels();
  std::size_t tp = 0, fp = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      ++pos;
      tp += decisions[i];
    } else {
      ++neg;
      fp += decisions[i];
    }
  }
  if (pos == 0 || neg == 0) throw DataError("evaluation data must contain both classes");

  ConfusionSummary summary;
  summary.sensitivity = static_cast<double>(tp) / static_cast<double>(pos);
  summary.specificity = 1.0 - static_cast<double>(fp) / static_cast<double>(neg);
  for (const auto& column : test.sensitive()) {
    const auto it = privileged.find(column.name);
    const int priv = it != privileged.end() ? it->second : LargerGroup(column.values);
    summary.groups.push_back(
        ComputeGroupRates(decisions, labels, column.values, column.name, priv));
  }
  return summary;
}

Eod ComputeEod(const GroupRates& rates) {
  if (!rates.complete()) {
    throw DataError("equalized odds for '" + rates.attribute +
                    "' is undefined: a (group, label) cell is empty");
  }
  const double dtpr = *rates.groups[0].tpr - *rates.groups[1].tpr;
  const double dfpr = *rates.groups[0].fpr - *rates.groups[1].fpr;
  return {(std::abs(dtpr) + std::abs(dfpr)) / 2.0, (dtpr * dtpr + dfpr * dfpr) / 2.0};
}

EvalReport Evaluate(const LogitModel& model, const Dataset& test,
                    const std::map<std::string, int>& privileged) {
  EvalReport report;
  report.n_test = test.rows();
  report.auroc = Auroc(model.PredictProba(test.features()), test.labels());
  auto summary = ConfusionRates(model, test, privileged);
  report.sensitivity = summary.sensitivity;
  report.specificity = summary.specificity;
  for (auto& rates : summary.groups) {
    AttributeFairness fairness;
    if (rates.complete()) fairness.eod = ComputeEod(rates);
    fairness.rates = std::move(rates);
    report.attributes.push_back(std::move(fairness));
  }
  return report;
}

MetricSummary Summarize(std::span<const double> values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

AggregateReport Aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw DataError("aggregate: no reports");
  std::map<std::string, std::vector<double>> samples;
  for (const auto& report : reports) {
    samples["auroc"].push_back(report.auroc);
    samples["sensitivity"].push_back(report.sensitivity);
    samples["specificity"].push_back(report.specificity);
    for (const auto& fairness : report.attributes) {
      const auto& name = fairness.rates.attribute;
      if (!fairness.eod) continue;
      const auto& g = fairness.rates.groups;
      const int p = fairness.rates.privileged;
      samples["eod_abs." + name].push_back(fairness.eod->abs);
      samples["eod_sq." + name].push_back(fairness.eod->sq);
      samples["tpr_gap." + name].push_back(*g[p].tpr - *g[1 - p].tpr);
      samples["fpr_gap." + name].push_back(*g[p].fpr - *g[1 - p].fpr);
    }
  }
  AggregateReport aggregate;
  aggregate.repeats = reports.size();
  for (const auto& [key, values] : samples) aggregate.metrics[key] = Summarize(values);
  return aggregate;
}

}  // namespace fairex
