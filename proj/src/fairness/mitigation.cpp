#include <algorithm>
#include <cmath>
#include <limits>

#include "fairex/error.hpp"
#include "fairex/kernels.hpp"
#include "fairex/metrics.hpp"
#include "fairex/mitigation.hpp"
#include "fairex/split.hpp"

namespace fairex {

std::string_view RateModeName(RateMode mode) {
  return mode == RateMode::kSoft ? "soft" : "hard";
}

RateMode ParseRateMode(std::string_view text) {
  if (text == "soft") return RateMode::kSoft;
  if (text == "hard") return RateMode::kHard;
  throw ConfigError("rate_mode must be 'soft' or 'hard', got '" + std::string(text) + "'");
}

std::string_view StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kMaxEpochs:
      return "max_epochs";
    case StopReason::kEarlyStop:
      return "early_stop";
  }
  return "unknown";
}

void MitigationConfig::Validate() const {
  if (sensitive_attribute.empty()) throw ConfigError("mitigation.sensitive_attribute is empty");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("mitigation.learning_rate must be positive");
  }
  if (max_epochs == 0) throw ConfigError("mitigation.max_epochs must be positive");
  if (!(ce_anchor_weight >= 0.0) || !std::isfinite(ce_anchor_weight)) {
    throw ConfigError("mitigation.ce_anchor_weight must be non-negative");
  }
  if (!(early_stop_auroc_drop >= 0.0)) {
    throw ConfigError("mitigation.early_stop_auroc_drop must be non-negative");
  }
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("mitigation.holdout_fraction must lie in [0, 1)");
  }
  if (!(grad_tolerance > 0.0)) throw ConfigError("mitigation.grad_tolerance must be positive");
  if (!(significance_level >= 0.0 && significance_level < 1.0)) {
    throw ConfigError("mitigation.significance_level must lie in [0, 1)");
  }
}

namespace {

constexpr int kMaxHalvings = 80;

struct CellTotals {
  double sum[2][2] = {{0, 0}, {0, 0}};     // [z][y]
  double sum_sq[2][2] = {{0, 0}, {0, 0}};  // [z][y]
  std::size_t count[2][2] = {{0, 0}, {0, 0}};
};

CellTotals Tally(std::span<const double> values, std::span<const std::uint8_t> labels,
                 std::span<const std::uint8_t> group) {
  CellTotals t;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int z = group[i];
    const int y = labels[i];
    t.sum[z][y] += values[i];
    t.sum_sq[z][y] += values[i] * values[i];
    t.count[z][y] += 1;
  }
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      if (t.count[z][y] == 0) {
        throw DataError("equalized odds undefined: no rows with z=" + std::to_string(z) +
                        ", y=" + std::to_string(y));
      }
    }
  }
  return t;
}

SoftRates RatesFrom(const CellTotals& t) {
  SoftRates r;
  for (int z = 0; z < 2; ++z) {
    r.tpr[z] = t.sum[z][1] / static_cast<double>(t.count[z][1]);
    r.fpr[z] = t.sum[z][0] / static_cast<double>(t.count[z][0]);
  }
  return r;
}

double LossFrom(const SoftRates& r) {
  const double dt = r.tpr[0] - r.tpr[1];
  const double df = r.fpr[0] - r.fpr[1];
  return dt * dt + df * df;
}

double InfinityNorm(const LossAndGradient& g) {
  double norm = std::abs(g.grad_intercept);
  for (double v : g.grad_weights) norm = std::max(norm, std::abs(v));
  return norm;
}

struct Objective {
  LossAndGradient total;
  double eod = 0.0;
  double ce = 0.0;
  SoftRates rates;
};

// L_EOD + lambda * L_CE and its gradient from a single pass over the logits.
Objective EvaluateObjective(const Matrix& x, std::span<const std::uint8_t> labels,
                            std::span<const std::uint8_t> group, const Parameters& params,
                            double lambda) {
  const std::size_t n = x.rows();
  std::vector<double> logits(n);
  LinearScores(x, params.weights, params.intercept, logits);
  std::vector<double> proba(n);
  for (std::size_t i = 0; i < n; ++i) proba[i] = Sigmoid(logits[i]);

  Objective out;
  const CellTotals totals = Tally(proba, labels, group);
  out.rates = RatesFrom(totals);
  out.eod = LossFrom(out.rates);

  const double dt = out.rates.tpr[0] - out.rates.tpr[1];
  const double df = out.rates.fpr[0] - out.rates.fpr[1];
  double coef[2][2];  // [z][y]: d L_EOD / d p_i for a row in that cell
  for (int z = 0; z < 2; ++z) {
    const double sign = z == 0 ? 1.0 : -1.0;
    coef[z][1] = 2.0 * dt * sign / static_cast<double>(totals.count[z][1]);
    coef[z][0] = 2.0 * df * sign / static_cast<double>(totals.count[z][0]);
  }

  std::vector<double> residual(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  double ce = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = proba[i];
    residual[i] = coef[group[i]][labels[i]] * p * (1.0 - p);
    if (lambda != 0.0) {
      residual[i] += lambda * (p - labels[i]) * inv_n;
      ce += Softplus(logits[i]) - (labels[i] ? logits[i] : 0.0);
    }
  }
  out.ce = ce * inv_n;
  out.total.loss = out.eod + lambda * out.ce;
  out.total.grad_weights.resize(x.cols());
  TransposedProduct(x, residual, out.total.grad_weights);
  out.total.grad_intercept = kernels::Sum(residual);
  return out;
}

// Chi-square statistic (2 dof) for the hypothesis that the soft rates are
// equal across groups, treating rows as independent draws.
double GapStatistic(std::span<const double> proba, std::span<const std::uint8_t> labels,
                    std::span<const std::uint8_t> group) {
  const CellTotals t = Tally(proba, labels, group);
  double statistic = 0.0;
  for (int y = 0; y < 2; ++y) {
    double gap = 0.0;
    double variance = 0.0;
    for (int z = 0; z < 2; ++z) {
      const double c = static_cast<double>(t.count[z][y]);
      const double mean = t.sum[z][y] / c;
      const double var = std::max(0.0, t.sum_sq[z][y] / c - mean * mean);
      gap += z == 0 ? mean : -mean;
      variance += var / c;
    }
    if (variance > 0.0) {
      statistic += gap * gap / variance;
    } else if (gap != 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return statistic;
}

// Rate gaps for the trace in the configured mode.
SoftRates TraceRates(const Objective& objective, RateMode mode, const Matrix& x,
                     std::span<const std::uint8_t> labels, std::span<const std::uint8_t> group,
                     const Parameters& params, double threshold) {
  if (mode == RateMode::kSoft) return objective.rates;
  std::vector<double> logits(x.rows());
  LinearScores(x, params.weights, params.intercept, logits);
  std::vector<double> decisions(x.rows());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    decisions[i] = Sigmoid(logits[i]) >= threshold ? 1.0 : 0.0;
  }
  return RatesFrom(Tally(decisions, labels, group));
}

}  // namespace

double EodLoss(const LogitModel& model, const Dataset& data, std::string_view group,
               RateMode mode) {
  const auto& z = data.sensitive(group);
  std::vector<double> values = model.PredictProba(data.features());
  if (mode == RateMode::kHard) {
    for (double& v : values) v = v >= model.threshold ? 1.0 : 0.0;
  }
  return LossFrom(RatesFrom(Tally(values, data.labels(), z)));
}

LossAndGradient SoftEodLossAndGradient(const Matrix& x, std::span<const std::uint8_t> labels,
                                       std::span<const std::uint8_t> group,
                                       const Parameters& params, SoftRates* rates) {
  Objective objective = EvaluateObjective(x, labels, group, params, 0.0);
  if (rates != nullptr) *rates = objective.rates;
  return std::move(objective.total);
}

MitigationResult Mitigate(const LogitModel& model_perf, const Dataset& train,
                          const MitigationConfig& config) {
  config.Validate();
  model_perf.Validate();
  if (model_perf.feature_names != train.feature_names()) {
    throw DataError("model features do not match the training data");
  }
  if (!train.has_sensitive(config.sensitive_attribute)) {
    throw ConfigError("sensitive attribute '" + config.sensitive_attribute +
                      "' not present in the data");
  }

  std::vector<std::size_t> fit_rows(train.rows());
  std::vector<std::size_t> holdout_rows;
  for (std::size_t i = 0; i < fit_rows.size(); ++i) fit_rows[i] = i;
  if (config.holdout_fraction > 0.0) {
    SplitPlan plan;
    plan.train_fraction = 1.0 - config.holdout_fraction;
    plan.repeats = 1;
    plan.seed = config.seed;
    plan.stratify_on = {kLabelRole, config.sensitive_attribute};
    auto split = MakeSplits(train, plan).front();
    fit_rows = std::move(split.train);
    holdout_rows = std::move(split.test);
  }
  const Dataset fit = train.Subset(fit_rows);
  const auto& labels = fit.labels();
  const auto& group = fit.sensitive(config.sensitive_attribute);

  const Standardizer standardizer = Standardizer::Fit(fit.features());
  const Matrix x = standardizer.Apply(fit.features());

  const bool use_holdout = !holdout_rows.empty();
  Matrix holdout_x;
  std::vector<std::uint8_t> holdout_labels;
  if (use_holdout) {
    const Dataset holdout = train.Subset(holdout_rows);
    holdout_x = standardizer.Apply(holdout.features());
    holdout_labels = holdout.labels();
  }
  auto holdout_auroc = [&](const Parameters& p) {
    if (!use_holdout) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> logits(holdout_x.rows());
    LinearScores(holdout_x, p.weights, p.intercept, logits);
    return Auroc(logits, holdout_labels);
  };

  const double lambda = config.ce_anchor_weight;
  Parameters params = ToStandardized(model_perf, standardizer);
  Objective current = EvaluateObjective(x, labels, group, params, lambda);
  if (!std::isfinite(current.total.loss)) {
    throw NumericalError("mitigation objective is not finite at the starting model");
  }

  MitigationResult result;
  auto& trace = result.trace;
  double rate = config.learning_rate;
  auto record = [&](double auroc) {
    const SoftRates r = TraceRates(current, config.rate_mode, x, labels, group, params,
                                   model_perf.threshold);
    MitigationEpoch e;
    e.tpr_gap = r.tpr[0] - r.tpr[1];
    e.fpr_gap = r.fpr[0] - r.fpr[1];
    e.eod_loss = config.rate_mode == RateMode::kSoft ? current.eod : LossFrom(r);
    e.holdout_auroc = auroc;
    e.ce_loss = lambda != 0.0 ? current.ce : CrossEntropyLoss(x, labels, params);
    e.total_loss = current.total.loss;
    e.learning_rate = rate;
    trace.epochs.push_back(e);
  };
  const double baseline_auroc = holdout_auroc(params);
  record(baseline_auroc);

  // The gate tests the starting model on every training row.
  trace.gap_statistic = GapStatistic(model_perf.PredictProba(train.features()), train.labels(),
                                     train.sensitive(config.sensitive_attribute));
  // chi-square(2) upper quantile is -2 ln(alpha).
  const bool gated = config.significance_level > 0.0 &&
                     trace.gap_statistic <= -2.0 * std::log(config.significance_level);
  trace.gated = gated;
  trace.stop_reason = StopReason::kMaxEpochs;

  if (gated) {
    trace.stop_reason = StopReason::kConverged;
  } else {
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
      if (InfinityNorm(current.total) < config.grad_tolerance) {
        trace.stop_reason = StopReason::kConverged;
        break;
      }
      bool accepted = false;
      Parameters trial;
      Objective next;
      for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
        trial = params;
        for (std::size_t j = 0; j < trial.weights.size(); ++j) {
          trial.weights[j] -= rate * current.total.grad_weights[j];
        }
        trial.intercept -= rate * current.total.grad_intercept;
        next = EvaluateObjective(x, labels, group, trial, lambda);
        if (std::isfinite(next.total.loss) && next.total.loss <= current.total.loss) {
          accepted = true;
          break;
        }
        rate *= 0.5;
      }
      if (!accepted) {
        // No representable step lowers the objective: a numerical stationary point.
        trace.stop_reason = StopReason::kConverged;
        break;
      }
      const double auroc = holdout_auroc(trial);
      if (use_holdout && baseline_auroc - auroc > config.early_stop_auroc_drop) {
        trace.stop_reason = StopReason::kEarlyStop;
        break;
      }
      params = std::move(trial);
      current = std::move(next);
      record(auroc);
    }
  }

  result.model = FromStandardized(params, standardizer, train.feature_names(), 0.5);
  const auto scores = result.model.PredictProba(train.features());
  result.model.threshold = SelectThresholdEr(Roc(scores, train.labels()));
  result.model.Validate();
  return result;
}

void WriteTraceCsv(std::ostream& out, const MitigationTrace& trace,
                   std::optional<std::size_t> split, bool header) {
  if (header) {
    if (split) out << "split,";
    out << "epoch,eod_loss,tpr_gap,fpr_gap,holdout_auroc\n";
  }
  const auto old_precision = out.precision(17);
  for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
    const auto& row = trace.epochs[e];
    if (split) out << *split << ',';
    out << e << ',' << row.eod_loss << ',' << row.tpr_gap << ',' << row.fpr_gap << ',';
    if (std::isfinite(row.holdout_auroc)) out << row.holdout_auroc;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fairex
