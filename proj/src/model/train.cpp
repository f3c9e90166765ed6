#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fairex/error.hpp"
#include "fairex/logit.hpp"

namespace fairex {
namespace {

constexpr int kMaxHalvings = 80;

double InfinityNorm(const LossAndGradient& g) {
  double norm = std::abs(g.grad_intercept);
  for (double v : g.grad_weights) norm = std::max(norm, std::abs(v));
  return norm;
}

Parameters Step(const Parameters& from, const LossAndGradient& g, double rate) {
  Parameters to = from;
  for (std::size_t j = 0; j < to.weights.size(); ++j) to.weights[j] -= rate * g.grad_weights[j];
  to.intercept -= rate * g.grad_intercept;
  return to;
}

std::string Format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train.learning_rate must be positive");
  }
  if (max_epochs == 0) throw ConfigError("train.max_epochs must be positive");
  if (!(grad_tolerance > 0.0)) throw ConfigError("train.grad_tolerance must be positive");
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) {
    throw ConfigError("train.l2_penalty must be non-negative");
  }
  if (!(init_jitter >= 0.0) || !std::isfinite(init_jitter)) {
    throw ConfigError("train.init_jitter must be non-negative");
  }
}

TrainOutcome FitPerformanceModel(const Dataset& train, const TrainConfig& config) {
  config.Validate();
  const auto& labels = train.labels();
  const auto positives = std::count(labels.begin(), labels.end(), std::uint8_t{1});
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    throw DataError("training labels contain a single class");
  }

  TrainOutcome outcome;
  outcome.standardizer = Standardizer::Fit(train.features());
  const Matrix z = outcome.standardizer.Apply(train.features());

  Parameters params;
  params.weights.assign(train.cols(), 0.0);
  if (config.init_jitter > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> jitter(-config.init_jitter, config.init_jitter);
    for (double& w : params.weights) w = jitter(rng);
  }

  LossAndGradient current = CrossEntropyLossAndGradient(z, labels, params, config.l2_penalty);
  if (!std::isfinite(current.loss)) throw NumericalError("initial training loss is not finite");
  outcome.loss_history.push_back(current.loss);

  double rate = config.learning_rate;
  bool converged = false;
  std::size_t epoch = 0;
  for (; epoch < config.max_epochs; ++epoch) {
    if (InfinityNorm(current) < config.grad_tolerance) {
      converged = true;
      break;
    }
    int halvings = 0;
    while (true) {
      Parameters trial = Step(params, current, rate);
      LossAndGradient next = CrossEntropyLossAndGradient(z, labels, trial, config.l2_penalty);
      if (std::isfinite(next.loss) && next.loss <= current.loss) {
        params = std::move(trial);
        current = std::move(next);
        break;
      }
      if (++halvings > kMaxHalvings) {
        throw NumericalError("training stalled at epoch " + std::to_string(epoch) +
                             ": no decreasing step, gradient norm " +
                             Format(InfinityNorm(current)));
      }
      rate *= 0.5;
    }
    outcome.loss_history.push_back(current.loss);
  }
  outcome.final_gradient_norm = InfinityNorm(current);
  if (!converged && outcome.final_gradient_norm < config.grad_tolerance) converged = true;
  if (!converged) {
    throw NumericalError("training did not converge within " +
                         std::to_string(config.max_epochs) + " epochs; final gradient norm " +
                         Format(outcome.final_gradient_norm));
  }
  outcome.epochs = epoch;
  outcome.final_cross_entropy =
      config.l2_penalty == 0.0 ? current.loss : CrossEntropyLoss(z, labels, params, 0.0);

  outcome.model = FromStandardized(params, outcome.standardizer, train.feature_names(), 0.5);
  const auto scores = outcome.model.PredictProba(train.features());
  outcome.model.threshold = SelectThresholdEr(Roc(scores, labels));
  outcome.model.Validate();
  return outcome;
}

LogitModel TrainPerformance(const Dataset& train, const TrainConfig& config) {
  return FitPerformanceModel(train, config).model;
}

}  // namespace fairex
