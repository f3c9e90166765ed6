#include <cmath>
#include <limits>
#include <string>

#include "fairex/error.hpp"
#include "fairex/kernels.hpp"
#include "fairex/logit.hpp"

namespace fairex {
namespace {

constexpr double kProbFloor = std::numeric_limits<double>::min();
// Largest double below 1.
const double kProbCeiling = std::nextafter(1.0, 0.0);

}  // namespace

double Sigmoid(double logit) {
  double p;
  if (logit >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-logit));
  } else {
    const double e = std::exp(logit);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbFloor, kProbCeiling);
}

double Softplus(double v) {
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

void LogitModel::Validate() const {
  if (feature_names.size() != weights.size()) {
    throw DataError("model has " + std::to_string(weights.size()) + " weights but " +
                    std::to_string(feature_names.size()) + " feature names");
  }
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!std::isfinite(weights[j])) {
      throw DataError("weight of '" + feature_names[j] + "' is not finite");
    }
  }
  if (!std::isfinite(intercept)) throw DataError("intercept is not finite");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DataError("threshold " + std::to_string(threshold) + " outside (0, 1)");
  }
}

double LogitModel::Logit(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw DataError("input has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(weights.size()));
  }
  return intercept + kernels::Dot(weights, x);
}

double LogitModel::PredictProba(std::span<const double> x) const { return Sigmoid(Logit(x)); }

std::vector<double> LogitModel::Logits(const Matrix& x) const {
  if (x.cols() != weights.size()) {
    throw DataError("input has " + std::to_string(x.cols()) + " features, model expects " +
                    std::to_string(weights.size()));
  }
  std::vector<double> out(x.rows());
  LinearScores(x, weights, intercept, out);
  return out;
}

std::vector<double> LogitModel::PredictProba(const Matrix& x) const {
  auto out = Logits(x);
  for (double& v : out) v = Sigmoid(v);
  return out;
}

std::vector<std::uint8_t> LogitModel::Decide(const Matrix& x) const {
  const auto proba = PredictProba(x);
  std::vector<std::uint8_t> out(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= threshold ? 1 : 0;
  return out;
}

namespace {

// Mean of softplus(s) - y * s, which equals the mean cross-entropy.
double MeanCrossEntropy(std::span<const double> logits, std::span<const std::uint8_t> labels) {
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    acc += Softplus(logits[i]) - (labels[i] ? logits[i] : 0.0);
  }
  return acc / static_cast<double>(logits.size());
}

double Penalty(const Parameters& params, double l2_penalty) {
  if (l2_penalty == 0.0) return 0.0;
  return 0.5 * l2_penalty * kernels::Dot(params.weights, params.weights);
}

}  // namespace

double CrossEntropyLoss(const Matrix& x, std::span<const std::uint8_t> labels,
                        const Parameters& params, double l2_penalty) {
  std::vector<double> logits(x.rows());
  LinearScores(x, params.weights, params.intercept, logits);
  return MeanCrossEntropy(logits, labels) + Penalty(params, l2_penalty);
}

LossAndGradient CrossEntropyLossAndGradient(const Matrix& x,
                                            std::span<const std::uint8_t> labels,
                                            const Parameters& params, double l2_penalty) {
  const std::size_t n = x.rows();
  std::vector<double> logits(n);
  LinearScores(x, params.weights, params.intercept, logits);

  LossAndGradient out;
  out.loss = MeanCrossEntropy(logits, labels) + Penalty(params, l2_penalty);

  // Residual p - y, pre-scaled by 1/n.
  std::vector<double> residual(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    residual[i] = (Sigmoid(logits[i]) - labels[i]) * inv_n;
  }
  out.grad_weights.resize(x.cols());
  TransposedProduct(x, residual, out.grad_weights);
  if (l2_penalty != 0.0) {
    kernels::Axpy(l2_penalty, params.weights, out.grad_weights);
  }
  out.grad_intercept = kernels::Sum(residual);
  return out;
}

Parameters ToStandardized(const LogitModel& model, const Standardizer& s) {
  Parameters p;
  p.weights.resize(model.weights.size());
  p.intercept = model.intercept;
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    p.weights[j] = model.weights[j] * s.scales[j];
    p.intercept += model.weights[j] * s.means[j];
  }
  return p;
}

LogitModel FromStandardized(const Parameters& params, const Standardizer& s,
                            std::vector<std::string> feature_names, double threshold) {
  LogitModel model;
  model.feature_names = std::move(feature_names);
  model.weights.resize(params.weights.size());
  model.intercept = params.intercept;
  for (std::size_t j = 0; j < params.weights.size(); ++j) {
    model.weights[j] = params.weights[j] / s.scales[j];
    model.intercept -= model.weights[j] * s.means[j];
  }
  model.threshold = threshold;
  return model;
}

}  // namespace fairex
