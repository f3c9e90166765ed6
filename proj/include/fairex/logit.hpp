#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairex/dataset.hpp"
#include "fairex/matrix.hpp"

namespace fairex {

// Logistic function, evaluated without overflow for any finite input and
// clamped to the open interval (0, 1).
double Sigmoid(double logit);

// log(1 + exp(v)) without overflow.
double Softplus(double v);

struct LogitModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double intercept = 0.0;
  double threshold = 0.5;  // predict 1 iff probability >= threshold

  // Throws DataError on non-finite weights, mismatched names or a threshold
  // outside (0, 1).
  void Validate() const;

  std::size_t size() const { return weights.size(); }

  // Throws DataError on a dimension mismatch.
  double Logit(std::span<const double> x) const;
  double PredictProba(std::span<const double> x) const;

  std::vector<double> Logits(const Matrix& x) const;
  std::vector<double> PredictProba(const Matrix& x) const;
  std::vector<std::uint8_t> Decide(const Matrix& x) const;

  bool operator==(const LogitModel&) const = default;
};

// Optimizer state on the (possibly standardized) design matrix.
struct Parameters {
  std::vector<double> weights;
  double intercept = 0.0;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_intercept = 0.0;
};

// Mean binary cross-entropy plus 0.5 * l2_penalty * |w|^2 (intercept not
// penalized), computed from logits so saturated predictions stay finite.
double CrossEntropyLoss(const Matrix& x, std::span<const std::uint8_t> labels,
                        const Parameters& params, double l2_penalty = 0.0);
LossAndGradient CrossEntropyLossAndGradient(const Matrix& x,
                                            std::span<const std::uint8_t> labels,
                                            const Parameters& params,
                                            double l2_penalty = 0.0);

// Converts between raw-feature models and parameters on standardized
// features: w_std = w_raw * scale, b_std = b_raw + sum_j w_raw_j * mean_j.
Parameters ToStandardized(const LogitModel& model, const Standardizer& s);
LogitModel FromStandardized(const Parameters& params, const Standardizer& s,
                            std::vector<std::string> feature_names,
                            double threshold);

// ---------------------------------------------------------------------------
// ROC and threshold selection

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double cutoff = 0.0;  // +inf for the (0, 0) origin
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// One point per distinct score (descending), preceded by the (0, 0) origin.
// A score s is classified positive at cutoff c iff s >= c, so the lowest
// cutoff always yields (1, 1). Throws DataError if a class is missing.
RocCurve Roc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Exact trapezoidal area, accumulated in integer counts.
double AreaUnderCurve(const RocCurve& curve);

struct ErChoice {
  std::size_t index = 0;
  double cutoff = 0.0;
  double distance = 0.0;
};

// Closest-to-(0,1) rule: the finite-cutoff point minimizing
// sqrt(fpr^2 + (1 - tpr)^2); ties go to smaller fpr, then larger cutoff.
ErChoice SelectErPoint(const RocCurve& curve);
double SelectThresholdEr(const RocCurve& curve);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  double learning_rate = 1.0;
  std::size_t max_epochs = 5000;
  double grad_tolerance = 1e-6;  // infinity norm on standardized features
  double l2_penalty = 0.0;
  double init_jitter = 0.0;  // half-width of uniform initial weights
  std::uint64_t seed = 0;

  void Validate() const;
};

struct TrainOutcome {
  LogitModel model;
  Standardizer standardizer;
  std::vector<double> loss_history;  // accepted objective values, epoch 0 first
  double final_cross_entropy = 0.0;  // unpenalized
  double final_gradient_norm = 0.0;
  std::size_t epochs = 0;
};

// Full-batch gradient descent on standardized features. A step that raises
// the objective is retried with half the learning rate, and the halved rate
// is kept. The threshold is set by the closest-to-(0,1) rule on the training
// ROC. Throws DataError on single-class labels and NumericalError on
// divergence or when max_epochs pass without meeting grad_tolerance.
TrainOutcome FitPerformanceModel(const Dataset& train, const TrainConfig& config);
LogitModel TrainPerformance(const Dataset& train, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Serialization: flat "key = value" lines, 17 significant digits.

std::string SerializeModel(const LogitModel& model);
LogitModel ParseModel(std::string_view text);
void SaveModel(const LogitModel& model, const std::filesystem::path& path);
LogitModel LoadModel(const std::filesystem::path& path);

}  // namespace fairex
