#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairex/dataset.hpp"
#include "fairex/logit.hpp"

namespace fairex {

// kSoft averages predicted probabilities inside each (group, label) cell;
// kHard averages thresholded decisions and has no useful gradient.
enum class RateMode { kSoft, kHard };

std::string_view RateModeName(RateMode mode);
RateMode ParseRateMode(std::string_view text);

struct MitigationConfig {
  std::string sensitive_attribute;
  double learning_rate = 0.1;
  std::size_t max_epochs = 2000;
  RateMode rate_mode = RateMode::kSoft;
  double ce_anchor_weight = 0.0;  // lambda in L_EOD + lambda * L_CE
  double early_stop_auroc_drop = 0.02;
  double holdout_fraction = 0.2;   // 0 disables the holdout and early stop
  double grad_tolerance = 1e-8;    // infinity norm on standardized features
  // Fine-tuning is skipped when the starting model's soft rate gaps are not
  // significant at this level (chi-square, 2 dof). 0 disables the gate.
  double significance_level = 1e-4;
  std::uint64_t seed = 0;

  void Validate() const;
};

enum class StopReason { kConverged, kMaxEpochs, kEarlyStop };

std::string_view StopReasonName(StopReason reason);

struct MitigationEpoch {
  double eod_loss = 0.0;
  double tpr_gap = 0.0;  // soft TPR(z=0) - TPR(z=1)
  double fpr_gap = 0.0;
  double holdout_auroc = 0.0;  // NaN without a holdout
  double ce_loss = 0.0;
  double total_loss = 0.0;
  double learning_rate = 0.0;
};

struct MitigationTrace {
  std::vector<MitigationEpoch> epochs;  // epochs[0] is the starting model
  StopReason stop_reason = StopReason::kConverged;
  double gap_statistic = 0.0;  // chi-square statistic of the starting gaps
  bool gated = false;          // true when the significance gate skipped descent
};

struct MitigationResult {
  LogitModel model;
  MitigationTrace trace;
};

// Soft or hard equalized-odds disparity,
//   (TPR_0 - TPR_1)^2 + (FPR_0 - FPR_1)^2.
// Throws DataError when a (group, label) cell is empty.
double EodLoss(const LogitModel& model, const Dataset& data,
               std::string_view group, RateMode mode);

struct SoftRates {
  double tpr[2] = {0.0, 0.0};
  double fpr[2] = {0.0, 0.0};
};

// Soft L_EOD and its gradient with respect to (w, b) on the given design.
LossAndGradient SoftEodLossAndGradient(const Matrix& x,
                                       std::span<const std::uint8_t> labels,
                                       std::span<const std::uint8_t> group,
                                       const Parameters& params,
                                       SoftRates* rates = nullptr);

// Gradient descent on L_EOD + lambda * L_CE from the performance model,
// accepting only steps that lower the objective. The threshold is re-chosen
// by the closest-to-(0,1) rule on the full training set.
MitigationResult Mitigate(const LogitModel& model_perf, const Dataset& train,
                          const MitigationConfig& config);

// CSV with columns epoch,eod_loss,tpr_gap,fpr_gap,holdout_auroc. When
// `split` is set, a leading split column is written.
void WriteTraceCsv(std::ostream& out, const MitigationTrace& trace,
                   std::optional<std::size_t> split = std::nullopt,
                   bool header = true);

}  // namespace fairex
