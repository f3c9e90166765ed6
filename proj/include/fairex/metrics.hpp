#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairex/dataset.hpp"
#include "fairex/logit.hpp"

namespace fairex {

// Trapezoidal AUROC; equals P(s+ > s-) + 0.5 P(s+ = s-).
double Auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct GroupCell {
  std::optional<double> tpr;  // absent when the group has no positives
  std::optional<double> fpr;  // absent when the group has no negatives
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct GroupRates {
  std::string attribute;
  std::array<GroupCell, 2> groups;  // indexed by z
  int privileged = 1;               // z value of the larger group

  bool complete() const;
};

// Privileged group of an attribute: the value with more rows (ties -> 1).
int LargerGroup(std::span<const std::uint8_t> values);

GroupRates ComputeGroupRates(std::span<const std::uint8_t> decisions,
                             std::span<const std::uint8_t> labels,
                             std::span<const std::uint8_t> group,
                             std::string attribute, int privileged);

struct ConfusionSummary {
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::vector<GroupRates> groups;  // one per sensitive attribute
};

// Hard decisions at the model threshold. `privileged` overrides the
// data-derived privileged group per attribute.
ConfusionSummary ConfusionRates(const LogitModel& model, const Dataset& test,
                                const std::map<std::string, int>& privileged = {});

struct Eod {
  double abs = 0.0;  // (|dTPR| + |dFPR|) / 2, the headline figure
  double sq = 0.0;   // (dTPR^2 + dFPR^2) / 2
};

// Throws DataError when a rate is absent.
Eod ComputeEod(const GroupRates& rates);

struct AttributeFairness {
  GroupRates rates;
  std::optional<Eod> eod;
};

struct EvalReport {
  double auroc = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::size_t n_test = 0;
  std::vector<AttributeFairness> attributes;
};

EvalReport Evaluate(const LogitModel& model, const Dataset& test,
                    const std::map<std::string, int>& privileged = {});

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

struct AggregateReport {
  std::size_t repeats = 0;
  // Keys: auroc, sensitivity, specificity, eod_abs.<attr>, eod_sq.<attr>,
  // tpr_gap.<attr>, fpr_gap.<attr>. A fairness metric absent in some split
  // has count < repeats.
  std::map<std::string, MetricSummary> metrics;
};

AggregateReport Aggregate(std::span<const EvalReport> reports);

// Two-pass mean and population standard deviation.
MetricSummary Summarize(std::span<const double> values);

}  // namespace fairex
