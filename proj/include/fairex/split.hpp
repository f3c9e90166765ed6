#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairex/dataset.hpp"

namespace fairex {

// Role name used in SplitPlan::stratify_on for the class label.
inline constexpr const char* kLabelRole = "label";

struct SplitPlan {
  double train_fraction = 0.9;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  // Column roles whose joint cells form the strata: "label" and/or sensitive
  // attribute names. Empty means the label plus every sensitive attribute.
  std::vector<std::string> stratify_on;

  void Validate() const;
};

struct Split {
  std::vector<std::size_t> train;  // sorted
  std::vector<std::size_t> test;   // sorted
};

// `plan.repeats` stratified partitions of the row indices. Within each
// stratum the train count is the largest-remainder share of the overall
// train size, so it never deviates from train_fraction * stratum_size by a
// full row. Throws DataError when a stratum has fewer than two rows.
std::vector<Split> MakeSplits(const Dataset& data, const SplitPlan& plan);

}  // namespace fairex
