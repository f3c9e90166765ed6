#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fairex/error.hpp"
#include "fairex/split.hpp"

namespace fairex {

void SplitPlan::Validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split.train_fraction must lie in (0, 1)");
  }
  if (repeats == 0) throw ConfigError("split.repeats must be positive");
}

std::vector<Split> MakeSplits(const Dataset& data, const SplitPlan& plan) {
  plan.Validate();
  std::vector<const std::vector<std::uint8_t>*> roles;
  if (plan.stratify_on.empty()) {
    roles.push_back(&data.labels());
    for (const auto& column : data.sensitive()) roles.push_back(&column.values);
  } else {
    for (const auto& role : plan.stratify_on) {
      roles.push_back(role == kLabelRole ? &data.labels() : &data.sensitive(role));
    }
  }

  // Stratum key: the bits of every role value for the row.
  std::map<std::uint64_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::uint64_t key = 0;
    for (const auto* role : roles) key = (key << 1) | (*role)[i];
    strata[key].push_back(i);
  }
  for (const auto& [key, members] : strata) {
    if (members.size() < 2) {
      throw DataError("stratum " + std::to_string(key) + " has " +
                      std::to_string(members.size()) +
                      " row(s); at least 2 are needed to split it");
    }
  }

  // Largest-remainder allocation of round(f * n) train rows across strata.
  const double f = plan.train_fraction;
  std::vector<std::size_t> take;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t allocated = 0;
  std::size_t s = 0;
  for (const auto& [key, members] : strata) {
    const double quota = f * static_cast<double>(members.size());
    std::size_t base = static_cast<std::size_t>(std::floor(quota));
    take.push_back(base);
    remainders.emplace_back(quota - static_cast<double>(base), s++);
    allocated += base;
  }
  const auto target = static_cast<std::size_t>(std::llround(f * static_cast<double>(data.rows())));
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; allocated < target && r < remainders.size(); ++r) {
    if (remainders[r].first <= 0.0) break;
    ++take[remainders[r].second];
    ++allocated;
  }
  // Every stratum keeps at least one training row.
  for (auto& t : take) t = std::max<std::size_t>(t, 1);

  std::vector<Split> splits;
  splits.reserve(plan.repeats);
  for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                      static_cast<std::uint32_t>(rep)};
    std::mt19937_64 rng(seq);
    Split split;
    std::size_t stratum = 0;
    for (const auto& [key, members] : strata) {
      std::vector<std::size_t> shuffled = members;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const std::size_t k = take[stratum++];
      split.train.insert(split.train.end(), shuffled.begin(), shuffled.begin() + k);
      split.test.insert(split.test.end(), shuffled.begin() + k, shuffled.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace fairex
