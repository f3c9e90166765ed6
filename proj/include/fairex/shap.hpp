#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairex/dataset.hpp"
#include "fairex/logit.hpp"
#include "fairex/matrix.hpp"

namespace fairex {

enum class AttributionScale { kLogit, kProbability };
enum class Aggregation { kMeanAbs, kMeanSigned };

std::string_view AggregationName(Aggregation aggregation);
Aggregation ParseAggregation(std::string_view text);

// Per-instance Shapley values against a single reference point (the
// background means). On the logit scale, base_value + row sum equals the
// model logit of that instance.
struct AttributionMatrix {
  Matrix values;  // instances x features
  double base_value = 0.0;
  AttributionScale scale = AttributionScale::kLogit;
  std::vector<double> background_means;
  std::vector<std::string> feature_names;
};

// Closed-form interventional Shapley values of a linear logit:
// phi_ij = w_j * (x_ij - mean_j), base = w . mean + b.
AttributionMatrix ShapleyLinear(const LogitModel& model, const Matrix& x,
                                std::span<const double> background_means);

inline constexpr std::size_t kMaxBruteForceFeatures = 20;

// Exact Shapley values by enumerating all 2^m coalitions; absent features
// take their background mean. Throws ConfigError for m > 20.
std::vector<double> ShapleyBruteForce(const LogitModel& model,
                                      std::span<const double> x,
                                      std::span<const double> background_means,
                                      AttributionScale scale);

struct RankedFeature {
  std::string name;
  double score = 0.0;
  std::size_t rank = 0;    // 1 = most important
  double mean_rank = 0.0;  // equals rank unless produced by AggregateRankings
};

struct ImportanceRanking {
  std::vector<RankedFeature> features;  // ordered by rank
  Aggregation aggregation = Aggregation::kMeanAbs;
  bool degenerate = false;  // every aggregated score identical

  // Throws DataError for an unknown feature.
  const RankedFeature& Find(std::string_view name) const;
};

// Ranks features by descending score, ties broken by name.
ImportanceRanking RankScores(std::span<const std::string> names,
                             std::span<const double> scores,
                             Aggregation aggregation);

// Aggregates each column (mean |phi| or mean phi) and ranks.
ImportanceRanking RankFeatures(const AttributionMatrix& attributions,
                               Aggregation aggregation = Aggregation::kMeanAbs);

// Mean rank per feature across rankings, then re-ranked ascending (ties by
// name). Scores become mean scores.
ImportanceRanking AggregateRankings(std::span<const ImportanceRanking> rankings);

struct RankDelta {
  std::string name;
  std::size_t rank_perf = 0;
  std::size_t rank_fair = 0;
  long delta = 0;  // rank_perf - rank_fair; positive = gained importance
};

struct RankDeltaReport {
  std::vector<RankDelta> features;       // in rank_perf order
  std::vector<RankDelta> most_changed;   // the set C
};

// C holds up to top_k features with |delta| >= min_abs_delta, ordered by
// |delta| descending and then name.
RankDeltaReport CompareRankings(const ImportanceRanking& perf,
                                const ImportanceRanking& fair, std::size_t top_k,
                                std::size_t min_abs_delta = 1);

struct ExplanationResult {
  AttributionMatrix attributions_perf;
  AttributionMatrix attributions_fair;
  ImportanceRanking ranking_perf;
  ImportanceRanking ranking_fair;
  RankDeltaReport deltas;
};

// Explains both models on the test rows with train-set means as background,
// aggregates, ranks and compares.
ExplanationResult ExplainFairnessShift(const LogitModel& model_perf,
                                       const LogitModel& model_fair,
                                       const Dataset& train, const Dataset& test,
                                       std::size_t top_k,
                                       Aggregation aggregation = Aggregation::kMeanAbs);

// CSV with one row per instance and one column per feature.
void WriteAttributionCsv(std::ostream& out, const AttributionMatrix& attributions);

}  // namespace fairex
