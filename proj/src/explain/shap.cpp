#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "fairex/error.hpp"
#include "fairex/shap.hpp"

namespace fairex {

std::string_view AggregationName(Aggregation aggregation) {
  return aggregation == Aggregation::kMeanAbs ? "mean_abs" : "mean_signed";
}

Aggregation ParseAggregation(std::string_view text) {
  if (text == "mean_abs") return Aggregation::kMeanAbs;
  if (text == "mean_signed") return Aggregation::kMeanSigned;
  throw ConfigError("aggregation must be 'mean_abs' or 'mean_signed', got '" +
                    std::string(text) + "'");
}

namespace {

void CheckBackground(const LogitModel& model, std::span<const double> background) {
  if (background.size() != model.size()) {
    throw DataError("background has " + std::to_string(background.size()) +
                    " features, model expects " + std::to_string(model.size()));
  }
  for (double v : background) {
    if (!std::isfinite(v)) throw DataError("background means must be finite");
  }
}

std::vector<double> ColumnMeans(const Matrix& x) {
  std::vector<double> means(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double total = 0.0;
    for (double v : x.col(j)) total += v;
    means[j] = total / static_cast<double>(x.rows());
  }
  return means;
}

}  // namespace

AttributionMatrix ShapleyLinear(const LogitModel& model, const Matrix& x,
                                std::span<const double> background_means) {
  CheckBackground(model, background_means);
  if (x.cols() != model.size()) {
    throw DataError("input has " + std::to_string(x.cols()) + " features, model expects " +
                    std::to_string(model.size()));
  }
  AttributionMatrix out;
  out.values = Matrix(x.rows(), x.cols());
  out.scale = AttributionScale::kLogit;
  out.background_means.assign(background_means.begin(), background_means.end());
  out.feature_names = model.feature_names;
  out.base_value = model.intercept;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double w = model.weights[j];
    const double mean = background_means[j];
    out.base_value += w * mean;
    const auto source = x.col(j);
    auto target = out.values.col(j);
    for (std::size_t i = 0; i < x.rows(); ++i) target[i] = w * (source[i] - mean);
  }
  return out;
}

std::vector<double> ShapleyBruteForce(const LogitModel& model, std::span<const double> x,
                                      std::span<const double> background_means,
                                      AttributionScale scale) {
  CheckBackground(model, background_means);
  const std::size_t m = model.size();
  if (x.size() != m) throw DataError("instance length does not match the model");
  if (m > kMaxBruteForceFeatures) {
    throw ConfigError("brute-force Shapley supports at most " +
                      std::to_string(kMaxBruteForceFeatures) + " features, got " +
                      std::to_string(m));
  }

  // Value of every coalition, indexed by bitmask.
  const std::size_t subsets = std::size_t{1} << m;
  std::vector<double> value(subsets);
  std::vector<double> point(m);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    for (std::size_t j = 0; j < m; ++j) point[j] = (mask >> j) & 1 ? x[j] : background_means[j];
    const double logit = model.Logit(point);
    value[mask] = scale == AttributionScale::kLogit ? logit : Sigmoid(logit);
  }

  // weight[s] = s! (m - s - 1)! / m!
  std::vector<double> weight(m);
  for (std::size_t s = 0; s < m; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s + 1)) +
                         std::lgamma(static_cast<double>(m - s)) -
                         std::lgamma(static_cast<double>(m + 1)));
  }

  std::vector<double> phi(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      phi[j] += weight[size] * (value[mask | bit] - value[mask]);
    }
  }
  return phi;
}

const RankedFeature& ImportanceRanking::Find(std::string_view name) const {
  for (const auto& f : features) {
    if (f.name == name) return f;
  }
  throw DataError("feature '" + std::string(name) + "' not in ranking");
}

ImportanceRanking RankScores(std::span<const std::string> names, std::span<const double> scores,
                             Aggregation aggregation) {
  if (names.empty() || names.size() != scores.size()) {
    throw DataError("ranking needs one score per feature and at least one feature");
  }
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return names[a] < names[b];
  });
  ImportanceRanking ranking;
  ranking.aggregation = aggregation;
  ranking.degenerate = std::all_of(scores.begin(), scores.end(),
                                   [&](double s) { return s == scores[0]; });
  for (std::size_t r = 0; r < order.size(); ++r) {
    ranking.features.push_back(
        {names[order[r]], scores[order[r]], r + 1, static_cast<double>(r + 1)});
  }
  return ranking;
}

ImportanceRanking RankFeatures(const AttributionMatrix& attributions, Aggregation aggregation) {
  const Matrix& values = attributions.values;
  if (values.rows() == 0 || values.cols() == 0) throw DataError("attribution matrix is empty");
  std::vector<double> scores(values.cols());
  for (std::size_t j = 0; j < values.cols(); ++j) {
    double total = 0.0;
    for (double v : values.col(j)) total += aggregation == Aggregation::kMeanAbs ? std::abs(v) : v;
    scores[j] = total / static_cast<double>(values.rows());
  }
  return RankScores(attributions.feature_names, scores, aggregation);
}

ImportanceRanking AggregateRankings(std::span<const ImportanceRanking> rankings) {
  if (rankings.empty()) throw DataError("no rankings to aggregate");
  std::map<std::string, std::pair<double, double>> totals;  // name -> (rank, score)
  for (const auto& f : rankings.front().features) totals[f.name] = {0.0, 0.0};
  for (const auto& ranking : rankings) {
    if (ranking.features.size() != totals.size()) {
      throw DataError("rankings cover different feature sets");
    }
    for (const auto& f : ranking.features) {
      const auto it = totals.find(f.name);
      if (it == totals.end()) throw DataError("rankings cover different feature sets");
      it->second.first += static_cast<double>(f.rank);
      it->second.second += f.score;
    }
  }
  const double count = static_cast<double>(rankings.size());
  std::vector<RankedFeature> features;
  for (const auto& [name, sums] : totals) {
    features.push_back({name, sums.second / count, 0, sums.first / count});
  }
  std::sort(features.begin(), features.end(), [](const auto& a, const auto& b) {
    if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
    return a.name < b.name;
  });
  ImportanceRanking out;
  out.aggregation = rankings.front().aggregation;
  for (std::size_t r = 0; r < features.size(); ++r) features[r].rank = r + 1;
  out.degenerate = std::all_of(rankings.begin(), rankings.end(),
                               [](const auto& r) { return r.degenerate; });
  out.features = std::move(features);
  return out;
}

RankDeltaReport CompareRankings(const ImportanceRanking& perf, const ImportanceRanking& fair,
                                std::size_t top_k, std::size_t min_abs_delta) {
  if (perf.features.size() != fair.features.size()) {
    throw DataError("rankings cover different feature sets");
  }
  RankDeltaReport report;
  for (const auto& f : perf.features) {
    const auto& other = fair.Find(f.name);
    report.features.push_back({f.name, f.rank, other.rank,
                               static_cast<long>(f.rank) - static_cast<long>(other.rank)});
  }
  std::vector<RankDelta> candidates;
  for (const auto& d : report.features) {
    if (static_cast<std::size_t>(std::labs(d.delta)) >= min_abs_delta) candidates.push_back(d);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (std::labs(a.delta) != std::labs(b.delta)) return std::labs(a.delta) > std::labs(b.delta);
    return a.name < b.name;
  });
  if (candidates.size() > top_k) candidates.resize(top_k);
  report.most_changed = std::move(candidates);
  return report;
}

ExplanationResult ExplainFairnessShift(const LogitModel& model_perf, const LogitModel& model_fair,
                                       const Dataset& train, const Dataset& test,
                                       std::size_t top_k, Aggregation aggregation) {
  if (model_perf.feature_names != model_fair.feature_names ||
      model_perf.feature_names != train.feature_names() ||
      train.feature_names() != test.feature_names()) {
    throw DataError("models and datasets must share one feature space");
  }
  const auto background = ColumnMeans(train.features());
  ExplanationResult result;
  result.attributions_perf = ShapleyLinear(model_perf, test.features(), background);
  result.attributions_fair = ShapleyLinear(model_fair, test.features(), background);
  result.ranking_perf = RankFeatures(result.attributions_perf, aggregation);
  result.ranking_fair = RankFeatures(result.attributions_fair, aggregation);
  result.deltas = CompareRankings(result.ranking_perf, result.ranking_fair, top_k);
  return result;
}

void WriteAttributionCsv(std::ostream& out, const AttributionMatrix& attributions) {
  for (std::size_t j = 0; j < attributions.feature_names.size(); ++j) {
    out << (j ? "," : "") << attributions.feature_names[j];
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  const Matrix& v = attributions.values;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) out << (j ? "," : "") << v(i, j);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fairex
