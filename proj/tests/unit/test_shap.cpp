#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fairex/error.hpp"
#include "fairex/shap.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using fairex::Aggregation;
using fairex::AttributionScale;
using fairex::ImportanceRanking;
using fairex::LogitModel;

namespace {

LogitModel Model(std::vector<double> w, double b) {
  LogitModel m;
  m.weights = std::move(w);
  m.intercept = b;
  m.feature_names = fixture::Names(m.weights.size());
  return m;
}

LogitModel RandomModel(std::mt19937_64& rng, std::size_t m) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(m);
  for (auto& v : w) v = normal(rng);
  return Model(w, normal(rng));
}

ImportanceRanking Ranked(std::vector<std::string> names, std::vector<double> scores) {
  return fairex::RankScores(names, scores, Aggregation::kMeanAbs);
}

}  // namespace

TEST_CASE("two-feature example") {
  const LogitModel m = Model({2.0, 0.0}, -1.0);
  const std::vector<double> mean{0.5, 0.5};
  const auto a = fairex::ShapleyLinear(m, fixture::FromRows({{1.0, 0.0}}), mean);
  CHECK(a.values(0, 0) == 1.0);
  CHECK(a.values(0, 1) == 0.0);
  CHECK(a.base_value == 0.0);
  const auto brute =
      fairex::ShapleyBruteForce(m, std::vector<double>{1.0, 0.0}, mean, AttributionScale::kLogit);
  CHECK(brute[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(brute[1] == 0.0);
}

TEST_CASE("closed form equals coalition enumeration and sums to the logit") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (std::size_t m : {1u, 2u, 5u, 9u, 12u}) {
    CAPTURE(m);
    const LogitModel model = RandomModel(rng, m);
    std::vector<double> mean(m), x(m);
    for (auto& v : mean) v = normal(rng);
    for (auto& v : x) v = normal(rng);
    const auto linear = fairex::ShapleyLinear(model, fixture::FromRows({x}), mean);
    const auto brute = fairex::ShapleyBruteForce(model, x, mean, AttributionScale::kLogit);
    double total = linear.base_value;
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(std::abs(linear.values(0, j) - brute[j]) < 1e-10);
      total += linear.values(0, j);
    }
    CHECK(std::abs(total - model.Logit(x)) < 1e-10);
  }
}

TEST_CASE("probability-scale values match an ordering oracle and are efficient") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t m = 6;
  const LogitModel model = RandomModel(rng, m);
  std::vector<double> mean(m), x(m);
  for (auto& v : mean) v = normal(rng);
  for (auto& v : x) v = normal(rng);
  auto value = [&](unsigned mask) {
    double s = model.intercept;
    for (std::size_t j = 0; j < m; ++j) s += model.weights[j] * ((mask >> j) & 1u ? x[j] : mean[j]);
    return oracle::WideSigmoid(s);
  };
  const auto phi = fairex::ShapleyBruteForce(model, x, mean, AttributionScale::kProbability);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    CHECK(std::abs(phi[j] - oracle::ShapleyByPermutations(value, m, j)) < 1e-12);
    total += phi[j];
  }
  CHECK(std::abs(total - (value((1u << m) - 1) - value(0))) < 1e-12);
}

TEST_CASE("null players and symmetric players") {
  const LogitModel model = Model({0.0, 1.5, 1.5, -0.5}, 0.3);
  const std::vector<double> mean{0.2, 0.0, 0.0, 1.0};
  const std::vector<double> x{4.0, 1.0, 1.0, 2.0};
  for (auto scale : {AttributionScale::kLogit, AttributionScale::kProbability}) {
    const auto phi = fairex::ShapleyBruteForce(model, x, mean, scale);
    CHECK(std::abs(phi[0]) < 1e-15);
    CHECK(std::abs(phi[1] - phi[2]) < 1e-15);
  }
  // A feature at its background mean also contributes nothing.
  const auto at_mean = fairex::ShapleyBruteForce(model, std::vector<double>{4.0, 0.0, 1.0, 1.0},
                                                 mean, AttributionScale::kProbability);
  CHECK(std::abs(at_mean[1]) < 1e-15);
  CHECK(std::abs(at_mean[3]) < 1e-15);
}

TEST_CASE("coalition enumeration refuses more than 20 features") {
  const LogitModel model = Model(std::vector<double>(21, 1.0), 0.0);
  const std::vector<double> v(21, 0.0);
  CHECK_THROWS_AS(fairex::ShapleyBruteForce(model, v, v, AttributionScale::kLogit),
                  fairex::ConfigError);
  const LogitModel ok = Model(std::vector<double>(3, 1.0), 0.0);
  CHECK_THROWS_AS(
      fairex::ShapleyBruteForce(ok, std::vector<double>{1, 2}, std::vector<double>{0, 0, 0},
                                AttributionScale::kLogit),
      fairex::DataError);
}

TEST_CASE("ranking by descending score") {
  const auto r = Ranked({"A", "B", "C"}, {0.5, 0.2, 0.9});
  CHECK(r.Find("C").rank == 1);
  CHECK(r.Find("A").rank == 2);
  CHECK(r.Find("B").rank == 3);
  CHECK(r.features.front().name == "C");
  CHECK_FALSE(r.degenerate);
  CHECK_THROWS_AS(r.Find("D"), fairex::DataError);

  const auto flat = Ranked({"b", "a", "c"}, {0.0, 0.0, 0.0});
  CHECK(flat.degenerate);
  CHECK(flat.Find("a").rank == 1);
  CHECK(flat.Find("b").rank == 2);
  CHECK(flat.Find("c").rank == 3);
}

TEST_CASE("rank deltas for a three-feature swap") {
  const auto perf = Ranked({"A", "B", "C"}, {0.9, 0.5, 0.2});
  const auto fair = Ranked({"A", "B", "C"}, {0.5, 0.2, 0.9});
  const auto report = fairex::CompareRankings(perf, fair, 10);
  REQUIRE(report.features.size() == 3);
  CHECK(report.features[0].name == "A");
  CHECK(report.features[0].delta == -1);
  CHECK(report.features[1].delta == -1);
  CHECK(report.features[2].name == "C");
  CHECK(report.features[2].delta == 2);
  REQUIRE(report.most_changed.size() == 3);
  CHECK(report.most_changed[0].name == "C");
  CHECK(report.most_changed[1].name == "A");

  const auto top1 = fairex::CompareRankings(perf, fair, 1);
  CHECK(top1.most_changed.size() == 1);
  const auto strict = fairex::CompareRankings(perf, fair, 10, 2);
  REQUIRE(strict.most_changed.size() == 1);
  CHECK(strict.most_changed[0].name == "C");

  const auto same = fairex::CompareRankings(perf, perf, 10);
  for (const auto& f : same.features) CHECK(f.delta == 0);
  CHECK(same.most_changed.empty());
}

TEST_CASE("deltas over a random 30-feature pair sum to zero") {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto names = fixture::Names(30);
  std::vector<double> a(30), b(30);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng);
  const auto report = fairex::CompareRankings(Ranked(names, a), Ranked(names, b), 30);
  long sum = 0;
  for (const auto& f : report.features) {
    sum += f.delta;
    CHECK(f.delta == long(f.rank_perf) - long(f.rank_fair));
  }
  CHECK(sum == 0);
}

TEST_CASE("deltas compose across three rankings") {
  const std::vector<std::string> names{"a", "b", "c", "d", "e"};
  const auto r1 = Ranked(names, {5, 4, 3, 2, 1});
  const auto r2 = Ranked(names, {1, 5, 4, 3, 2});
  const auto r3 = Ranked(names, {2, 1, 5, 3, 4});
  const auto d12 = fairex::CompareRankings(r1, r2, 5);
  const auto d23 = fairex::CompareRankings(r2, r3, 5);
  const auto d13 = fairex::CompareRankings(r1, r3, 5);
  for (const auto& name : names) {
    auto delta = [&](const fairex::RankDeltaReport& r) {
      for (const auto& f : r.features) {
        if (f.name == name) return f.delta;
      }
      return long(1000);
    };
    CHECK(delta(d12) + delta(d23) == delta(d13));
  }
}

TEST_CASE("aggregating rankings by mean rank") {
  const std::vector<std::string> names{"a", "b", "c"};
  const std::vector<ImportanceRanking> runs{Ranked(names, {3, 2, 1}), Ranked(names, {2, 3, 1}),
                                            Ranked(names, {3, 2, 1})};
  const auto agg = fairex::AggregateRankings(runs);
  CHECK(agg.Find("a").rank == 1);
  CHECK(agg.Find("a").mean_rank == doctest::Approx(4.0 / 3.0));
  CHECK(agg.Find("b").mean_rank == doctest::Approx(5.0 / 3.0));
  CHECK(agg.Find("c").rank == 3);
  const std::vector<ImportanceRanking> mismatch{Ranked(names, {1, 2, 3}),
                                                Ranked({"a", "b", "x"}, {1, 2, 3})};
  CHECK_THROWS_AS(fairex::AggregateRankings(mismatch), fairex::DataError);
}

TEST_CASE("column aggregation: mean absolute and mean signed") {
  fairex::AttributionMatrix a;
  a.values = fixture::FromRows({{1.0, -3.0}, {-1.0, 1.0}});
  a.feature_names = {"p", "q"};
  const auto abs = fairex::RankFeatures(a, Aggregation::kMeanAbs);
  CHECK(abs.Find("q").score == 2.0);
  CHECK(abs.Find("p").score == 1.0);
  CHECK(abs.Find("q").rank == 1);
  const auto signed_ = fairex::RankFeatures(a, Aggregation::kMeanSigned);
  CHECK(signed_.Find("p").score == 0.0);
  CHECK(signed_.Find("q").score == -1.0);
  CHECK(signed_.Find("p").rank == 1);
  CHECK(fairex::ParseAggregation("mean_signed") == Aggregation::kMeanSigned);
  CHECK_THROWS_AS(fairex::ParseAggregation("median"), fairex::ConfigError);
}

TEST_CASE("explaining a model against itself gives zero deltas") {
  std::mt19937_64 rng(5);
  const auto design = fixture::RandomDesign(rng, 80, 6);
  const auto data = fixture::ToDataset(design);
  const LogitModel model = RandomModel(rng, 6);
  const auto result = fairex::ExplainFairnessShift(model, model, data, data, 6);
  for (const auto& f : result.deltas.features) CHECK(f.delta == 0);
  CHECK(result.deltas.most_changed.empty());

  std::vector<double> means(6, 0.0);
  for (const auto& row : design.rows) {
    for (std::size_t j = 0; j < 6; ++j) means[j] += row[j] / 80.0;
  }
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(result.attributions_perf.background_means[j] == doctest::Approx(means[j]).epsilon(1e-12));
    double col = 0.0;
    for (std::size_t i = 0; i < 80; ++i) col += std::abs(result.attributions_perf.values(i, j));
    CHECK(result.ranking_perf.Find(model.feature_names[j]).score ==
          doctest::Approx(col / 80.0).epsilon(1e-12));
  }
}

TEST_CASE("attribution CSV layout") {
  fairex::AttributionMatrix a;
  a.values = fixture::FromRows({{0.5, -0.25}});
  a.feature_names = {"p", "q"};
  std::ostringstream out;
  fairex::WriteAttributionCsv(out, a);
  CHECK(out.str() == "p,q\n0.5,-0.25\n");
}
