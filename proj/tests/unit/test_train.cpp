#include <cmath>
#include <random>

#include "doctest.h"
#include "fairex/error.hpp"
#include "fairex/logit.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using fairex::Dataset;
using fairex::TrainConfig;

namespace {

Dataset Separable(bool flipped) {
  std::vector<std::vector<double>> rows;
  std::vector<std::uint8_t> labels;
  for (int k = 0; k < 50; ++k) {
    rows.push_back({-1.0});
    labels.push_back(flipped ? 1 : 0);
    rows.push_back({1.0});
    labels.push_back(flipped ? 0 : 1);
  }
  return Dataset(fixture::FromRows(rows), {"x"}, labels, {});
}

// Noisy labels so that a finite minimizer exists.
oracle::Design NoisyTwoFeature(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  oracle::Design d;
  for (int i = 0; i < 40; ++i) {
    const double a = normal(rng), b = normal(rng);
    const double p = 1.0 / (1.0 + std::exp(-(1.2 * a - 0.8 * b + 0.3)));
    d.rows.push_back({a, b});
    d.labels.push_back(u(rng) < p);
    d.group.push_back(i % 2);
  }
  return d;
}

}  // namespace

TEST_CASE("separable 1-D data with a small ridge") {
  TrainConfig config;
  config.l2_penalty = 0.01;
  const auto model = fairex::TrainPerformance(Separable(false), config);
  const double low = model.PredictProba(std::vector<double>{-1.0});
  const double high = model.PredictProba(std::vector<double>{1.0});
  CHECK(low < model.threshold);
  CHECK(model.threshold <= high);
  CHECK(model.weights[0] > 0.0);

  const auto flipped = fairex::TrainPerformance(Separable(true), config);
  CHECK(flipped.weights[0] == doctest::Approx(-model.weights[0]).epsilon(1e-6));
  CHECK(std::abs(flipped.weights[0] + model.weights[0]) < 1e-6);
  CHECK(std::abs(flipped.intercept + model.intercept) < 1e-6);
}

TEST_CASE("separable data without a ridge does not converge") {
  TrainConfig config;
  config.max_epochs = 300;
  CHECK_THROWS_AS(fairex::TrainPerformance(Separable(false), config), fairex::NumericalError);
}

TEST_CASE("beats every point of a 51^3 grid") {
  const auto d = NoisyTwoFeature(31);
  const auto model = fairex::TrainPerformance(fixture::ToDataset(d), TrainConfig{});
  const long double fitted = oracle::CrossEntropyFast(d, model.weights, model.intercept);
  long double best_grid = INFINITY;
  for (int i = 0; i <= 50; ++i) {
    for (int j = 0; j <= 50; ++j) {
      for (int k = 0; k <= 50; ++k) {
        const std::vector<double> w{-5.0 + 0.2 * i, -5.0 + 0.2 * j};
        best_grid = std::min(best_grid, oracle::CrossEntropyFast(d, w, -5.0 + 0.2 * k));
      }
    }
  }
  CHECK(fitted <= best_grid);
}

TEST_CASE("training loss never increases and the gradient is small at the end") {
  std::mt19937_64 rng(4);
  const auto d = fixture::RandomDesign(rng, 200, 5, 2.0);
  const auto outcome = fairex::FitPerformanceModel(fixture::ToDataset(d), TrainConfig{});
  for (std::size_t k = 1; k < outcome.loss_history.size(); ++k) {
    CHECK(outcome.loss_history[k] <= outcome.loss_history[k - 1]);
  }
  CHECK(outcome.final_gradient_norm < 1e-6);
  CHECK(outcome.final_cross_entropy ==
        doctest::Approx(oracle::CrossEntropy(d, outcome.model.weights, outcome.model.intercept))
            .epsilon(1e-10));
}

TEST_CASE("different jittered starts reach the same optimum") {
  std::mt19937_64 rng(8);
  const auto d = fixture::RandomDesign(rng, 150, 4, 1.0);
  const auto data = fixture::ToDataset(d);
  TrainConfig a;
  a.init_jitter = 0.5;
  a.seed = 1;
  a.grad_tolerance = 1e-7;
  a.max_epochs = 20000;
  TrainConfig b = a;
  b.seed = 2;
  const auto ma = fairex::FitPerformanceModel(data, a);
  const auto mb = fairex::FitPerformanceModel(data, b);
  // Compare on the standardized scale, where the loss is optimized.
  const auto pa = fairex::ToStandardized(ma.model, ma.standardizer);
  const auto pb = fairex::ToStandardized(mb.model, mb.standardizer);
  for (std::size_t j = 0; j < pa.weights.size(); ++j) {
    CHECK(std::abs(pa.weights[j] - pb.weights[j]) < 1e-4);
  }
  CHECK(std::abs(pa.intercept - pb.intercept) < 1e-4);
}

TEST_CASE("threshold is the closest-to-corner cutoff on the training ROC") {
  std::mt19937_64 rng(12);
  const auto d = fixture::RandomDesign(rng, 120, 3, 1.0);
  const auto data = fixture::ToDataset(d);
  const auto model = fairex::TrainPerformance(data, TrainConfig{});
  const auto proba = model.PredictProba(data.features());
  CHECK(model.threshold == oracle::ExhaustiveErCutoff(proba, d.labels));
}

TEST_CASE("training errors") {
  const Dataset one_class(fixture::FromRows({{1}, {2}, {3}}), {"x"}, {1, 1, 1}, {});
  CHECK_THROWS_AS(fairex::TrainPerformance(one_class, TrainConfig{}), fairex::DataError);
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.Validate(), fairex::ConfigError);
  bad = TrainConfig{};
  bad.l2_penalty = -1.0;
  CHECK_THROWS_AS(bad.Validate(), fairex::ConfigError);
  bad = TrainConfig{};
  bad.max_epochs = 0;
  CHECK_THROWS_AS(bad.Validate(), fairex::ConfigError);
}
