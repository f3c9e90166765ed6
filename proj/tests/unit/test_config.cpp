#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "fairex/config.hpp"
#include "fairex/error.hpp"

using fairex::PipelineConfig;

namespace {

PipelineConfig Parse(const std::string& text) {
  std::istringstream in(text);
  return fairex::ParsePipelineConfig(in);
}

}  // namespace

TEST_CASE("empty file gives the defaults") {
  const auto c = Parse("");
  CHECK(c.source == fairex::DataSource::kSynthetic);
  CHECK(c.generator.n == 5000);
  CHECK(c.split.repeats == 10);
  CHECK(c.split.train_fraction == 0.9);
  CHECK(c.mitigation.learning_rate == 0.1);
  CHECK(c.mitigation.significance_level == 1e-4);
  CHECK(c.top_k == 20);
  CHECK(c.seed == 42);
}

TEST_CASE("sections, lists, comments and per-attribute overrides") {
  const auto c = Parse(R"(# comment
[data]
source = synthetic
[generator]
n = 1200
groups = race:0.9, sex:0.6
disparity_strength = 0.5
[split]
repeats = 3
stratify_on = label, sex
[train]
l2_penalty = 0.01
[mitigation]
learning_rate = 0.2
max_epochs = 50
attributes = sex
[mitigation:sex]
ce_anchor_weight = 0.25
; another comment
rate_mode = hard
[report]
top_k = 5
aggregation = mean_signed
privileged = race:0
[run]
seed = 9
)");
  CHECK(c.generator.n == 1200);
  REQUIRE(c.generator.groups.size() == 2);
  CHECK(c.generator.groups[0].name == "race");
  CHECK(c.generator.groups[1].group_fraction == 0.6);
  CHECK(c.generator.disparity_strength == 0.5);
  CHECK(c.split.repeats == 3);
  CHECK(c.split.stratify_on == std::vector<std::string>{"label", "sex"});
  CHECK(c.train.l2_penalty == 0.01);
  CHECK(c.attributes == std::vector<std::string>{"sex"});
  CHECK(c.top_k == 5);
  CHECK(c.aggregation == fairex::Aggregation::kMeanSigned);
  CHECK(c.privileged.at("race") == 0);

  const auto sex = c.MitigationFor("sex");
  CHECK(sex.sensitive_attribute == "sex");
  CHECK(sex.ce_anchor_weight == 0.25);
  CHECK(sex.rate_mode == fairex::RateMode::kHard);
  CHECK(sex.learning_rate == 0.2);  // inherited
  CHECK(sex.max_epochs == 50);
  const auto race = c.MitigationFor("race");
  CHECK(race.ce_anchor_weight == 0.0);
  CHECK(race.rate_mode == fairex::RateMode::kSoft);
  CHECK(sex.seed == race.seed);
}

TEST_CASE("component seeds derive from the run seed unless given") {
  const auto a = Parse("[run]\nseed = 9\n");
  const auto b = Parse("[run]\nseed = 9\n");
  const auto c = Parse("[run]\nseed = 10\n");
  CHECK(a.generator.seed == b.generator.seed);
  CHECK(a.generator.seed != c.generator.seed);
  CHECK(a.generator.seed != a.split.seed);
  CHECK(a.split.seed != a.train.seed);
  CHECK(a.generator.seed == fairex::MixSeed(9, 1));

  const auto fixed = Parse("[run]\nseed = 9\n[generator]\nseed = 123\n");
  CHECK(fixed.generator.seed == 123);
  CHECK(fixed.split.seed == a.split.seed);
  CHECK(fairex::MixSeed(1, 1) != fairex::MixSeed(1, 2));
}

TEST_CASE("unknown sections, unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(Parse("[bogus]\nx = 1\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[train]\nlearnign_rate = 1\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[train]\nlearning_rate = fast\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[split]\nrepeats = -1\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[generator]\ngroups = race\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[data]\nsource = parquet\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[data]\nsource = csv\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[mitigation:]\nlearning_rate = 1\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[mitigation:race]\nattributes = race\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[mitigation]\nrate_mode = fuzzy\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[report]\ntop_k = 0\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[report]\nprivileged = race:2\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[report]\naggregation = median\n"), fairex::ConfigError);
  CHECK_THROWS_AS(Parse("[train\n"), fairex::ConfigError);
  CHECK_THROWS_AS(fairex::LoadPipelineConfig("/nonexistent/run.ini"), fairex::ConfigError);
}

TEST_CASE("shipped configurations parse") {
  const std::filesystem::path root = FAIREX_SOURCE_DIR;
  for (const char* name : {"demo.ini", "fair_control.ini", "csv_example.ini"}) {
    CAPTURE(name);
    CHECK_NOTHROW(fairex::LoadPipelineConfig(root / "configs" / name));
  }
  const auto demo = fairex::LoadPipelineConfig(root / "configs" / "demo.ini");
  CHECK(demo.split.repeats == 10);
  CHECK(demo.generator.disparity_strength > 0.0);
  const auto control = fairex::LoadPipelineConfig(root / "configs" / "fair_control.ini");
  CHECK(control.generator.disparity_strength == 0.0);
}
