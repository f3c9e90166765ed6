#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fairex/error.hpp"
#include "fairex/pipeline.hpp"

using fairex::PipelineConfig;

namespace {

PipelineConfig SmallConfig(std::size_t repeats) {
  std::istringstream in(
      "[generator]\nn = 3000\n[split]\nrepeats = " + std::to_string(repeats) +
      "\n[mitigation]\nmax_epochs = 200\n[report]\ntop_k = 5\n[run]\nseed = 4\n");
  return fairex::ParsePipelineConfig(in);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("a small run produces every model and report section") {
  const auto config = SmallConfig(2);
  const auto data = fairex::LoadPipelineData(config);
  const auto report = fairex::RunPipeline(config, data);
  CHECK(report.attributes == std::vector<std::string>{"race", "sex"});
  REQUIRE(report.splits.size() == 2);
  CHECK(report.aggregate.size() == 3);
  CHECK(report.aggregate.count("perf") == 1);
  CHECK(report.aggregate.count("fair_race") == 1);
  CHECK(report.aggregate.count("fair_sex") == 1);

  for (const auto& run : report.splits) {
    CHECK(run.n_train + run.n_test == 3000);
    CHECK(run.max_efficiency_residual < 1e-9);
    CHECK(run.eval_perf.n_test == run.n_test);
    for (const auto& attribute : report.attributes) {
      const auto& deltas = run.rank_delta.at(attribute).features;
      long sum = 0;
      for (const auto& d : deltas) sum += d.delta;
      CHECK(sum == 0);
      CHECK(deltas.size() == report.feature_names.size());
    }
  }

  const auto json = fairex::ReportToJson(report);
  for (const char* key : {"tool", "generated_at", "config", "dataset", "attributes", "splits",
                          "aggregate", "importance", "rank_delta", "questions"}) {
    CAPTURE(key);
    CHECK(json.contains(key));
  }
  const auto& split = json["splits"][0];
  for (const char* key : {"models", "coefficients", "importance", "rank_delta", "mitigation"}) {
    CAPTURE(key);
    CHECK(split.contains(key));
  }
  CHECK(json["aggregate"]["perf"]["metrics"]["auroc"]["count"] == 2);
  CHECK(json["importance"]["perf"]["features"].size() == 5);
}

TEST_CASE("one repeat gives zero spread") {
  const auto config = SmallConfig(1);
  const auto report = fairex::RunPipeline(config, fairex::LoadPipelineData(config));
  for (const auto& [model, agg] : report.aggregate) {
    for (const auto& [key, summary] : agg.metrics) {
      CAPTURE(model);
      CAPTURE(key);
      CHECK(summary.std == 0.0);
    }
  }
}

TEST_CASE("runs are deterministic") {
  const auto config = SmallConfig(2);
  const auto data = fairex::LoadPipelineData(config);
  auto a = fairex::ReportToJson(fairex::RunPipeline(config, data));
  auto b = fairex::ReportToJson(fairex::RunPipeline(config, data));
  for (auto* j : {&a, &b}) {
    j->erase("generated_at");
    j->erase("wall_clock_seconds");
  }
  CHECK(a.dump() == b.dump());
}

TEST_CASE("output files") {
  const auto config = SmallConfig(1);
  const auto report = fairex::RunPipeline(config, fairex::LoadPipelineData(config));
  const auto dir = std::filesystem::temp_directory_path() / "fairex_pipeline_test";
  std::filesystem::remove_all(dir);
  fairex::WriteRunOutputs(report, dir);
  for (const char* name : {"report.json", "summary.txt", "importance_perf.csv",
                           "importance_fair_race.csv", "rank_delta_sex.csv", "trace_race.csv"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir / name));
  }
  const auto parsed = nlohmann::json::parse(ReadFile(dir / "report.json"));
  CHECK(parsed["splits"].size() == 1);
  CHECK(ReadFile(dir / "trace_race.csv").rfind("split,epoch,eod_loss", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown attributes are configuration errors") {
  std::istringstream in("[generator]\nn = 500\n[mitigation]\nattributes = age\n");
  const auto config = fairex::ParsePipelineConfig(in);
  CHECK_THROWS_AS(fairex::RunPipeline(config, fairex::LoadPipelineData(config)),
                  fairex::ConfigError);
}
