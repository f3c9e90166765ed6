// fairex: train a performance model, fine-tune it for equalized odds, and
// explain the change through Shapley importance ranks.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fairex/config.hpp"
#include "fairex/error.hpp"
#include "fairex/generator.hpp"
#include "fairex/kernels.hpp"
#include "fairex/metrics.hpp"
#include "fairex/mitigation.hpp"
#include "fairex/pipeline.hpp"
#include "fairex/shap.hpp"
#include "fairex/split.hpp"

namespace {

using namespace fairex;

void ConfigureLogging() {
  auto logger = spdlog::stderr_color_mt("fairex");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("FAIREX_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

PipelineConfig ConfigOrDefault(const std::string& path) {
  PipelineConfig config;
  if (!path.empty()) {
    config = LoadPipelineConfig(path);
  } else {
    config.ResolveSeeds();
  }
  return config;
}

void WriteJson(const nlohmann::json& value, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << value.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  out << value.dump(2) << '\n';
  if (!out) throw DataError("cannot write '" + path + "'");
}

struct DataArgs {
  std::string path;
  std::string label = "label";
  std::vector<std::string> sensitive;

  void Attach(CLI::App* app, const std::string& flag = "--data") {
    app->add_option(flag, path, "CSV file")->required();
    app->add_option("--label", label, "label column")->capture_default_str();
    app->add_option("--sensitive", sensitive, "sensitive 0/1 column (repeatable)");
  }
  Dataset Load() const { return LoadCsv(path, label, sensitive); }
};

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Fairness fine-tuning of logistic regression with Shapley rank explanations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FAIREX_VERSION));

  // pipeline
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> attributes;
  auto* pipeline = app.add_subcommand("pipeline", "run every phase over repeated splits");
  pipeline->add_option("--config", config_path, "pipeline config file")->required();
  pipeline->add_option("--out", out_dir, "output directory");
  pipeline->add_option("--seed", seed, "global seed (overrides [run] seed)");
  pipeline->add_option("--attribute", attributes, "sensitive attribute to mitigate (repeatable)");

  // generate
  std::string gen_config;
  std::string gen_out;
  std::optional<std::size_t> gen_n;
  std::optional<double> gen_disparity;
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  generate->add_option("--config", gen_config, "config file ([generator] section)");
  generate->add_option("--out", gen_out, "output CSV")->required();
  generate->add_option("--seed", seed, "generator seed");
  generate->add_option("--n", gen_n, "row count");
  generate->add_option("--disparity", gen_disparity, "disparity strength");

  // split
  DataArgs split_data;
  std::string split_config;
  std::string split_out;
  auto* split = app.add_subcommand("split", "write stratified train/test CSV pairs");
  split_data.Attach(split);
  split->add_option("--config", split_config, "config file ([split] section)");
  split->add_option("--seed", seed, "split seed");
  split->add_option("--out", split_out, "output directory")->required();

  // train
  DataArgs train_data;
  std::string train_config;
  std::string train_out;
  auto* train = app.add_subcommand("train", "fit the performance model");
  train_data.Attach(train);
  train->add_option("--config", train_config, "config file ([train] section)");
  train->add_option("--out", train_out, "model file")->required();

  // mitigate
  DataArgs mit_data;
  std::string mit_model;
  std::string mit_config;
  std::string mit_attribute;
  std::string mit_out;
  std::string mit_trace;
  auto* mitigate = app.add_subcommand("mitigate", "fine-tune a model for equalized odds");
  mit_data.Attach(mitigate);
  mitigate->add_option("--model", mit_model, "performance model file")->required();
  mitigate->add_option("--attribute", mit_attribute, "sensitive attribute")->required();
  mitigate->add_option("--config", mit_config, "config file ([mitigation] sections)");
  mitigate->add_option("--out", mit_out, "fair model file")->required();
  mitigate->add_option("--trace", mit_trace, "trace CSV");

  // evaluate
  DataArgs eval_data;
  std::string eval_model;
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "performance and fairness metrics as JSON");
  eval_data.Attach(evaluate);
  evaluate->add_option("--model", eval_model, "model file")->required();
  evaluate->add_option("--out", eval_out, "JSON output (default stdout)");

  // explain
  DataArgs explain_train;
  std::string explain_test;
  std::string explain_perf;
  std::string explain_fair;
  std::size_t explain_top_k = 20;
  std::string explain_aggregation = "mean_abs";
  std::string explain_out;
  auto* explain = app.add_subcommand("explain", "Shapley rank comparison of two models");
  explain_train.Attach(explain, "--train");
  explain->add_option("--test", explain_test, "test CSV")->required();
  explain->add_option("--perf", explain_perf, "performance model file")->required();
  explain->add_option("--fair", explain_fair, "fair model file")->required();
  explain->add_option("--top-k", explain_top_k, "size of the most-changed set")->capture_default_str();
  explain->add_option("--aggregation", explain_aggregation, "mean_abs or mean_signed")
      ->capture_default_str();
  explain->add_option("--out", explain_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCode(ErrorKind::kConfig);
  }

  try {
    spdlog::debug("kernels: {}", kernels::IsaName(kernels::ActiveIsa()));
    if (*pipeline) {
      PipelineConfig config = LoadPipelineConfig(config_path);
      if (seed) {
        config.seed = *seed;
        config.ResolveSeeds();
      }
      if (!attributes.empty()) config.attributes = attributes;
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (config.output_dir.empty()) throw ConfigError("no output directory (--out or [run] output)");
      const Dataset data = LoadPipelineData(config);
      const RunReport report = RunPipeline(config, data);
      WriteRunOutputs(report, config.output_dir);
      spdlog::info("wrote {}", (config.output_dir / "report.json").string());
    } else if (*generate) {
      PipelineConfig config = ConfigOrDefault(gen_config);
      if (seed) config.generator.seed = *seed;
      if (gen_n) config.generator.n = *gen_n;
      if (gen_disparity) config.generator.disparity_strength = *gen_disparity;
      WriteCsv(Generate(config.generator), gen_out);
    } else if (*split) {
      PipelineConfig config = ConfigOrDefault(split_config);
      if (seed) config.split.seed = *seed;
      const Dataset data = split_data.Load();
      const auto splits = MakeSplits(data, config.split);
      std::filesystem::create_directories(split_out);
      for (std::size_t s = 0; s < splits.size(); ++s) {
        const auto dir = std::filesystem::path(split_out);
        WriteCsv(data.Subset(splits[s].train), dir / ("train_" + std::to_string(s) + ".csv"));
        WriteCsv(data.Subset(splits[s].test), dir / ("test_" + std::to_string(s) + ".csv"));
      }
    } else if (*train) {
      const PipelineConfig config = ConfigOrDefault(train_config);
      SaveModel(TrainPerformance(train_data.Load(), config.train), train_out);
    } else if (*mitigate) {
      const PipelineConfig config = ConfigOrDefault(mit_config);
      const auto result =
          Mitigate(LoadModel(mit_model), mit_data.Load(), config.MitigationFor(mit_attribute));
      SaveModel(result.model, mit_out);
      if (!mit_trace.empty()) {
        std::ofstream out(mit_trace);
        WriteTraceCsv(out, result.trace);
        if (!out) throw DataError("cannot write '" + mit_trace + "'");
      }
      spdlog::info("stop reason: {}", StopReasonName(result.trace.stop_reason));
    } else if (*evaluate) {
      WriteJson(ToJson(Evaluate(LoadModel(eval_model), eval_data.Load())), eval_out);
    } else if (*explain) {
      const Dataset train_set = explain_train.Load();
      const Dataset test_set = LoadCsv(explain_test, explain_train.label, explain_train.sensitive);
      const auto result =
          ExplainFairnessShift(LoadModel(explain_perf), LoadModel(explain_fair), train_set,
                               test_set, explain_top_k, ParseAggregation(explain_aggregation));
      const std::filesystem::path dir(explain_out);
      std::filesystem::create_directories(dir);
      {
        std::ofstream out(dir / "attributions_perf.csv");
        WriteAttributionCsv(out, result.attributions_perf);
      }
      {
        std::ofstream out(dir / "attributions_fair.csv");
        WriteAttributionCsv(out, result.attributions_fair);
      }
      const std::size_t all = result.ranking_perf.features.size();
      WriteJson({{"base_value_perf", result.attributions_perf.base_value},
                 {"base_value_fair", result.attributions_fair.base_value},
                 {"ranking_perf", ToJson(result.ranking_perf, all)},
                 {"ranking_fair", ToJson(result.ranking_fair, all)},
                 {"rank_delta", ToJson(result.deltas)}},
                (dir / "explanation.json").string());
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
  return 0;
}
