#pragma once
// Sectioned key-value configuration for the pipeline driver. See
// docs/config.md for the accepted sections and keys.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairex/generator.hpp"
#include "fairex/logit.hpp"
#include "fairex/mitigation.hpp"
#include "fairex/shap.hpp"
#include "fairex/split.hpp"

namespace fairex {

enum class DataSource { kSynthetic, kCsv };

struct PipelineConfig {
  DataSource source = DataSource::kSynthetic;
  std::filesystem::path csv_path;
  std::string label_column = "label";
  std::vector<std::string> sensitive_columns;  // CSV source only

  GeneratorConfig generator;
  SplitPlan split;
  TrainConfig train;
  // Defaults for every attribute, then per-attribute overrides.
  MitigationConfig mitigation;
  std::map<std::string, MitigationConfig> mitigation_overrides;
  std::vector<std::string> attributes;  // attributes to mitigate; empty = all

  std::size_t top_k = 20;
  Aggregation aggregation = Aggregation::kMeanAbs;
  std::map<std::string, int> privileged;  // overrides of the larger-group rule

  std::uint64_t seed = 42;
  // Component seeds given explicitly in the file; others derive from `seed`.
  std::optional<std::uint64_t> generator_seed;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::uint64_t> mitigation_seed;

  std::filesystem::path output_dir;

  // Fills component seeds from the global seed where not set explicitly.
  void ResolveSeeds();
  // Mitigation settings for one attribute, with the attribute name filled in.
  MitigationConfig MitigationFor(const std::string& attribute) const;
  void Validate() const;
};

// Throws ConfigError on syntax errors, unknown sections or keys, and values
// that fail to parse.
PipelineConfig ParsePipelineConfig(std::istream& in);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

// Deterministic 64-bit mixing (splitmix64 finalizer) for seed derivation.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fairex
