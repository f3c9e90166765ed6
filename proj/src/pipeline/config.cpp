#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fairex/config.hpp"
#include "fairex/error.hpp"

namespace fairex {
namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {
    for (const auto& [key, child] : tree_) {
      if (!child.empty()) throw ConfigError("nested key '" + key + "' in [" + name_ + "]");
    }
  }

  void Read(const char* key, double& out) { Parse(key, [&](const std::string& v) { out = ToDouble(key, v); }); }
  void Read(const char* key, std::size_t& out) { Parse(key, [&](const std::string& v) { out = ToUnsigned(key, v); }); }
  void Read(const char* key, std::string& out) { Parse(key, [&](const std::string& v) { out = v; }); }
  void Read(const char* key, std::optional<std::uint64_t>& out) {
    Parse(key, [&](const std::string& v) { out = ToUnsigned(key, v); });
  }
  void Read(const char* key, std::vector<std::string>& out) {
    Parse(key, [&](const std::string& v) { out = SplitList(v); });
  }
  template <typename F>
  void Parse(const char* key, F&& apply) {
    known_.insert(key);
    if (const auto value = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
      apply(Trim(*value));
    }
  }

  // Throws on keys never requested.
  void RejectUnknown() const {
    for (const auto& [key, child] : tree_) {
      if (!known_.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  double ToDouble(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) {
      throw ConfigError("[" + name_ + "] " + key + ": '" + v + "' is not a number");
    }
    return out;
  }
  std::uint64_t ToUnsigned(const std::string& key, const std::string& v) const {
    std::uint64_t out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) {
      throw ConfigError("[" + name_ + "] " + key + ": '" + v + "' is not a non-negative integer");
    }
    return out;
  }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> known_;
};

std::map<std::string, double> ParsePairs(const Section& section, const std::string& key,
                                         const std::string& text) {
  std::map<std::string, double> out;
  for (const auto& item : SplitList(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("[" + section.name() + "] " + key + ": expected name:value, got '" +
                        item + "'");
    }
    out[Trim(item.substr(0, colon))] = section.ToDouble(key, Trim(item.substr(colon + 1)));
  }
  return out;
}

void ReadMitigation(Section& s, MitigationConfig& m, std::optional<std::uint64_t>* seed) {
  s.Read("learning_rate", m.learning_rate);
  s.Read("max_epochs", m.max_epochs);
  std::string mode;
  s.Read("rate_mode", mode);
  if (!mode.empty()) m.rate_mode = ParseRateMode(mode);
  s.Read("ce_anchor_weight", m.ce_anchor_weight);
  s.Read("early_stop_auroc_drop", m.early_stop_auroc_drop);
  s.Read("holdout_fraction", m.holdout_fraction);
  s.Read("grad_tolerance", m.grad_tolerance);
  s.Read("significance_level", m.significance_level);
  if (seed != nullptr) s.Read("seed", *seed);
}

}  // namespace

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void PipelineConfig::ResolveSeeds() {
  generator.seed = generator_seed.value_or(MixSeed(seed, 1));
  split.seed = split_seed.value_or(MixSeed(seed, 2));
  train.seed = train_seed.value_or(MixSeed(seed, 3));
  mitigation.seed = mitigation_seed.value_or(MixSeed(seed, 4));
  for (auto& [name, m] : mitigation_overrides) m.seed = mitigation.seed;
}

MitigationConfig PipelineConfig::MitigationFor(const std::string& attribute) const {
  const auto it = mitigation_overrides.find(attribute);
  MitigationConfig m = it != mitigation_overrides.end() ? it->second : mitigation;
  m.sensitive_attribute = attribute;
  return m;
}

void PipelineConfig::Validate() const {
  if (source == DataSource::kCsv) {
    if (csv_path.empty()) throw ConfigError("[data] path is required for csv source");
  } else {
    generator.Validate();
  }
  if (label_column.empty()) throw ConfigError("[data] label is empty");
  split.Validate();
  train.Validate();
  if (top_k == 0) throw ConfigError("[report] top_k must be positive");
  for (const auto& [name, m] : mitigation_overrides) MitigationFor(name).Validate();
  MitigationConfig defaults = mitigation;
  defaults.sensitive_attribute = "*";
  defaults.Validate();
  for (const auto& [name, value] : privileged) {
    if (value != 0 && value != 1) {
      throw ConfigError("[report] privileged group of '" + name + "' must be 0 or 1");
    }
  }
}

PipelineConfig ParsePipelineConfig(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  PipelineConfig config;
  const pt::ptree empty;
  std::set<std::string> seen;
  auto section = [&](const std::string& name) -> const pt::ptree& {
    seen.insert(name);
    const auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  {
    Section s("data", section("data"));
    std::string source;
    s.Read("source", source);
    if (source == "csv") {
      config.source = DataSource::kCsv;
    } else if (source.empty() || source == "synthetic") {
      config.source = DataSource::kSynthetic;
    } else {
      throw ConfigError("[data] source must be 'synthetic' or 'csv', got '" + source + "'");
    }
    std::string path;
    s.Read("path", path);
    config.csv_path = path;
    s.Read("label", config.label_column);
    s.Read("sensitive", config.sensitive_columns);
    s.RejectUnknown();
  }
  {
    Section s("generator", section("generator"));
    auto& g = config.generator;
    s.Read("n", g.n);
    s.Read("m_informative", g.m_informative);
    s.Read("m_noise", g.m_noise);
    s.Read("positive_rate", g.positive_rate);
    s.Read("disparity_strength", g.disparity_strength);
    s.Read("proxy_strength", g.proxy_strength);
    s.Read("signal_scale", g.signal_scale);
    std::string groups;
    s.Read("groups", groups);
    if (!groups.empty()) {
      g.groups.clear();
      for (const auto& item : SplitList(groups)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          throw ConfigError("[generator] groups: expected name:fraction, got '" + item + "'");
        }
        g.groups.push_back({Trim(item.substr(0, colon)),
                            s.ToDouble("groups", Trim(item.substr(colon + 1)))});
      }
    }
    s.Read("seed", config.generator_seed);
    s.RejectUnknown();
  }
  {
    Section s("split", section("split"));
    s.Read("train_fraction", config.split.train_fraction);
    s.Read("repeats", config.split.repeats);
    s.Read("stratify_on", config.split.stratify_on);
    s.Read("seed", config.split_seed);
    s.RejectUnknown();
  }
  {
    Section s("train", section("train"));
    auto& t = config.train;
    s.Read("learning_rate", t.learning_rate);
    s.Read("max_epochs", t.max_epochs);
    s.Read("grad_tolerance", t.grad_tolerance);
    s.Read("l2_penalty", t.l2_penalty);
    s.Read("init_jitter", t.init_jitter);
    s.Read("seed", config.train_seed);
    s.RejectUnknown();
  }
  {
    Section s("mitigation", section("mitigation"));
    s.Read("attributes", config.attributes);
    ReadMitigation(s, config.mitigation, &config.mitigation_seed);
    s.RejectUnknown();
  }
  // Per-attribute sections "mitigation:<name>" start from the defaults.
  for (const auto& [name, child] : tree) {
    const std::string prefix = "mitigation:";
    if (name.rfind(prefix, 0) != 0) continue;
    seen.insert(name);
    const std::string attribute = Trim(name.substr(prefix.size()));
    if (attribute.empty()) throw ConfigError("[" + name + "] names no attribute");
    Section s(name, child);
    MitigationConfig m = config.mitigation;
    ReadMitigation(s, m, nullptr);
    s.RejectUnknown();
    config.mitigation_overrides[attribute] = m;
  }
  {
    Section s("report", section("report"));
    s.Read("top_k", config.top_k);
    std::string aggregation;
    s.Read("aggregation", aggregation);
    if (!aggregation.empty()) config.aggregation = ParseAggregation(aggregation);
    std::string privileged;
    s.Read("privileged", privileged);
    for (const auto& [attr, value] : ParsePairs(s, "privileged", privileged)) {
      config.privileged[attr] = static_cast<int>(value);
      if (value != 0.0 && value != 1.0) {
        throw ConfigError("[report] privileged group of '" + attr + "' must be 0 or 1");
      }
    }
    s.RejectUnknown();
  }
  {
    Section s("run", section("run"));
    std::optional<std::uint64_t> seed;
    s.Read("seed", seed);
    if (seed) config.seed = *seed;
    std::string out;
    s.Read("output", out);
    config.output_dir = out;
    s.RejectUnknown();
  }
  for (const auto& [name, child] : tree) {
    if (!seen.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  config.ResolveSeeds();
  config.Validate();
  return config;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return ParsePipelineConfig(in);
}

}  // namespace fairex
