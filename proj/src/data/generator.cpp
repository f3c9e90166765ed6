#include <cmath>
#include <random>
#include <set>

#include "fairex/error.hpp"
#include "fairex/generator.hpp"
#include "fairex/logit.hpp"
#include "fairex/metrics.hpp"

namespace fairex {

void GeneratorConfig::Validate() const {
  if (n < 2) throw ConfigError("generator.n must be at least 2");
  if (m_informative + m_noise + groups.size() == 0) {
    throw ConfigError("generator needs at least one feature");
  }
  std::set<std::string> names;
  for (const auto& g : groups) {
    if (g.name.empty()) throw ConfigError("generator group name is empty");
    if (!names.insert(g.name).second) throw ConfigError("duplicate generator group '" + g.name + "'");
    if (!(g.group_fraction > 0.0 && g.group_fraction < 1.0)) {
      throw ConfigError("generator group '" + g.name + "' fraction must lie in (0, 1)");
    }
  }
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw ConfigError("generator.positive_rate must lie in (0, 1)");
  }
  if (!(disparity_strength >= 0.0) || !std::isfinite(disparity_strength)) {
    throw ConfigError("generator.disparity_strength must be non-negative");
  }
  if (!std::isfinite(proxy_strength)) throw ConfigError("generator.proxy_strength must be finite");
  if (!(signal_scale > 0.0) || !std::isfinite(signal_scale)) {
    throw ConfigError("generator.signal_scale must be positive");
  }
}

namespace {

std::string Numbered(const char* prefix, std::size_t k) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s_%02zu", prefix, k + 1);
  return buffer;
}

// Informative coefficients: alternating sign, geometric decay.
double Coefficient(double scale, std::size_t j) {
  const double magnitude = scale * std::pow(0.85, static_cast<double>(j));
  return j % 2 == 0 ? magnitude : -magnitude;
}

// Intercept c with mean_i sigmoid(eta_i + c) = target, by bisection.
double CalibrateIntercept(const std::vector<double>& eta, double target) {
  auto mean_rate = [&](double c) {
    double total = 0.0;
    for (double v : eta) total += Sigmoid(v + c);
    return total / static_cast<double>(eta.size());
  };
  double lo = -60.0;
  double hi = 60.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_rate(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GeneratedData GenerateWithTruth(const GeneratorConfig& config) {
  config.Validate();
  const std::size_t n = config.n;
  const std::size_t k_groups = config.groups.size();
  const std::size_t m = config.m_informative + config.m_noise + k_groups;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<std::string> names;
  for (std::size_t j = 0; j < config.m_informative; ++j) names.push_back(Numbered("inf", j));
  for (std::size_t j = 0; j < config.m_noise; ++j) names.push_back(Numbered("noise", j));
  for (const auto& g : config.groups) names.push_back("proxy_" + g.name);

  Matrix features(n, m);
  std::vector<SensitiveColumn> sensitive;
  for (const auto& g : config.groups) sensitive.push_back({g.name, std::vector<std::uint8_t>(n)});
  std::vector<double> eta(n, 0.0);

  // Row-major draw order keeps a row's values independent of n.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_groups; ++k) {
      sensitive[k].values[i] = uniform(rng) < config.groups[k].group_fraction ? 1 : 0;
    }
    for (std::size_t j = 0; j < config.m_informative; ++j) {
      const double v = normal(rng);
      features(i, j) = v;
      eta[i] += Coefficient(config.signal_scale, j) * v;
    }
    for (std::size_t j = 0; j < config.m_noise; ++j) {
      features(i, config.m_informative + j) = normal(rng);
    }
    for (std::size_t k = 0; k < k_groups; ++k) {
      const double z = sensitive[k].values[i];
      features(i, config.m_informative + config.m_noise + k) =
          config.proxy_strength * z + normal(rng);
      eta[i] += config.disparity_strength * z;
    }
  }

  const double intercept = CalibrateIntercept(eta, config.positive_rate);
  std::vector<double> truth(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = Sigmoid(eta[i] + intercept);
    labels[i] = uniform(rng) < truth[i] ? 1 : 0;
  }
  return {Dataset(std::move(features), std::move(names), std::move(labels),
                  std::move(sensitive)),
          std::move(truth)};
}

Dataset Generate(const GeneratorConfig& config) { return GenerateWithTruth(config).data; }

double PlantedTprGap(const GeneratedData& generated, const std::string& group) {
  const auto& labels = generated.data.labels();
  const auto& z = generated.data.sensitive(group);
  const double cutoff = SelectThresholdEr(Roc(generated.true_probability, labels));
  std::vector<std::uint8_t> decisions(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    decisions[i] = generated.true_probability[i] >= cutoff ? 1 : 0;
  }
  const GroupRates rates = ComputeGroupRates(decisions, labels, z, group, 1);
  if (!rates.groups[0].tpr || !rates.groups[1].tpr) {
    throw DataError("planted TPR gap undefined: a group has no positives");
  }
  return std::abs(*rates.groups[1].tpr - *rates.groups[0].tpr);
}

}  // namespace fairex
