#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairex/dataset.hpp"

namespace fairex {

struct GroupSpec {
  std::string name;
  double group_fraction = 0.5;  // share of rows with z = 1
};

// Parametric stand-in for a clinical cohort. Labels follow a logistic model
//
//   logit P(y = 1) = c + sum_j beta_j x_j + disparity_strength * sum_k z_k
//
// over standard-normal informative features x_j, with
// beta_j = signal_scale * (-0.85)^j. Each sensitive attribute
// z_k also gets a visible proxy feature `proxy_<name>` = proxy_strength * z_k
// + N(0, 1); the attribute itself is not a feature. The intercept c is solved
// on the drawn sample so that the mean label probability equals
// positive_rate.
struct GeneratorConfig {
  std::size_t n = 5000;
  std::size_t m_informative = 16;
  std::size_t m_noise = 4;
  std::vector<GroupSpec> groups{{"race", 0.897}, {"sex", 0.645}};
  double positive_rate = 0.143;
  double disparity_strength = 1.0;
  double proxy_strength = 4.0;
  double signal_scale = 0.8;
  std::uint64_t seed = 42;

  // Throws ConfigError when a field is out of range.
  void Validate() const;
};

struct GeneratedData {
  Dataset data;
  // P(y = 1 | x, z) under the generating model, per row.
  std::vector<double> true_probability;
};

Dataset Generate(const GeneratorConfig& config);
GeneratedData GenerateWithTruth(const GeneratorConfig& config);

// |TPR(z=1) - TPR(z=0)| of the generating model, thresholded at its own
// closest-to-(0,1) ROC cutoff.
double PlantedTprGap(const GeneratedData& generated, const std::string& group);

}  // namespace fairex
