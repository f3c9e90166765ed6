#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fairex/dataset.hpp"
#include "oracles.hpp"

namespace fixture {

inline fairex::Matrix FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.empty() ? 0 : rows.front().size();
  fairex::Matrix x(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) x(i, j) = rows[i][j];
  }
  return x;
}

inline std::vector<std::string> Names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.push_back("f" + std::to_string(j + 1));
  return names;
}

// Random design with every (group, label) cell populated.
inline oracle::Design RandomDesign(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                   double spread = 1.0) {
  std::normal_distribution<double> normal(0.0, spread);
  oracle::Design d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(m);
    for (auto& v : row) v = normal(rng);
    d.rows.push_back(row);
    d.labels.push_back(static_cast<std::uint8_t>((i / 2) % 2));
    d.group.push_back(static_cast<std::uint8_t>(i % 2));
  }
  std::shuffle(d.labels.begin(), d.labels.end(), rng);
  for (std::size_t i = 0; i < 4 && i < n; ++i) {
    d.labels[i] = static_cast<std::uint8_t>(i / 2);
    d.group[i] = static_cast<std::uint8_t>(i % 2);
  }
  return d;
}

inline fairex::Dataset ToDataset(const oracle::Design& d, const std::string& group = "z") {
  return fairex::Dataset(FromRows(d.rows), Names(d.rows.front().size()), d.labels,
                         {{group, d.group}});
}

}  // namespace fixture
