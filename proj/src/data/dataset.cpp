#include <cmath>
#include <set>
#include <string>

#include "fairex/dataset.hpp"
#include "fairex/error.hpp"
#include "fairex/kernels.hpp"

namespace fairex {

void LinearScores(const Matrix& x, std::span<const double> weights,
                  double intercept, std::span<double> out) {
  assert(weights.size() == x.cols() && out.size() == x.rows());
  std::fill(out.begin(), out.end(), intercept);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (weights[j] != 0.0) kernels::Axpy(weights[j], x.col(j), out);
  }
}

void TransposedProduct(const Matrix& x, std::span<const double> r,
                       std::span<double> out) {
  assert(r.size() == x.rows() && out.size() == x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] = kernels::Dot(x.col(j), r);
}

namespace {

void CheckBinary(std::span<const std::uint8_t> values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1) {
      throw DataError(what + " row " + std::to_string(i) + " is " +
                      std::to_string(values[i]) + ", expected 0 or 1");
    }
  }
}

}  // namespace

Dataset::Dataset(Matrix features, std::vector<std::string> feature_names,
                 std::vector<std::uint8_t> labels,
                 std::vector<SensitiveColumn> sensitive, std::string label_name)
    : features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      labels_(std::move(labels)),
      sensitive_(std::move(sensitive)),
      label_name_(std::move(label_name)) {
  const std::size_t n = labels_.size();
  if (n < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(n));
  if (feature_names_.empty()) throw DataError("dataset needs at least one feature");
  if (features_.rows() != n || features_.cols() != feature_names_.size()) {
    throw DataError("feature matrix is " + std::to_string(features_.rows()) + "x" +
                    std::to_string(features_.cols()) + ", expected " +
                    std::to_string(n) + "x" + std::to_string(feature_names_.size()));
  }
  std::set<std::string> seen;
  for (const auto& name : feature_names_) {
    if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
  }
  CheckBinary(labels_, "label");
  std::set<std::string> seen_sensitive;
  for (const auto& column : sensitive_) {
    if (!seen_sensitive.insert(column.name).second) {
      throw DataError("duplicate sensitive attribute '" + column.name + "'");
    }
    if (column.values.size() != n) {
      throw DataError("sensitive attribute '" + column.name + "' has " +
                      std::to_string(column.values.size()) + " rows, expected " +
                      std::to_string(n));
    }
    CheckBinary(column.values, "sensitive attribute '" + column.name + "'");
  }
  for (std::size_t j = 0; j < features_.cols(); ++j) {
    const auto column = features_.col(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(column[i])) {
        throw DataError("feature '" + feature_names_[j] + "' row " + std::to_string(i) +
                        " is not finite");
      }
    }
  }
}

bool Dataset::has_sensitive(std::string_view name) const {
  for (const auto& column : sensitive_) {
    if (column.name == name) return true;
  }
  return false;
}

const std::vector<std::uint8_t>& Dataset::sensitive(std::string_view name) const {
  for (const auto& column : sensitive_) {
    if (column.name == name) return column.values;
  }
  throw DataError("unknown sensitive attribute '" + std::string(name) + "'");
}

std::vector<std::string> Dataset::sensitive_names() const {
  std::vector<std::string> names;
  names.reserve(sensitive_.size());
  for (const auto& column : sensitive_) names.push_back(column.name);
  return names;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Matrix features(indices.size(), cols());
  std::vector<std::uint8_t> labels(indices.size());
  std::vector<SensitiveColumn> sensitive;
  for (const auto& column : sensitive_) sensitive.push_back({column.name, {}});
  for (auto& column : sensitive) column.values.resize(indices.size());

  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= rows()) throw DataError("subset index " + std::to_string(i) + " out of range");
    labels[k] = labels_[i];
    for (std::size_t s = 0; s < sensitive_.size(); ++s) {
      sensitive[s].values[k] = sensitive_[s].values[i];
    }
  }
  for (std::size_t j = 0; j < cols(); ++j) {
    const auto source = features_.col(j);
    auto target = features.col(j);
    for (std::size_t k = 0; k < indices.size(); ++k) target[k] = source[indices[k]];
  }
  return Dataset(std::move(features), feature_names_, std::move(labels),
                 std::move(sensitive), label_name_);
}

}  // namespace fairex
