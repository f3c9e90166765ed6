#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairex/matrix.hpp"

namespace fairex {

// Binary sensitive attribute; value 1 marks membership of group z = 1.
struct SensitiveColumn {
  std::string name;
  std::vector<std::uint8_t> values;

  bool operator==(const SensitiveColumn&) const = default;
};

// Immutable labelled tabular data. The constructor validates shape, binary
// coding of labels and sensitive columns, name uniqueness and finiteness, and
// throws DataError on the first violation.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<std::string> feature_names,
          std::vector<std::uint8_t> labels,
          std::vector<SensitiveColumn> sensitive,
          std::string label_name = "label");

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return feature_names_.size(); }

  const Matrix& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const std::string& label_name() const { return label_name_; }
  const std::vector<SensitiveColumn>& sensitive() const { return sensitive_; }

  bool has_sensitive(std::string_view name) const;
  // Throws DataError when the attribute is unknown.
  const std::vector<std::uint8_t>& sensitive(std::string_view name) const;
  std::vector<std::string> sensitive_names() const;

  std::vector<double> row(std::size_t i) const { return features_.row(i); }

  // Rows in the order given; duplicates are allowed.
  Dataset Subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  Matrix features_;
  std::vector<std::string> feature_names_;
  std::vector<std::uint8_t> labels_;
  std::vector<SensitiveColumn> sensitive_;
  std::string label_name_;
};

// Reads a comma-separated file with a header row. `label_column` and every
// entry of `sensitive_columns` must be 0/1 columns; all other columns become
// features in header order. Errors carry the 1-based line and column name.
Dataset LoadCsv(const std::filesystem::path& path, std::string_view label_column,
                std::span<const std::string> sensitive_columns);

// Writes features, then the label column, then sensitive columns. Values are
// emitted in shortest round-trip form.
void WriteCsv(const Dataset& data, const std::filesystem::path& path);

// Per-feature centring and scaling fitted on one dataset and applied to
// others. Columns with zero spread keep scale 1.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> scales;

  static Standardizer Fit(const Matrix& x);
  Matrix Apply(const Matrix& x) const;
};

}  // namespace fairex
