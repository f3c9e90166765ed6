#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "fairex/dataset.hpp"
#include "fairex/error.hpp"

namespace fairex {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

std::string Location(std::size_t line, const std::string& column) {
  return "line " + std::to_string(line) + ", column '" + column + "'";
}

double ParseNumber(std::string_view cell, std::size_t line, const std::string& column) {
  if (cell.empty()) throw DataError("missing value at " + Location(line, column));
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    throw DataError("non-numeric value '" + std::string(cell) + "' at " +
                    Location(line, column));
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite value at " + Location(line, column));
  }
  return value;
}

std::uint8_t ParseBinary(std::string_view cell, std::size_t line, const std::string& column) {
  const double value = ParseNumber(cell, line, column);
  if (value != 0.0 && value != 1.0) {
    throw DataError("value '" + std::string(cell) + "' at " + Location(line, column) +
                    " is not 0 or 1");
  }
  return static_cast<std::uint8_t>(value);
}

std::string FormatNumber(double value) {
  std::array<char, 32> buffer{};
  const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), end);
}

}  // namespace

Dataset LoadCsv(const std::filesystem::path& path, std::string_view label_column,
                std::span<const std::string> sensitive_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::vector<std::string> header;
  for (auto field : SplitFields(line)) header.emplace_back(Trim(field));

  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw DataError("empty column name at position " + std::to_string(c + 1));
    if (!position.emplace(header[c], c).second) {
      throw DataError("duplicate column '" + header[c] + "' in header");
    }
  }
  auto require = [&](std::string_view name) {
    const auto it = position.find(std::string(name));
    if (it == position.end()) {
      throw DataError("column '" + std::string(name) + "' not found in '" + path.string() + "'");
    }
    return it->second;
  };
  const std::size_t label_index = require(label_column);
  std::vector<std::size_t> sensitive_index;
  for (const auto& name : sensitive_columns) sensitive_index.push_back(require(name));

  std::vector<bool> is_role(header.size(), false);
  is_role[label_index] = true;
  for (std::size_t c : sensitive_index) {
    if (is_role[c]) throw DataError("column '" + header[c] + "' assigned to two roles");
    is_role[c] = true;
  }
  std::vector<std::size_t> feature_index;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!is_role[c]) {
      feature_index.push_back(c);
      feature_names.push_back(header[c]);
    }
  }

  std::vector<std::vector<double>> columns(feature_index.size());
  std::vector<std::uint8_t> labels;
  std::vector<std::vector<std::uint8_t>> sensitive(sensitive_index.size());

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    labels.push_back(ParseBinary(Trim(fields[label_index]), line_number, header[label_index]));
    for (std::size_t s = 0; s < sensitive_index.size(); ++s) {
      const std::size_t c = sensitive_index[s];
      sensitive[s].push_back(ParseBinary(Trim(fields[c]), line_number, header[c]));
    }
    for (std::size_t f = 0; f < feature_index.size(); ++f) {
      const std::size_t c = feature_index[f];
      columns[f].push_back(ParseNumber(Trim(fields[c]), line_number, header[c]));
    }
  }

  const std::size_t n = labels.size();
  if (n < 2) {
    throw DataError("'" + path.string() + "' has " + std::to_string(n) +
                    " data rows, at least 2 required");
  }
  Matrix features(n, feature_index.size());
  for (std::size_t f = 0; f < columns.size(); ++f) {
    std::copy(columns[f].begin(), columns[f].end(), features.col(f).begin());
  }
  std::vector<SensitiveColumn> sensitive_out;
  for (std::size_t s = 0; s < sensitive_index.size(); ++s) {
    sensitive_out.push_back({sensitive_columns[s], std::move(sensitive[s])});
  }
  return Dataset(std::move(features), std::move(feature_names), std::move(labels),
                 std::move(sensitive_out), std::string(label_column));
}

void WriteCsv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& name : data.feature_names()) out << name << ',';
  out << data.label_name();
  for (const auto& column : data.sensitive()) out << ',' << column.name;
  out << '\n';
  const Matrix& x = data.features();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) out << FormatNumber(x(i, j)) << ',';
    out << static_cast<int>(data.labels()[i]);
    for (const auto& column : data.sensitive()) out << ',' << static_cast<int>(column.values[i]);
    out << '\n';
  }
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

}  // namespace fairex
