#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fairex/error.hpp"
#include "fairex/logit.hpp"

namespace fairex {
namespace {

std::string Format17(double v) {
  char buffer[40];
  const auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), v, std::chars_format::general, 17);
  return std::string(buffer, end);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  if (Trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(Trim(s.substr(start, comma == std::string_view::npos ? s.size() - start
                                                                       : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double ParseDouble(std::string_view s, const std::string& key) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw DataError("model field '" + key + "': cannot parse '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string SerializeModel(const LogitModel& model) {
  std::ostringstream os;
  os << "# fairex logistic model\n";
  os << "format = 1\n";
  os << "feature_names = ";
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    os << (j ? "," : "") << model.feature_names[j];
  }
  os << "\nweights = ";
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    os << (j ? "," : "") << Format17(model.weights[j]);
  }
  os << "\nintercept = " << Format17(model.intercept) << "\n";
  os << "threshold = " << Format17(model.threshold) << "\n";
  return os.str();
}

LogitModel ParseModel(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  std::size_t start = 0;
  std::size_t line_number = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = Trim(text.substr(start, end - start));
    start = end + 1;
    ++line_number;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("model line " + std::to_string(line_number) + " has no '='");
    }
    fields[std::string(Trim(line.substr(0, eq)))] = std::string(Trim(line.substr(eq + 1)));
  }
  auto require = [&](const char* key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw DataError(std::string("model is missing '") + key + "'");
    return it->second;
  };

  if (require("format") != "1") {
    throw DataError("unsupported model format '" + require("format") + "'");
  }
  LogitModel model;
  for (auto name : SplitList(require("feature_names"))) model.feature_names.emplace_back(name);
  for (auto value : SplitList(require("weights"))) {
    model.weights.push_back(ParseDouble(value, "weights"));
  }
  model.intercept = ParseDouble(require("intercept"), "intercept");
  model.threshold = ParseDouble(require("threshold"), "threshold");
  model.Validate();
  return model;
}

void SaveModel(const LogitModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << SerializeModel(model);
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

LogitModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseModel(buffer.str());
}

}  // namespace fairex
