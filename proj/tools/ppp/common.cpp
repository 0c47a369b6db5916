#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ppp/errors.hpp"

namespace ppp::cli {

void write_output(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  write_file(path, content);
}

std::string fixed(double value, int decimals) {
  if (!std::isfinite(value)) return format_number(value);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::vector<Tree> load_trees(const std::filesystem::path& path, Casing casing) {
  auto trees = read_trees(path);
  return casing == Casing::kLowercased ? lowercase(trees) : trees;
}

ScoringOptions scoring_options(const Config& config) {
  ScoringOptions o;
  o.labeled = config.flag("labeled", false);
  return o;
}

std::string comment_value(const TsvTable& table, std::string_view key) {
  const std::string prefix = std::string(key) + ": ";
  for (const auto& c : table.comments) {
    if (c.rfind(prefix, 0) == 0) return c.substr(prefix.size());
  }
  return {};
}

std::vector<std::string> result_header() { return {"Setting", "Parser", "#dimI", "Model", "#dim", "r", "RMSE", "MAE", "RAE"}; }

std::vector<std::string> result_row(const std::string& setting, const std::string& parser, std::size_t dim_initial,
                                    const std::string& model, std::size_t dim, const EvalReport& report, bool exact) {
  const auto num = [&](double v) { return exact ? format_number(v) : fixed(v, 4); };
  return {setting.empty() ? "-" : setting,
          parser.empty() ? "-" : parser,
          std::to_string(dim_initial),
          model,
          std::to_string(dim),
          num(report.r),
          num(report.rmse),
          num(report.mae),
          report.rae ? num(*report.rae) : "NA"};
}

}  // namespace ppp::cli
