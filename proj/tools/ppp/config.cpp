#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "ppp/errors.hpp"
#include "ppp/treebank.hpp"
#include "ppp/tsv.hpp"

namespace ppp::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

void Config::load_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  load_text(text, std::filesystem::absolute(path).parent_path(), path.filename().string());
}

void Config::load_text(std::string_view text, const std::filesystem::path& base_dir, std::string_view source) {
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(std::string(source) + ": expected 'key = value'", line_no, 1);
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ParseError(std::string(source) + ": invalid key '" + key + "'", line_no, 1);
    set(key, std::string(trim(line.substr(eq + 1))), base_dir);
  }
}

void Config::set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir) {
  if (!valid_key(key)) throw ArgumentError("invalid config key '" + key + "'");
  entries_[key] = {value, base_dir.empty() ? std::filesystem::current_path() : base_dir};
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ArgumentError("--set expects key=value, got '" + std::string(assignment) + "'");
  set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

const Config::Entry& Config::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ArgumentError("missing config key '" + key + "'");
  touch(key);
  return it->second;
}

void Config::touch(const std::string& key) const { used_.insert(key); }

std::string Config::get(const std::string& key) const { return entry(key).value; }

std::string Config::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double Config::number(const std::string& key) const {
  const std::string v = get(key);
  try {
    return parse_number(v, 1, 1);
  } catch (const ParseError&) {
    throw ArgumentError("config key '" + key + "' is not a number: '" + v + "'");
  }
}

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long Config::integer(const std::string& key) const {
  const std::string v = get(key);
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ArgumentError("config key '" + key + "' is not an integer: '" + v + "'");
  }
  return out;
}

long Config::integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

std::uint64_t Config::seed(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ArgumentError("config key '" + key + "' is not an unsigned integer: '" + v + "'");
  }
  return out;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ArgumentError("config key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::list(const std::string& key) const {
  const std::string v = get(key);
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = v.find(',', start);
    const auto item = trim(std::string_view(v).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> Config::list(const std::string& key, const std::vector<std::string>& fallback) const {
  return has(key) ? list(key) : fallback;
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : list(key)) {
    try {
      out.push_back(parse_number(item, 1, 1));
    } catch (const ParseError&) {
      throw ArgumentError("config key '" + key + "' holds a non-number: '" + item + "'");
    }
  }
  return out;
}

std::filesystem::path Config::path(const std::string& key) const {
  const Entry& e = entry(key);
  if (e.value.empty()) throw ArgumentError("config key '" + key + "' is empty");
  const std::filesystem::path p(e.value);
  return p.is_absolute() ? p : (e.base_dir / p).lexically_normal();
}

std::optional<std::filesystem::path> Config::optional_path(const std::string& key) const {
  if (!has(key) || entries_.at(key).value.empty()) return std::nullopt;
  return path(key);
}

std::filesystem::path Config::output_path(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.value.empty()) throw ArgumentError("missing config key '" + key + "'");
  const std::filesystem::path p(it->second.value);
  return p.is_absolute() ? p : (it->second.base_dir / p).lexically_normal();
}

std::filesystem::path Config::output_path(const std::string& key, const std::filesystem::path& fallback) const {
  return has(key) ? output_path(key) : fallback;
}

std::uint64_t Config::hash() const {
  std::string text;
  for (const auto& key : used_) {
    if (unhashed_.count(key)) continue;
    text += key + "=" + entries_.at(key).value + "\n";
  }
  return fnv1a(text);
}

}  // namespace ppp::cli
