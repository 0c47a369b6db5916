#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ppp::cli {

// Flat key = value configuration. Later sources override earlier ones; a
// value remembers the directory relative paths in it are resolved against
// (the config file's directory, or the working directory for overrides).
class Config {
 public:
  // Lines are "key = value"; '#' starts a comment line. Throws IoError or
  // ParseError.
  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text, const std::filesystem::path& base_dir, std::string_view source = "config");
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir = {});
  // "key=value" as given to --set.
  void set_assignment(std::string_view assignment);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  // Comma-separated, trimmed, empty items dropped.
  std::vector<std::string> list(const std::string& key) const;
  std::vector<std::string> list(const std::string& key, const std::vector<std::string>& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::filesystem::path path(const std::string& key) const;
  std::optional<std::filesystem::path> optional_path(const std::string& key) const;
  // Output locations are resolved like paths but do not enter the hash, so
  // the same run written elsewhere carries the same provenance.
  std::filesystem::path output_path(const std::string& key) const;
  std::filesystem::path output_path(const std::string& key, const std::filesystem::path& fallback) const;

  // FNV-1a over the sorted "key=value" lines of every key read so far
  // (outputs and worker counts excluded).
  std::uint64_t hash() const;

  // Excluded from the hash: they change where or how fast, not what.
  void ignore_in_hash(const std::string& key) { unhashed_.insert(key); }

 private:
  struct Entry {
    std::string value;
    std::filesystem::path base_dir;
  };
  const Entry& entry(const std::string& key) const;
  void touch(const std::string& key) const;

  std::map<std::string, Entry> entries_;
  std::set<std::string> unhashed_;
  mutable std::set<std::string> used_;
};

}  // namespace ppp::cli
