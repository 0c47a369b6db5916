#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ppp {

// Tab-separated table with a mandatory header row. Lines starting with '#'
// are comments; they are kept on write and skipped on read.
struct TsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  long column(std::string_view name) const;
};

std::string write_tsv(const TsvTable& table);
// Throws ParseError (with line numbers) on ragged rows or a missing header.
TsvTable parse_tsv(std::string_view text);

// Shortest representation that reads back to the same double.
std::string format_number(double value);
// Throws ParseError when the cell is not a complete number.
double parse_number(std::string_view cell, std::size_t line, std::size_t column);

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t value);

// "produced-by: ppp <command>; config-hash: <hex>"
std::string provenance(std::string_view command, std::uint64_t config_hash);

}  // namespace ppp
