#include "ppp/tsv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "ppp/errors.hpp"

namespace ppp {

long TsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<long>(i);
  }
  return -1;
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += '\t';
    out += cells[i];
  }
  out += '\n';
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    cells.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cells;
}

}  // namespace

std::string write_tsv(const TsvTable& table) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  append_row(out, table.header);
  for (const auto& r : table.rows) append_row(out, r);
  return out;
}

TsvTable parse_tsv(std::string_view text) {
  TsvTable t;
  bool have_header = false;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      t.comments.emplace_back(line);
      continue;
    }
    auto cells = split_tabs(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header.size()) {
        throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(t.header.size()),
                         line_no, 1);
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw ParseError("missing TSV header row", line_no, 1);
  return t;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view cell, std::size_t line, std::size_t column) {
  if (cell == "nan" || cell == "NA") return std::nan("");
  if (cell == "inf") return HUGE_VAL;
  if (cell == "-inf") return -HUGE_VAL;
  double v = 0;
  const char* first = cell.data();
  if (!cell.empty() && cell.front() == '+') ++first;
  const auto res = std::from_chars(first, cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || cell.empty()) {
    throw ParseError("not a number: '" + std::string(cell) + "'", line, column);
  }
  return v;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string provenance(std::string_view command, std::uint64_t config_hash) {
  return "produced-by: ppp " + std::string(command) + "; config-hash: " + hex64(config_hash);
}

}  // namespace ppp
