#include "ppp/treebank.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "ppp/errors.hpp"

namespace ppp {

std::string_view to_string(Casing casing) noexcept {
  return casing == Casing::kCased ? "cased" : "uncased";
}

Casing parse_casing(std::string_view text) {
  if (text == "cased") return Casing::kCased;
  if (text == "uncased" || text == "lowercased") return Casing::kLowercased;
  throw ArgumentError("unknown casing '" + std::string(text) + "' (expected cased|uncased)");
}

std::string lowercase(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(utf8.data());
  const auto length = static_cast<std::int32_t>(utf8.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      out.append(utf8.substr(start, i - start));
      continue;
    }
    const UChar32 lower = u_tolower(c);
    std::uint8_t buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, lower);
    out.append(reinterpret_cast<const char*>(buf), n);
  }
  return out;
}

Tokens lowercase(const Tokens& tokens) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lowercase(t));
  return out;
}

Tree lowercase(const Tree& tree) {
  return map_tokens(tree, [](const std::string& t) { return lowercase(t); });
}

std::vector<Tree> lowercase(const std::vector<Tree>& trees) {
  std::vector<Tree> out;
  out.reserve(trees.size());
  for (const auto& t : trees) out.push_back(lowercase(t));
  return out;
}

Corpus lowercase(const Corpus& corpus) {
  Corpus out;
  out.source_id = corpus.source_id;
  out.casing = Casing::kLowercased;
  out.sentences.reserve(corpus.size());
  for (const auto& s : corpus.sentences) out.sentences.push_back(lowercase(s));
  return out;
}

ParallelParseSet lowercase(const ParallelParseSet& set) {
  ParallelParseSet out;
  if (set.gold) out.gold = lowercase(*set.gold);
  for (const auto& [name, trees] : set.systems) out.systems.emplace(name, lowercase(trees));
  return out;
}

void Corpus::validate() const {
  if (sentences.empty()) throw DataError("corpus '" + source_id + "' has no sentences");
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].empty()) {
      throw DataError("corpus '" + source_id + "': sentence " + std::to_string(i) + " is empty");
    }
    for (const auto& tok : sentences[i]) {
      if (!is_valid_token(tok)) {
        throw DataError("corpus '" + source_id + "': invalid token '" + tok + "' in sentence " + std::to_string(i));
      }
      if (casing == Casing::kLowercased && lowercase(tok) != tok) {
        throw DataError("corpus '" + source_id + "' is flagged lowercased but contains '" + tok + "'");
      }
    }
  }
}

std::size_t ParallelParseSet::size() const noexcept {
  if (gold) return gold->size();
  return systems.empty() ? 0 : systems.begin()->second.size();
}

void check_same_yield(const Tree& a, const Tree& b, std::size_t index, std::string_view context) {
  if (a.leaf_count() != b.leaf_count() || a.yield() != b.yield()) {
    throw YieldMismatch(std::string(context) + ": yields differ at sentence " + std::to_string(index));
  }
}

void ParallelParseSet::validate() const {
  const std::size_t n = size();
  const std::vector<Tree>* reference = gold ? &*gold : nullptr;
  std::string reference_name = "gold";
  for (const auto& [name, trees] : systems) {
    if (trees.size() != n) {
      throw DataError("parser '" + name + "' has " + std::to_string(trees.size()) + " trees, expected " +
                      std::to_string(n));
    }
    if (!reference) {
      reference = &trees;
      reference_name = name;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (lowercase((*reference)[i].yield()) != lowercase(trees[i].yield())) {
        throw YieldMismatch(reference_name + " vs " + name + ": yields differ at sentence " + std::to_string(i));
      }
    }
  }
}

Corpus parse_corpus(std::string_view text, std::string source_id) {
  Corpus corpus;
  corpus.source_id = std::move(source_id);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    Tokens tokens;
    std::string tok;
    while (words >> tok) tokens.push_back(std::move(tok));
    if (!tokens.empty()) corpus.sentences.push_back(std::move(tokens));
  }
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Corpus read_corpus(const std::filesystem::path& path) {
  Corpus c = parse_corpus(read_file(path), path.filename().string());
  c.validate();
  return c;
}

std::vector<Tree> read_trees(const std::filesystem::path& path) {
  try {
    return parse_bracketed(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line(), e.column());
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ' ';
      out += s[i];
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_trees(const std::filesystem::path& path, const std::vector<Tree>& trees) {
  std::string out;
  for (const auto& t : trees) {
    out += serialize(t);
    out += '\n';
  }
  write_file(path, out);
}

Corpus corpus_from_trees(const std::vector<Tree>& trees, std::string source_id) {
  Corpus c;
  c.source_id = std::move(source_id);
  c.sentences.reserve(trees.size());
  for (const auto& t : trees) c.sentences.push_back(t.yield());
  return c;
}

}  // namespace ppp
