#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppp/tree.hpp"

namespace ppp {

enum class Casing { kCased, kLowercased };

std::string_view to_string(Casing casing) noexcept;
Casing parse_casing(std::string_view text);

// Tokenized sentences, one token sequence per sentence.
struct Corpus {
  std::vector<Tokens> sentences;
  std::string source_id;
  Casing casing = Casing::kCased;

  std::size_t size() const noexcept { return sentences.size(); }
  // Throws DataError when empty, when a sentence is empty or holds an invalid
  // token, or when flagged lowercased but containing uppercase text.
  void validate() const;
};

// Aligned outputs of several parsers (and optionally the gold trees) for the
// same sentences.
struct ParallelParseSet {
  std::optional<std::vector<Tree>> gold;
  std::map<std::string, std::vector<Tree>> systems;

  std::size_t size() const noexcept;
  // Throws DataError on length mismatch and YieldMismatch when the yields of
  // sentence i differ between any two members after case folding.
  void validate() const;
};

// Unicode simple lowercase mapping of a UTF-8 string. Invalid UTF-8 bytes are
// passed through unchanged.
std::string lowercase(std::string_view utf8);
Tokens lowercase(const Tokens& tokens);
Tree lowercase(const Tree& tree);
std::vector<Tree> lowercase(const std::vector<Tree>& trees);
Corpus lowercase(const Corpus& corpus);
ParallelParseSet lowercase(const ParallelParseSet& set);

// Whitespace-separated tokens; blank lines are skipped.
Corpus parse_corpus(std::string_view text, std::string source_id = {});
Corpus read_corpus(const std::filesystem::path& path);
std::vector<Tree> read_trees(const std::filesystem::path& path);

void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
void write_trees(const std::filesystem::path& path, const std::vector<Tree>& trees);

Corpus corpus_from_trees(const std::vector<Tree>& trees, std::string source_id = {});

// Throws YieldMismatch naming `context` and the 0-based sentence index.
void check_same_yield(const Tree& a, const Tree& b, std::size_t index, std::string_view context);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// ---- synthetic treebank ---------------------------------------------------

struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t n_sentences = 100;
  std::size_t vocab_size = 200;
  std::size_t max_len = 20;
  std::size_t min_len = 3;
  // Bracket deletion probability of the "noisy" parser.
  double noise = 0.3;
  // Deletion probability of the second, independently seeded noisy parser.
  double noise_b = 0.15;
};

// Gold trees drawn from a fixed binary-branching PCFG, plus three synthetic
// parsers: "noisy" (deletes each non-root bracket with probability `noise`),
// "noisy_b" (same with `noise_b`, independent stream) and "right" (strictly
// right-branching rebracketing of the gold preterminals). Deterministic in
// the seed.
ParallelParseSet synth_treebank(const SynthOptions& options);

// Removes each non-root internal node with probability p, splicing its
// children into the parent.
Tree delete_brackets(const Tree& tree, double p, std::uint64_t seed);
// Strictly right-branching tree over the leaves of `tree`.
Tree right_branching(const Tree& tree);

}  // namespace ppp
