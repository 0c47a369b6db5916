#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ppp/tree.hpp"

namespace ppp {

struct Span {
  std::size_t start = 0;  // token index
  std::size_t end = 0;    // exclusive
  std::string label;      // empty when unlabeled

  auto operator<=>(const Span&) const = default;
};

// Multiset of bracket spans, kept sorted.
struct SpanSet {
  std::vector<Span> spans;
  std::size_t sentence_length = 0;

  std::size_t size() const noexcept { return spans.size(); }
};

struct ScoringOptions {
  bool labeled = false;
  bool include_preterminals = false;
  bool include_root = true;
};

struct F1Report {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t matched = 0;
  std::size_t gold_count = 0;
  std::size_t test_count = 0;
};

SpanSet spans_of(const Tree& tree, const ScoringOptions& options = {});

// Size of the multiset intersection of two sorted span multisets.
std::size_t matched_spans(const SpanSet& gold, const SpanSet& test);

// P/R/F1 from counts. Both sides empty scores 1; one side empty scores 0.
F1Report f1_from_counts(std::size_t matched, std::size_t gold_count, std::size_t test_count);

// Throws YieldMismatch when the two trees cover different token sequences.
F1Report bracket_f1(const Tree& gold, const Tree& test, const ScoringOptions& options = {});

// Micro-averaged over sentences. Throws DataError on length mismatch.
F1Report corpus_f1(const std::vector<Tree>& gold, const std::vector<Tree>& test, const ScoringOptions& options = {});

// Per-sentence F1 of each parser against every other parser, averaged:
// CF1(p) = 1/(|P|-1) * sum_{q != p} F1(p, q), where p plays the gold role.
// Requires at least two parsers with aligned outputs.
std::map<std::string, std::vector<double>> cf1(const std::map<std::string, std::vector<Tree>>& outputs,
                                               const ScoringOptions& options = {});

}  // namespace ppp
