#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppp/feature_vector.hpp"
#include "ppp/ngram_lm.hpp"
#include "ppp/tree.hpp"

namespace ppp {

struct Link {
  std::string head;
  std::string dependent;
  std::size_t head_index = 0;
  std::size_t dependent_index = 0;
  bool rightward = true;  // head precedes dependent

  std::string symbol() const { return head + "_" + dependent; }
};

// Links of one sentence, ordered by dependent position.
struct LinkSet {
  std::vector<Link> links;

  std::size_t size() const noexcept { return links.size(); }
  bool empty() const noexcept { return links.empty(); }
  std::vector<std::string> symbols() const;
};

// For every internal node with children c1..ck, a link from the leftmost leaf
// of c1 to the leftmost leaf of each of c2..ck. A single-leaf tree yields no
// links.
LinkSet links_from_tree(const Tree& tree);

// Training link statistics and link-sequence language models of orders 1..5.
class LinkIndex {
 public:
  // Throws ArgumentError when no training tree carries a link.
  static LinkIndex build(const std::vector<Tree>& training_trees, const LmOptions& lm_options = {});

  std::size_t pair_count(const std::string& head, const std::string& dep) const;
  std::size_t head_count(const std::string& head) const;
  std::size_t dependent_count(const std::string& dep) const;
  std::size_t total_links() const noexcept { return total_; }

  const std::unordered_map<std::string, std::size_t>& pairs() const noexcept { return pairs_; }
  const std::unordered_map<std::string, std::size_t>& heads() const noexcept { return heads_; }
  const std::vector<NGramLM>& sequence_models() const noexcept { return lms_; }

 private:
  std::unordered_map<std::string, std::size_t> pairs_;
  std::unordered_map<std::string, std::size_t> heads_;
  std::unordered_map<std::string, std::size_t> deps_;
  std::size_t total_ = 0;
  std::vector<NGramLM> lms_;
};

// {token coverage, type coverage, unseen rate} x {pairs, heads, dependents}.
// All nine are 0 for an empty link set.
FeatureVector coverage_block(const LinkIndex& index, const LinkSet& links);

// Sentinel perplexity reported for a sentence without links.
constexpr double kEmptyLinkPerplexity = 1e6;

// {logp, ppl, bpw} x orders 1..5 of the link-symbol sequence, named
// link_<stat>_<order>.
FeatureVector link_perplexity_block(const LinkIndex& index, const LinkSet& links,
                                    double empty_ppl = kEmptyLinkPerplexity);

// chi^2(x, y) = sum_i (x_i - y_i)^2 / (x_i + y_i) between the sentence's
// relative link frequencies and the training ones, over link pairs and over
// heads.
FeatureVector chi2_block(const LinkIndex& index, const LinkSet& links);

// chi^2 distance between two sparse relative-frequency vectors.
double chi2_distance(const std::unordered_map<std::string, double>& x, const std::unordered_map<std::string, double>& y);

constexpr std::size_t kLinkFeatureCount = 9 + 15 + 2;

struct LinkFeatures {
  FeatureVector features;
  bool empty_links = false;
};

LinkFeatures link_vector(const LinkIndex& index, const Tree& proxy_parse, double empty_ppl = kEmptyLinkPerplexity);

}  // namespace ppp
