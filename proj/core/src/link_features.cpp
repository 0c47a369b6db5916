#include "ppp/link_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ppp/errors.hpp"

namespace ppp {

namespace {

struct Leftmost {
  std::string token;
  std::size_t index;
};

// Returns the leftmost leaf of `t`, which starts at token position `start`.
Leftmost collect(const Tree& t, std::size_t start, std::vector<Link>& out) {
  if (t.is_leaf()) return {t.token(), start};
  std::vector<Leftmost> heads;
  std::size_t pos = start;
  for (const Tree& c : t.children()) {
    heads.push_back(collect(c, pos, out));
    pos += c.leaf_count();
  }
  for (std::size_t i = 1; i < heads.size(); ++i) {
    out.push_back({heads[0].token, heads[i].token, heads[0].index, heads[i].index, true});
  }
  return heads.front();
}

std::string pair_key(const std::string& h, const std::string& d) { return h + '\x1f' + d; }

template <typename Map>
std::size_t lookup(const Map& m, const std::string& k) {
  const auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}

}  // namespace

std::vector<std::string> LinkSet::symbols() const {
  std::vector<std::string> out;
  out.reserve(links.size());
  for (const auto& l : links) out.push_back(l.symbol());
  return out;
}

LinkSet links_from_tree(const Tree& tree) {
  LinkSet set;
  collect(tree, 0, set.links);
  std::sort(set.links.begin(), set.links.end(),
            [](const Link& a, const Link& b) { return a.dependent_index < b.dependent_index; });
  return set;
}

LinkIndex LinkIndex::build(const std::vector<Tree>& training_trees, const LmOptions& lm_options) {
  LinkIndex index;
  std::vector<Tokens> sequences;
  for (const Tree& t : training_trees) {
    const LinkSet links = links_from_tree(t);
    if (links.empty()) continue;
    for (const auto& l : links.links) {
      ++index.pairs_[pair_key(l.head, l.dependent)];
      ++index.heads_[l.head];
      ++index.deps_[l.dependent];
      ++index.total_;
    }
    sequences.push_back(links.symbols());
  }
  if (sequences.empty()) throw ArgumentError("link index: no training tree has two or more leaves");
  for (int k = 1; k <= NGramLM::kMaxOrder; ++k) {
    index.lms_.push_back(NGramLM::train(sequences, k, Direction::kForward, lm_options));
  }
  return index;
}

std::size_t LinkIndex::pair_count(const std::string& head, const std::string& dep) const {
  return lookup(pairs_, pair_key(head, dep));
}
std::size_t LinkIndex::head_count(const std::string& head) const { return lookup(heads_, head); }
std::size_t LinkIndex::dependent_count(const std::string& dep) const { return lookup(deps_, dep); }

FeatureVector coverage_block(const LinkIndex& index, const LinkSet& links) {
  FeatureVector fv;
  const char* kinds[] = {"pair", "head", "dep"};
  for (int kind = 0; kind < 3; ++kind) {
    std::map<std::string, std::size_t> keys;
    for (const auto& l : links.links) {
      ++keys[kind == 0 ? pair_key(l.head, l.dependent) : kind == 1 ? l.head : l.dependent];
    }
    std::size_t seen_tokens = 0, seen_types = 0;
    for (const auto& [k, c] : keys) {
      const std::size_t n = kind == 0 ? lookup(index.pairs(), k) : kind == 1 ? index.head_count(k) : index.dependent_count(k);
      if (n > 0) {
        seen_tokens += c;
        ++seen_types;
      }
    }
    const double n_tok = static_cast<double>(links.size());
    const double n_typ = static_cast<double>(keys.size());
    const double tok_cov = links.empty() ? 0.0 : static_cast<double>(seen_tokens) / n_tok;
    const double typ_cov = links.empty() ? 0.0 : static_cast<double>(seen_types) / n_typ;
    const double unseen = links.empty() ? 0.0 : 1.0 - tok_cov;
    const std::string base = std::string("link_") + kinds[kind] + "_";
    fv.add(base + "token_cov", tok_cov);
    fv.add(base + "type_cov", typ_cov);
    fv.add(base + "unseen_rate", unseen);
  }
  return fv;
}

FeatureVector link_perplexity_block(const LinkIndex& index, const LinkSet& links, double empty_ppl) {
  FeatureVector fv;
  const Tokens seq = links.symbols();
  for (const NGramLM& lm : index.sequence_models()) {
    LMScores s;
    if (seq.empty()) {
      s.logp = 0.0;
      s.ppl = empty_ppl;
      s.bpw = std::log2(empty_ppl);
    } else {
      s = lm.score(seq);
    }
    const std::string k = std::to_string(lm.order());
    fv.add("link_logp_" + k, s.logp);
    fv.add("link_ppl_" + k, s.ppl);
    fv.add("link_bpw_" + k, s.bpw);
  }
  return fv;
}

double chi2_distance(const std::unordered_map<std::string, double>& x, const std::unordered_map<std::string, double>& y) {
  // Ordered traversal keeps the floating-point sum independent of hashing.
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [k, v] : x) joint[k].first = v;
  for (const auto& [k, v] : y) joint[k].second = v;
  double sum = 0;
  for (const auto& [k, xy] : joint) {
    const double s = xy.first + xy.second;
    if (s <= 0) continue;
    const double d = xy.first - xy.second;
    sum += d * d / s;
  }
  return sum;
}

namespace {

// Training side of the distance only needs the terms on the sentence's
// support plus the mass outside it: for y_i with x_i = 0 the term is y_i.
double chi2_against_training(const std::map<std::string, std::size_t>& sentence, std::size_t sentence_total,
                             const std::unordered_map<std::string, std::size_t>& training, std::size_t training_total) {
  if (sentence_total == 0) return 0.0;
  double sum = 0, covered = 0;
  for (const auto& [k, c] : sentence) {
    const double x = static_cast<double>(c) / static_cast<double>(sentence_total);
    const auto it = training.find(k);
    const double y = it == training.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(training_total);
    covered += y;
    const double d = x - y;
    sum += d * d / (x + y);
  }
  return sum + std::max(0.0, 1.0 - covered);
}

}  // namespace

FeatureVector chi2_block(const LinkIndex& index, const LinkSet& links) {
  std::map<std::string, std::size_t> pairs, heads;
  for (const auto& l : links.links) {
    ++pairs[pair_key(l.head, l.dependent)];
    ++heads[l.head];
  }
  FeatureVector fv;
  fv.add("link_chi2_pair", chi2_against_training(pairs, links.size(), index.pairs(), index.total_links()));
  fv.add("link_chi2_head", chi2_against_training(heads, links.size(), index.heads(), index.total_links()));
  return fv;
}

LinkFeatures link_vector(const LinkIndex& index, const Tree& proxy_parse, double empty_ppl) {
  const LinkSet links = links_from_tree(proxy_parse);
  LinkFeatures out;
  out.empty_links = links.empty();
  out.features = coverage_block(index, links);
  out.features.append(link_perplexity_block(index, links, empty_ppl));
  out.features.append(chi2_block(index, links));
  return out;
}

}  // namespace ppp
