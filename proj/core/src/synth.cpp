#include <array>
#include <string>
#include <vector>

#include "ppp/errors.hpp"
#include "ppp/rng.hpp"
#include "ppp/treebank.hpp"

namespace ppp {

namespace {

enum Tag { DT, NN, NNS, VB, VBD, IN, JJ, RB, PRP, CC, kTagCount };
constexpr std::array<const char*, kTagCount> kTagNames = {"DT", "NN", "NNS", "VB", "VBD", "IN", "JJ", "RB", "PRP", "CC"};

enum Phrase { S, NP, VP, PP, ADJP, SBAR, kPhraseCount };
constexpr std::array<const char*, kPhraseCount> kPhraseNames = {"S", "NP", "VP", "PP", "ADJP", "SBAR"};

struct Weighted {
  int symbol;
  double weight;
};

// Binary rules X -> Y Z, indexed by X. Left children are drawn from the first
// list, right children from the second.
struct Rule {
  std::vector<Weighted> left;
  std::vector<Weighted> right;
  std::vector<Weighted> tags;  // preterminal choice for a one-leaf child
};

const std::array<Rule, kPhraseCount>& grammar() {
  static const std::array<Rule, kPhraseCount> rules = {{
      // S
      {{{NP, 0.7}, {PP, 0.1}, {S, 0.1}, {SBAR, 0.1}}, {{VP, 0.75}, {S, 0.15}, {PP, 0.1}}, {{PRP, 0.5}, {NN, 0.3}, {CC, 0.2}}},
      // NP
      {{{NP, 0.5}, {ADJP, 0.3}, {NP, 0.2}}, {{NP, 0.5}, {PP, 0.35}, {SBAR, 0.15}}, {{DT, 0.45}, {NN, 0.25}, {NNS, 0.15}, {JJ, 0.15}}},
      // VP
      {{{VP, 0.6}, {ADJP, 0.2}, {VP, 0.2}}, {{NP, 0.55}, {PP, 0.25}, {S, 0.1}, {ADJP, 0.1}}, {{VBD, 0.5}, {VB, 0.35}, {RB, 0.15}}},
      // PP
      {{{PP, 1.0}}, {{NP, 0.9}, {S, 0.1}}, {{IN, 1.0}}},
      // ADJP
      {{{ADJP, 0.7}, {NP, 0.3}}, {{ADJP, 0.6}, {PP, 0.4}}, {{JJ, 0.6}, {RB, 0.4}}},
      // SBAR
      {{{SBAR, 1.0}}, {{S, 1.0}}, {{IN, 0.6}, {CC, 0.4}}},
  }};
  return rules;
}

int pick(const std::vector<Weighted>& options, Rng& rng) {
  double total = 0;
  for (const auto& o : options) total += o.weight;
  double u = rng.uniform() * total;
  for (const auto& o : options) {
    if (u < o.weight) return o.symbol;
    u -= o.weight;
  }
  return options.back().symbol;
}

class Generator {
 public:
  Generator(std::size_t vocab_size) {
    // Each tag owns a contiguous slice of the vocabulary; words within a
    // slice follow a Zipf law.
    const std::size_t per_tag = vocab_size / kTagCount;
    std::size_t next = 0;
    for (int t = 0; t < kTagCount; ++t) {
      const std::size_t size = t + 1 == kTagCount ? vocab_size - next : per_tag;
      auto& slice = words_[t];
      auto& cdf = cdf_[t];
      double acc = 0;
      for (std::size_t i = 0; i < size; ++i) {
        slice.push_back("w" + std::to_string(next + i));
        acc += 1.0 / static_cast<double>(i + 1);
        cdf.push_back(acc);
      }
      for (double& c : cdf) c /= acc;
      next += size;
    }
  }

  Tree sentence(std::size_t length, Rng& rng) const { return expand(S, length, rng); }

 private:
  Tree expand(int phrase, std::size_t leaves, Rng& rng) const {
    const Rule& rule = grammar()[phrase];
    if (leaves == 1) return preterminal(pick(rule.tags, rng), rng);
    // Left child size k in [1, leaves-1] with geometric preference for short
    // left children, i.e. right-branching structure.
    std::vector<double> weights(leaves - 1);
    double w = 1.0, total = 0.0;
    for (auto& x : weights) {
      x = w;
      total += w;
      w *= 0.55;
    }
    double u = rng.uniform() * total;
    std::size_t k = 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) {
        k = i + 1;
        break;
      }
      u -= weights[i];
      k = i + 1;
    }
    const int left = pick(rule.left, rng);
    const int right = pick(rule.right, rng);
    std::vector<Tree> kids;
    kids.push_back(k == 1 ? preterminal(pick(grammar()[left].tags, rng), rng) : expand(left, k, rng));
    kids.push_back(leaves - k == 1 ? preterminal(pick(grammar()[right].tags, rng), rng) : expand(right, leaves - k, rng));
    return Tree::node(kPhraseNames[phrase], std::move(kids));
  }

  Tree preterminal(int tag, Rng& rng) const {
    const auto& cdf = cdf_[tag];
    const double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < cdf.size() && u >= cdf[i]) ++i;
    return Tree::leaf(words_[tag][i], kTagNames[tag]);
  }

  std::array<std::vector<std::string>, kTagCount> words_;
  std::array<std::vector<double>, kTagCount> cdf_;
};

void collect_leaves(const Tree& t, std::vector<Tree>& out) {
  if (t.is_leaf()) {
    out.push_back(t);
    return;
  }
  for (const Tree& c : t.children()) collect_leaves(c, out);
}

void delete_into(const Tree& t, double p, Rng& rng, std::vector<Tree>& out, bool is_root) {
  if (t.is_leaf()) {
    out.push_back(t);
    return;
  }
  const bool drop = !is_root && rng.bernoulli(p);
  std::vector<Tree> kids;
  for (const Tree& c : t.children()) delete_into(c, p, rng, kids, false);
  if (drop) {
    for (auto& k : kids) out.push_back(std::move(k));
  } else {
    out.push_back(Tree::node(t.label(), std::move(kids)));
  }
}

Tree delete_with(const Tree& tree, double p, Rng& rng) {
  std::vector<Tree> out;
  delete_into(tree, p, rng, out, true);
  return std::move(out.front());
}

}  // namespace

Tree delete_brackets(const Tree& tree, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("deletion probability must lie in [0,1]");
  Rng rng(seed);
  return delete_with(tree, p, rng);
}

Tree right_branching(const Tree& tree) {
  std::vector<Tree> leaves;
  collect_leaves(tree, leaves);
  if (leaves.size() == 1) return leaves.front();
  const std::string root = tree.is_internal() && !tree.label().empty() ? tree.label() : "S";
  Tree cur = std::move(leaves.back());
  for (std::size_t i = leaves.size() - 1; i-- > 0;) {
    cur = Tree::node(i == 0 ? root : "X", {std::move(leaves[i]), std::move(cur)});
  }
  return cur;
}

ParallelParseSet synth_treebank(const SynthOptions& options) {
  if (options.n_sentences < 1) throw ArgumentError("synth: n_sentences must be >= 1");
  if (options.vocab_size < 10) throw ArgumentError("synth: vocab_size must be >= 10");
  if (options.max_len < 3) throw ArgumentError("synth: max_len must be >= 3");
  if (options.min_len < 1 || options.min_len > options.max_len) {
    throw ArgumentError("synth: min_len must lie in [1, max_len]");
  }
  for (double p : {options.noise, options.noise_b}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("synth: noise must lie in [0,1]");
  }

  const Generator gen(options.vocab_size);
  Rng gold_rng = Rng::derive(options.seed, 0);
  Rng noisy_rng = Rng::derive(options.seed, 1);
  Rng noisy_b_rng = Rng::derive(options.seed, 2);

  std::vector<Tree> gold, noisy, noisy_b, right;
  gold.reserve(options.n_sentences);
  const std::size_t span = options.max_len - options.min_len + 1;
  for (std::size_t i = 0; i < options.n_sentences; ++i) {
    const std::size_t len = options.min_len + gold_rng.below(span);
    gold.push_back(gen.sentence(len, gold_rng));
    noisy.push_back(delete_with(gold.back(), options.noise, noisy_rng));
    noisy_b.push_back(delete_with(gold.back(), options.noise_b, noisy_b_rng));
    right.push_back(right_branching(gold.back()));
  }

  ParallelParseSet set;
  set.gold = std::move(gold);
  set.systems.emplace("noisy", std::move(noisy));
  set.systems.emplace("noisy_b", std::move(noisy_b));
  set.systems.emplace("right", std::move(right));
  return set;
}

}  // namespace ppp
