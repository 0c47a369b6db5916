#include "ppp/bracket_eval.hpp"

#include <algorithm>

#include "ppp/errors.hpp"
#include "ppp/treebank.hpp"

namespace ppp {

namespace {

void collect(const Tree& t, std::size_t start, bool is_root, const ScoringOptions& opt, std::vector<Span>& out) {
  const std::size_t end = start + t.leaf_count();
  if (t.is_leaf()) {
    if (opt.include_preterminals && t.is_preterminal()) {
      out.push_back({start, end, opt.labeled ? t.label() : std::string{}});
    }
    return;
  }
  if (!is_root || opt.include_root) out.push_back({start, end, opt.labeled ? t.label() : std::string{}});
  std::size_t pos = start;
  for (const Tree& c : t.children()) {
    collect(c, pos, false, opt, out);
    pos += c.leaf_count();
  }
}

}  // namespace

SpanSet spans_of(const Tree& tree, const ScoringOptions& options) {
  SpanSet set;
  set.sentence_length = tree.leaf_count();
  collect(tree, 0, true, options, set.spans);
  std::sort(set.spans.begin(), set.spans.end());
  return set;
}

std::size_t matched_spans(const SpanSet& gold, const SpanSet& test) {
  std::size_t matched = 0;
  auto g = gold.spans.begin();
  auto t = test.spans.begin();
  while (g != gold.spans.end() && t != test.spans.end()) {
    if (*g < *t) {
      ++g;
    } else if (*t < *g) {
      ++t;
    } else {
      ++matched;
      ++g;
      ++t;
    }
  }
  return matched;
}

F1Report f1_from_counts(std::size_t matched, std::size_t gold_count, std::size_t test_count) {
  F1Report r;
  r.matched = matched;
  r.gold_count = gold_count;
  r.test_count = test_count;
  if (gold_count == 0 && test_count == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = test_count ? static_cast<double>(matched) / static_cast<double>(test_count) : 0.0;
  r.recall = gold_count ? static_cast<double>(matched) / static_cast<double>(gold_count) : 0.0;
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

F1Report bracket_f1(const Tree& gold, const Tree& test, const ScoringOptions& options) {
  check_same_yield(gold, test, 0, "bracket_f1");
  const SpanSet g = spans_of(gold, options);
  const SpanSet t = spans_of(test, options);
  return f1_from_counts(matched_spans(g, t), g.size(), t.size());
}

F1Report corpus_f1(const std::vector<Tree>& gold, const std::vector<Tree>& test, const ScoringOptions& options) {
  if (gold.size() != test.size()) {
    throw DataError("corpus_f1: " + std::to_string(gold.size()) + " gold trees vs " + std::to_string(test.size()) +
                    " test trees");
  }
  std::size_t matched = 0, gold_count = 0, test_count = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    check_same_yield(gold[i], test[i], i, "corpus_f1");
    const SpanSet g = spans_of(gold[i], options);
    const SpanSet t = spans_of(test[i], options);
    matched += matched_spans(g, t);
    gold_count += g.size();
    test_count += t.size();
  }
  return f1_from_counts(matched, gold_count, test_count);
}

std::map<std::string, std::vector<double>> cf1(const std::map<std::string, std::vector<Tree>>& outputs,
                                               const ScoringOptions& options) {
  if (outputs.size() < 2) throw ArgumentError("cf1 needs at least two parsers");
  const std::size_t n = outputs.begin()->second.size();
  std::vector<const std::vector<Tree>*> lists;
  std::vector<std::string> names;
  for (const auto& [name, trees] : outputs) {
    if (trees.size() != n) throw DataError("cf1: parser '" + name + "' output length differs");
    lists.push_back(&trees);
    names.push_back(name);
  }
  const std::size_t k = lists.size();
  std::map<std::string, std::vector<double>> result;
  for (const auto& name : names) result[name].assign(n, 0.0);

  std::vector<SpanSet> spans(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      if (p > 0) check_same_yield((*lists[0])[i], (*lists[p])[i], i, "cf1 " + names[0] + " vs " + names[p]);
      spans[p] = spans_of((*lists[p])[i], options);
    }
    for (std::size_t p = 0; p < k; ++p) {
      double sum = 0;
      for (std::size_t q = 0; q < k; ++q) {
        if (q == p) continue;
        sum += f1_from_counts(matched_spans(spans[p], spans[q]), spans[p].size(), spans[q].size()).f1;
      }
      result[names[p]][i] = sum / static_cast<double>(k - 1);
    }
  }
  return result;
}

}  // namespace ppp
