#include "ppp/text_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "ppp/errors.hpp"

namespace ppp {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Retrieval F1 floor inside log(F1) for the joint score.
constexpr double kRetrievalFloor = 1e-6;

double safe_div(double a, double b) { return b > 0 ? a / b : 0.0; }
double harmonic(double p, double r) { return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0; }

std::map<std::string, std::uint32_t> bag_of(const Tokens& s) {
  std::map<std::string, std::uint32_t> bag;
  for (const auto& w : s) ++bag[w];
  return bag;
}

}  // namespace

std::string NGramIndex::join(const std::vector<std::string>& ngram) {
  std::string key;
  for (std::size_t i = 0; i < ngram.size(); ++i) {
    if (i) key += '\x1f';
    key += ngram[i];
  }
  return key;
}

std::vector<std::vector<std::string>> NGramIndex::ngrams(const Tokens& sentence, int order, NGramVariant v) {
  std::vector<std::string> seq;
  if (v == NGramVariant::kBoundary) seq.emplace_back(kStart);
  seq.insert(seq.end(), sentence.begin(), sentence.end());
  if (v == NGramVariant::kBoundary) seq.emplace_back(kEnd);
  std::vector<std::vector<std::string>> out;
  const std::size_t n = static_cast<std::size_t>(order);
  for (std::size_t i = 0; i + n <= seq.size(); ++i) out.emplace_back(seq.begin() + i, seq.begin() + i + n);
  return out;
}

NGramIndex NGramIndex::build(const Corpus& corpus) {
  if (corpus.sentences.empty()) throw ArgumentError("cannot index an empty corpus");
  NGramIndex index;
  double len_sum = 0;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const Tokens& sent = corpus.sentences[s];
    index.lengths_.push_back(sent.size());
    len_sum += static_cast<double>(sent.size());
    for (NGramVariant v : {NGramVariant::kPlain, NGramVariant::kBoundary}) {
      for (int n = 1; n <= kMaxOrder; ++n) {
        for (const auto& g : ngrams(sent, n, v)) {
          ++index.maps_[idx(v)][n - 1][join(g)];
          ++index.totals_[idx(v)][n - 1];
        }
      }
    }
    for (const auto& [w, c] : bag_of(sent)) index.postings_[w].emplace_back(s, c);
  }
  const double n_sent = static_cast<double>(corpus.sentences.size());
  index.mean_length_[0] = len_sum / n_sent;
  index.mean_length_[1] = len_sum / n_sent + 2.0;
  index.by_length_.resize(corpus.sentences.size());
  for (std::size_t i = 0; i < index.by_length_.size(); ++i) index.by_length_[i] = i;
  std::stable_sort(index.by_length_.begin(), index.by_length_.end(),
                   [&](std::size_t a, std::size_t b) { return index.lengths_[a] < index.lengths_[b]; });
  return index;
}

std::uint64_t NGramIndex::count(NGramVariant v, const std::vector<std::string>& ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<std::size_t>(kMaxOrder)) return 0;
  const auto& m = maps_[idx(v)][ngram.size() - 1];
  const auto it = m.find(join(ngram));
  return it == m.end() ? 0 : it->second;
}

std::vector<NGramIndex::Hit> NGramIndex::retrieve(const Tokens& sentence, std::size_t k, std::size_t exclude) const {
  if (lengths_.empty()) throw ArgumentError("retrieval over an empty training corpus");
  std::unordered_map<std::size_t, std::uint64_t> overlap;
  for (const auto& [w, c] : bag_of(sentence)) {
    const auto it = postings_.find(w);
    if (it == postings_.end()) continue;
    for (const auto& [s, tc] : it->second) overlap[s] += std::min<std::uint64_t>(c, tc);
  }
  std::vector<Hit> hits;
  hits.reserve(overlap.size());
  const double len = static_cast<double>(sentence.size());
  for (const auto& [s, m] : overlap) {
    if (s == exclude) continue;
    const double p = static_cast<double>(m) / len;
    const double r = static_cast<double>(m) / static_cast<double>(lengths_[s]);
    hits.push_back({s, harmonic(p, r)});
  }
  auto better = [&](const Hit& a, const Hit& b) {
    if (a.f1 != b.f1) return a.f1 > b.f1;
    if (lengths_[a.sentence] != lengths_[b.sentence]) return lengths_[a.sentence] < lengths_[b.sentence];
    return a.sentence < b.sentence;
  };
  std::sort(hits.begin(), hits.end(), better);
  if (hits.size() > k) hits.resize(k);
  // Pad with zero-overlap sentences in tie order.
  for (std::size_t i = 0; hits.size() < k && i < by_length_.size(); ++i) {
    const std::size_t s = by_length_[i];
    if (s == exclude || overlap.count(s)) continue;
    hits.push_back({s, 0.0});
  }
  return hits;
}

FeatureVector overlap_block(const NGramIndex& index, const Tokens& sentence) {
  FeatureVector fv;
  for (NGramVariant v : {NGramVariant::kPlain, NGramVariant::kBoundary}) {
    const std::string suffix = v == NGramVariant::kBoundary ? "_bnd" : "";
    std::vector<double> clipped_prec;
    for (int n = 1; n <= NGramIndex::kMaxOrder; ++n) {
      const auto grams = NGramIndex::ngrams(sentence, n, v);
      const auto& table = index.table(v, n);
      const double n_total = static_cast<double>(index.total(v, n));
      std::map<std::string, std::uint64_t> sent_counts;
      for (const auto& g : grams) ++sent_counts[NGramIndex::join(g)];

      std::uint64_t matched_tokens = 0, clipped = 0;
      std::size_t matched_types = 0;
      double w_matched = 0, w_unmatched = 0;
      for (const auto& [key, c] : sent_counts) {
        const auto it = table.find(key);
        if (it != table.end()) {
          matched_tokens += c;
          clipped += std::min(c, it->second);
          ++matched_types;
          w_matched += static_cast<double>(it->second) / n_total;
        } else {
          w_unmatched += 1.0 / n_total;
        }
      }
      const double prec = safe_div(static_cast<double>(matched_tokens), static_cast<double>(grams.size()));
      const double rec = safe_div(static_cast<double>(matched_types), static_cast<double>(table.size()));
      const double wprec = safe_div(w_matched, w_matched + w_unmatched);
      const double wrec = w_matched;
      clipped_prec.push_back(n == 1 ? safe_div(static_cast<double>(clipped), static_cast<double>(grams.size()))
                                    : (static_cast<double>(clipped) + 1.0) / (static_cast<double>(grams.size()) + 1.0));

      const double c_len = static_cast<double>(sentence.size() + (v == NGramVariant::kBoundary ? 2 : 0));
      const double r_len = index.mean_length(v);
      const double bp = c_len >= r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
      double bleu = 0;
      if (clipped_prec.front() > 0) {
        double log_sum = 0;
        for (double p : clipped_prec) log_sum += std::log(p);
        bleu = bp * std::exp(log_sum / static_cast<double>(n));
      }

      const std::string base = std::to_string(n) + "gram_";
      fv.add(base + "prec" + suffix, prec);
      fv.add(base + "rec" + suffix, rec);
      fv.add(base + "F1" + suffix, harmonic(prec, rec));
      fv.add(base + "GM" + suffix, std::sqrt(prec * rec));
      fv.add(base + "wF1" + suffix, harmonic(wprec, wrec));
      fv.add(base + "wrec" + suffix, wrec);
      fv.add(base + "BLEU" + suffix, bleu);
    }
  }
  std::size_t oov = 0;
  for (const auto& w : sentence) {
    if (index.count(NGramVariant::kPlain, {w}) == 0) ++oov;
  }
  fv.add("lensS", static_cast<double>(sentence.size()));
  fv.add("oov_count", static_cast<double>(oov));
  fv.add("oov_rate", safe_div(static_cast<double>(oov), static_cast<double>(sentence.size())));
  return fv;
}

std::vector<Ibm1Table::Pair> ibm1_training_pairs(const Corpus& corpus, const NGramIndex& index) {
  std::vector<Ibm1Table::Pair> pairs;
  pairs.reserve(corpus.size() * 2);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Tokens& s = corpus.sentences[i];
    pairs.emplace_back(s, s);
    if (corpus.size() > 1) {
      const auto hits = index.retrieve(s, 1, i);
      if (!hits.empty()) pairs.emplace_back(corpus.sentences[hits.front().sentence], s);
    }
  }
  return pairs;
}

FeatureVector translation_block(const Ibm1Table& table, const NGramIndex& index, const Corpus& corpus,
                                const Tokens& sentence) {
  if (corpus.sentences.empty()) throw ArgumentError("translation features need a non-empty training corpus");
  if (index.sentence_count() != corpus.size()) throw DataError("translation features: index/corpus size mismatch");
  constexpr std::size_t kTop = 3;
  const auto hits = index.retrieve(sentence, kTop);
  if (hits.empty()) throw DataError("translation features: empty retrieval set");
  const double len = static_cast<double>(sentence.size());
  FeatureVector fv;
  double best = -HUGE_VAL, best_joint = -HUGE_VAL, f1_sum = 0;
  for (std::size_t k = 1; k <= kTop; ++k) {
    if (k <= hits.size()) {
      const auto& h = hits[k - 1];
      const double lp = table.log_prob(corpus.sentences[h.sentence], sentence);
      best = std::max(best, lp);
      best_joint = std::max(best_joint, lp + std::log(std::max(h.f1, kRetrievalFloor)));
      f1_sum += h.f1;
    }
    const std::string ks = std::to_string(k);
    fv.add("max_logp" + ks, best);
    fv.add("max_logpj" + ks, best_joint);
    fv.add("max_logp" + ks + "_bpw", -best / (len * kLn2));
    fv.add("max_logpj" + ks + "_bpw", -best_joint / (len * kLn2));
    fv.add("retr_F1_" + ks, f1_sum / static_cast<double>(std::min(k, hits.size())));
  }
  return fv;
}

TextModels TextModels::build(const Corpus& corpus, const std::vector<Tokens>& lm_corpus, int ibm1_iterations) {
  TextModels m;
  m.corpus = corpus;
  m.index = NGramIndex::build(corpus);
  m.lms = LmSet::train(lm_corpus.empty() ? corpus.sentences : lm_corpus);
  m.ibm1 = Ibm1Table::train(ibm1_training_pairs(corpus, m.index), ibm1_iterations);
  return m;
}

FeatureVector text_vector(const Tokens& sentence, const TextModels& models) {
  FeatureVector fv = overlap_block(models.index, sentence);
  fv.append(lm_feature_block(models.lms, sentence));
  fv.append(translation_block(models.ibm1, models.index, models.corpus, sentence));
  return fv;
}

}  // namespace ppp
