#include "ppp/ngram_lm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ppp/errors.hpp"

namespace ppp {

namespace {

constexpr std::uint32_t kUnkId = 0;
constexpr std::uint32_t kStartId = 1;
constexpr std::uint32_t kEndId = 2;
constexpr double kLn2 = 0.69314718055994530942;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double sorted_sum(std::vector<double> terms) {
  // Summation order independent of sentence direction.
  std::sort(terms.begin(), terms.end());
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::kForward ? "forward" : "backward"; }

LMScores make_scores(double logp, std::size_t n_tokens) {
  LMScores s;
  s.logp = logp;
  s.n_tokens = n_tokens;
  const double per = -logp / static_cast<double>(n_tokens);
  s.ppl = std::exp(per);
  s.bpw = per / kLn2;
  return s;
}

std::string NGramLM::key(const Id* ids, std::size_t len) {
  return std::string(reinterpret_cast<const char*>(ids), len * sizeof(Id));
}

NGramLM::Id NGramLM::id_of(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end() || it->second == kStartId) return kUnkId;
  return it->second;
}

NGramLM::Id NGramLM::intern(const std::string& word) {
  if (word == kStart || word == kEnd || word == kUnknown) return kUnkId;
  const auto [it, inserted] = ids_.emplace(word, static_cast<Id>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

void NGramLM::add_count(std::size_t n, const Id* history, Id word, std::uint64_t count) {
  Context& ctx = tables_[n - 1][key(history, n - 1)];
  ctx.total += count;
  ctx.counts[word] += count;
}

NGramLM NGramLM::train(const std::vector<Tokens>& sentences, int order, Direction direction,
                       const LmOptions& options) {
  if (order < 1 || order > kMaxOrder) throw ArgumentError("n-gram order must lie in 1..5");
  if (sentences.empty()) throw ArgumentError("cannot train a language model on an empty corpus");
  if (options.discount && !(*options.discount >= 0.0 && *options.discount < 1.0)) {
    throw ArgumentError("discount must lie in [0,1)");
  }
  NGramLM lm;
  lm.order_ = order;
  lm.direction_ = direction;
  lm.words_ = {std::string(kUnknown), std::string(kStart), std::string(kEnd)};
  for (Id i = 0; i < 3; ++i) lm.ids_.emplace(lm.words_[i], i);
  lm.tables_.resize(order);

  std::vector<Id> seq;
  for (const Tokens& sentence : sentences) {
    seq.assign(order - 1, kStartId);
    if (direction == Direction::kForward) {
      for (const auto& w : sentence) seq.push_back(lm.intern(w));
    } else {
      for (auto it = sentence.rbegin(); it != sentence.rend(); ++it) seq.push_back(lm.intern(*it));
    }
    seq.push_back(kEndId);
    for (std::size_t i = order - 1; i < seq.size(); ++i) {
      for (int n = 1; n <= order; ++n) lm.add_count(n, seq.data() + i - (n - 1), seq[i], 1);
    }
  }
  lm.finalize(options);
  return lm;
}

void NGramLM::finalize(const LmOptions& options) {
  discounts_.assign(order_, 0.0);
  for (int n = 1; n <= order_; ++n) {
    if (options.discount) {
      discounts_[n - 1] = *options.discount;
      continue;
    }
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto& [k, ctx] : tables_[n - 1]) {
      for (const auto& [w, c] : ctx.counts) {
        if (c == 1) ++n1;
        if (c == 2) ++n2;
      }
    }
    // Without singletons or doubletons there is no evidence of unseen
    // events, so reserve as little mass as allowed.
    double d = (n1 + 2 * n2) > 0 ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2) : kMinDiscount;
    discounts_[n - 1] = std::clamp(d, kMinDiscount, kMaxDiscount);
  }
  const auto it = tables_[0].find(std::string{});
  unigram_types_ = it == tables_[0].end() ? 0 : it->second.counts.size();
}

double NGramLM::prob_ids(const Id* history, std::size_t history_len, Id word) const {
  const Context& uni = tables_[0].at(std::string{});
  const double n_total = static_cast<double>(uni.total);
  const double d1 = discounts_[0];
  double p = 0;
  if (const auto it = uni.counts.find(word); it != uni.counts.end()) {
    p = std::max(static_cast<double>(it->second) - d1, 0.0) / n_total;
  }
  if (word == kUnkId) p += d1 * static_cast<double>(unigram_types_) / n_total;

  const std::size_t top = std::min<std::size_t>(order_, history_len + 1);
  for (std::size_t n = 2; n <= top; ++n) {
    const auto it = tables_[n - 1].find(key(history + history_len - (n - 1), n - 1));
    if (it == tables_[n - 1].end()) continue;
    const Context& ctx = it->second;
    const double total = static_cast<double>(ctx.total);
    const double d = discounts_[n - 1];
    double c = 0;
    if (const auto w = ctx.counts.find(word); w != ctx.counts.end()) c = static_cast<double>(w->second);
    p = std::max(c - d, 0.0) / total + d * static_cast<double>(ctx.counts.size()) / total * p;
  }
  return p;
}

double NGramLM::prob(std::span<const std::string> history, std::string_view word) const {
  std::vector<Id> h;
  h.reserve(history.size());
  for (const auto& w : history) {
    h.push_back(w == kStart ? kStartId : id_of(w));
  }
  const Id target = word == kEnd ? kEndId : id_of(word);
  return prob_ids(h.data(), h.size(), target);
}

std::vector<std::string> NGramLM::predictable_vocabulary() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (i != kStartId) out.push_back(words_[i]);
  }
  return out;
}

LMScores NGramLM::score(const Tokens& sentence) const {
  if (sentence.empty()) throw ArgumentError("cannot score an empty sentence");
  std::vector<Id> seq(order_ - 1, kStartId);
  if (direction_ == Direction::kForward) {
    for (const auto& w : sentence) seq.push_back(id_of(w));
  } else {
    for (auto it = sentence.rbegin(); it != sentence.rend(); ++it) seq.push_back(id_of(*it));
  }
  seq.push_back(kEndId);
  std::vector<double> logs;
  logs.reserve(seq.size());
  for (std::size_t i = order_ - 1; i < seq.size(); ++i) {
    const double p = prob_ids(seq.data(), i, seq[i]);
    if (!(p > 0.0)) throw DataError("zero probability for an unknown token under a zero unigram discount");
    logs.push_back(std::log(p));
  }
  return make_scores(sorted_sum(std::move(logs)), seq.size() - (order_ - 1));
}

void NGramLM::save(std::ostream& out) const {
  out << "ppp-ngram-lm 1\n";
  out << "order " << order_ << '\n';
  out << "direction " << to_string(direction_) << '\n';
  out << "discounts";
  for (double d : discounts_) out << ' ' << format_double(d);
  out << '\n';
  out << "vocab " << words_.size() << '\n';
  for (const auto& w : words_) out << w << '\n';
  for (int n = 1; n <= order_; ++n) {
    std::vector<std::pair<std::vector<Id>, std::uint64_t>> rows;
    for (const auto& [k, ctx] : tables_[n - 1]) {
      std::vector<Id> hist(n - 1);
      std::copy_n(k.data(), k.size(), reinterpret_cast<char*>(hist.data()));
      for (const auto& [w, c] : ctx.counts) {
        auto ids = hist;
        ids.push_back(w);
        rows.emplace_back(std::move(ids), c);
      }
    }
    std::sort(rows.begin(), rows.end());
    out << "ngrams " << n << ' ' << rows.size() << '\n';
    for (const auto& [ids, c] : rows) {
      for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? " " : "") << ids[i];
      out << '\t' << c << '\n';
    }
  }
}

NGramLM NGramLM::load(std::istream& in) {
  auto expect = [&](std::string_view word) {
    std::string got;
    if (!(in >> got) || got != word) throw DataError("language model file: expected '" + std::string(word) + "'");
  };
  expect("ppp-ngram-lm");
  int version = 0;
  in >> version;
  if (version != 1) throw DataError("language model file: unsupported version");
  NGramLM lm;
  expect("order");
  in >> lm.order_;
  if (lm.order_ < 1 || lm.order_ > kMaxOrder) throw DataError("language model file: bad order");
  expect("direction");
  std::string dir;
  in >> dir;
  lm.direction_ = dir == "backward" ? Direction::kBackward : Direction::kForward;
  expect("discounts");
  lm.discounts_.resize(lm.order_);
  for (auto& d : lm.discounts_) {
    std::string s;
    in >> s;
    std::from_chars(s.data(), s.data() + s.size(), d);
  }
  expect("vocab");
  std::size_t v = 0;
  in >> v;
  lm.words_.resize(v);
  for (std::size_t i = 0; i < v; ++i) {
    in >> lm.words_[i];
    lm.ids_.emplace(lm.words_[i], static_cast<Id>(i));
  }
  lm.tables_.resize(lm.order_);
  for (int n = 1; n <= lm.order_; ++n) {
    expect("ngrams");
    int got_n = 0;
    std::size_t rows = 0;
    in >> got_n >> rows;
    if (got_n != n) throw DataError("language model file: n-gram sections out of order");
    std::vector<Id> ids(n);
    for (std::size_t r = 0; r < rows; ++r) {
      for (auto& id : ids) in >> id;
      std::uint64_t c = 0;
      in >> c;
      lm.add_count(n, ids.data(), ids.back(), c);
    }
  }
  if (!in) throw DataError("language model file: truncated");
  const auto it = lm.tables_[0].find(std::string{});
  if (it == lm.tables_[0].end()) throw DataError("language model file: no unigram counts");
  lm.unigram_types_ = it->second.counts.size();
  return lm;
}

LmSet LmSet::train(const std::vector<Tokens>& sentences, const LmOptions& options) {
  LmSet set;
  for (int k = 1; k <= NGramLM::kMaxOrder; ++k) {
    set.forward.push_back(NGramLM::train(sentences, k, Direction::kForward, options));
    set.backward.push_back(NGramLM::train(sentences, k, Direction::kBackward, options));
  }
  return set;
}

FeatureVector lm_feature_block(const LmSet& lms, const Tokens& sentence) {
  FeatureVector fv;
  auto emit = [&](const std::vector<NGramLM>& models, std::string_view prefix) {
    for (const NGramLM& lm : models) {
      const LMScores s = lm.score(sentence);
      const std::string base = std::string(prefix) + std::to_string(lm.order()) + "gram_";
      fv.add(base + "logp", s.logp);
      fv.add(base + "ppl", s.ppl);
      fv.add(base + "bpw", s.bpw);
    }
  };
  emit(lms.forward, "");
  emit(lms.backward, "b");
  return fv;
}

}  // namespace ppp
