#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppp/feature_vector.hpp"
#include "ppp/tree.hpp"

namespace ppp {

enum class Direction { kForward, kBackward };

std::string_view to_string(Direction d) noexcept;

struct LMScores {
  double logp = 0;  // natural log
  double ppl = 0;   // exp(-logp / n_tokens)
  double bpw = 0;   // -logp / (n_tokens ln 2)
  std::size_t n_tokens = 0;  // predicted tokens, including the end symbol
};

struct LmOptions {
  // Fixed discount for every order. When unset, each order estimates
  // D = n1 / (n1 + 2 n2), clamped to [kMinDiscount, kMaxDiscount].
  std::optional<double> discount;
};

// Interpolated absolute-discounting n-gram model. Sentences are padded with
// order-1 start symbols and one end symbol; backward models see reversed
// sentences. Out-of-vocabulary tokens map to a reserved unknown type that
// receives the discounted mass of the unigram level.
class NGramLM {
 public:
  static constexpr int kMaxOrder = 5;
  static constexpr double kMinDiscount = 0.05;
  static constexpr double kMaxDiscount = 0.95;
  static constexpr std::string_view kUnknown = "<unk>";
  static constexpr std::string_view kStart = "<s>";
  static constexpr std::string_view kEnd = "</s>";

  // Throws ArgumentError for an empty corpus or order outside 1..5.
  static NGramLM train(const std::vector<Tokens>& sentences, int order, Direction direction,
                       const LmOptions& options = {});

  int order() const noexcept { return order_; }
  Direction direction() const noexcept { return direction_; }
  const std::vector<double>& discounts() const noexcept { return discounts_; }

  // Symbols that can be predicted: every training type, the end symbol and
  // the unknown symbol.
  std::vector<std::string> predictable_vocabulary() const;
  std::size_t vocab_size() const noexcept { return words_.size() - 1; }

  // p(word | history) with the history given in model reading order (most
  // recent symbol last). Histories longer than order-1 are truncated.
  double prob(std::span<const std::string> history, std::string_view word) const;

  // Throws ArgumentError on an empty sentence.
  LMScores score(const Tokens& sentence) const;

  void save(std::ostream& out) const;
  static NGramLM load(std::istream& in);

 private:
  using Id = std::uint32_t;
  struct Context {
    std::uint64_t total = 0;
    std::unordered_map<Id, std::uint64_t> counts;
  };

  NGramLM() = default;
  Id id_of(std::string_view word) const;
  Id intern(const std::string& word);
  double prob_ids(const Id* history, std::size_t history_len, Id word) const;
  void add_count(std::size_t n, const Id* history, Id word, std::uint64_t count);
  void finalize(const LmOptions& options);

  static std::string key(const Id* ids, std::size_t len);

  int order_ = 1;
  Direction direction_ = Direction::kForward;
  std::vector<double> discounts_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, Id> ids_;
  // tables_[n-1] maps an (n-1)-symbol history to its continuation counts.
  std::vector<std::unordered_map<std::string, Context>> tables_;
  std::uint64_t unigram_types_ = 0;
};

LMScores make_scores(double logp, std::size_t n_tokens);

// Forward and backward models of orders 1..5 over the same corpus.
struct LmSet {
  std::vector<NGramLM> forward;
  std::vector<NGramLM> backward;

  static LmSet train(const std::vector<Tokens>& sentences, const LmOptions& options = {});
};

// {logp, ppl, bpw} x orders 1..5 x {forward, backward}: 30 features named
// "<k>gram_<stat>" and "b<k>gram_<stat>".
FeatureVector lm_feature_block(const LmSet& lms, const Tokens& sentence);

}  // namespace ppp
