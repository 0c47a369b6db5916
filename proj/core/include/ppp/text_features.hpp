#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppp/feature_vector.hpp"
#include "ppp/ngram_lm.hpp"
#include "ppp/treebank.hpp"

namespace ppp {

// N-gram variants: plain, and boundary-padded ("bnd") with one start and one
// end symbol around the sentence.
enum class NGramVariant { kPlain = 0, kBoundary = 1 };

// Training-set n-gram frequencies for orders 1..3 in both variants, plus
// unigram postings used for nearest-sentence retrieval.
class NGramIndex {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr std::string_view kStart = "<s>";
  static constexpr std::string_view kEnd = "</s>";

  // Throws ArgumentError on an empty corpus. The result does not depend on
  // sentence order except for retrieval tie-breaking.
  static NGramIndex build(const Corpus& corpus);

  std::uint64_t count(NGramVariant v, const std::vector<std::string>& ngram) const;
  std::uint64_t total(NGramVariant v, int order) const { return totals_[idx(v)][order - 1]; }
  std::size_t types(NGramVariant v, int order) const { return maps_[idx(v)][order - 1].size(); }
  const std::unordered_map<std::string, std::uint64_t>& table(NGramVariant v, int order) const {
    return maps_[idx(v)][order - 1];
  }
  double mean_length(NGramVariant v) const { return mean_length_[idx(v)]; }
  std::size_t sentence_count() const noexcept { return lengths_.size(); }

  struct Hit {
    std::size_t sentence = 0;
    double f1 = 0;
  };
  // The k training sentences with the highest unigram F1 against `sentence`;
  // ties go to the shorter training sentence, then to the earlier one.
  // `exclude` drops one training index (used for leave-one-out neighbors).
  std::vector<Hit> retrieve(const Tokens& sentence, std::size_t k, std::size_t exclude = SIZE_MAX) const;

  static std::string join(const std::vector<std::string>& ngram);
  static std::vector<std::vector<std::string>> ngrams(const Tokens& sentence, int order, NGramVariant v);

 private:
  static std::size_t idx(NGramVariant v) { return static_cast<std::size_t>(v); }

  std::array<std::array<std::unordered_map<std::string, std::uint64_t>, kMaxOrder>, 2> maps_;
  std::array<std::array<std::uint64_t, kMaxOrder>, 2> totals_{};
  std::array<double, 2> mean_length_{};
  std::vector<std::size_t> lengths_;
  // word -> (sentence, count) in sentence order
  std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::uint32_t>>> postings_;
  // sentence indices ordered by (length, index), used to pad retrieval
  std::vector<std::size_t> by_length_;
};

// Per order 1..3 and variant: prec, rec, F1, GM, wF1, wrec, BLEU; then
// lensS, oov_count and oov_rate. 45 features.
FeatureVector overlap_block(const NGramIndex& index, const Tokens& sentence);

// IBM Model 1 lexical translation table t(target | source) with a null
// source word.
class Ibm1Table {
 public:
  static constexpr std::string_view kNull = "<null>";
  // Floor on the per-word generation probability when scoring.
  static constexpr double kFloor = 1e-10;

  using Pair = std::pair<Tokens, Tokens>;  // (source, target)

  // EM from uniform initialisation. Throws ArgumentError on empty input or
  // iterations < 1.
  static Ibm1Table train(const std::vector<Pair>& pairs, int iterations);

  // Zero for pairs never seen together.
  double t(std::string_view target, std::string_view source) const;
  // log p(target | source) = sum_j log( (1/(l+1)) sum_i t(f_j | e_i) ),
  // with e_0 the null word.
  double log_prob(const Tokens& source, const Tokens& target) const;

  // Sum over targets of t(. | source); 1 for any trained source.
  double source_mass(std::string_view source) const;
  std::vector<std::string> sources() const;
  int iterations() const noexcept { return iterations_; }

 private:
  using Id = std::uint32_t;
  static std::uint64_t key(Id source, Id target) { return (std::uint64_t{source} << 32) | target; }

  std::unordered_map<std::string, Id> source_ids_;
  std::unordered_map<std::string, Id> target_ids_;
  std::vector<std::string> source_words_;
  std::unordered_map<std::uint64_t, double> table_;
  int iterations_ = 0;
};

// Each training sentence paired with itself, and with its nearest other
// training sentence (by unigram F1) as the source.
std::vector<Ibm1Table::Pair> ibm1_training_pairs(const Corpus& corpus, const NGramIndex& index);

// Retrieval-and-translation features for k in {1,2,3}: max_logp<k>,
// max_logpj<k>, their _bpw variants and retr_F1_<k>. 15 features.
FeatureVector translation_block(const Ibm1Table& table, const NGramIndex& index, const Corpus& corpus,
                                const Tokens& sentence);

// Everything the Text family needs, built once from the training corpus.
struct TextModels {
  Corpus corpus;
  NGramIndex index;
  LmSet lms;
  Ibm1Table ibm1;

  static constexpr int kIbm1Iterations = 5;

  // `lm_corpus` defaults to `corpus` when empty.
  static TextModels build(const Corpus& corpus, const std::vector<Tokens>& lm_corpus = {},
                          int ibm1_iterations = kIbm1Iterations);
};

// overlap_block + lm_feature_block + translation_block.
FeatureVector text_vector(const Tokens& sentence, const TextModels& models);

// Number of Text-family features emitted by text_vector.
constexpr std::size_t kTextFeatureCount = 45 + 30 + 15;

}  // namespace ppp
