#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppp/bracket_eval.hpp"
#include "ppp/link_features.hpp"
#include "ppp/regression.hpp"
#include "ppp/text_features.hpp"
#include "ppp/tree_features.hpp"
#include "ppp/treebank.hpp"
#include "ppp/tsv.hpp"

namespace ppp {

// Cumulative feature families: each setting includes all earlier ones.
enum class Setting { kText = 0, kLink = 1, kTreeF = 2, kCF1 = 3 };

std::string_view to_string(Setting s) noexcept;  // "Text", "+Link", "+TreeF", "+CF1"
Setting parse_setting(std::string_view text);
bool includes(Setting setting, Setting family) noexcept;

struct ExtractionConfig {
  Setting setting = Setting::kCF1;
  Casing casing = Casing::kCased;
  ScoringOptions scoring;
  std::size_t branching_k = 70;
  BranchingMeasure branching_measure = BranchingMeasure::kLeaves;
  double empty_link_ppl = kEmptyLinkPerplexity;
  int ibm1_iterations = TextModels::kIbm1Iterations;
  unsigned workers = 0;  // 0 = hardware concurrency
};

// One evaluation set: the raw sentences, optional gold trees, each parser's
// output and the proxy parses links are read from.
struct SetInput {
  std::string id;
  Corpus text;
  std::optional<std::vector<Tree>> gold;
  std::map<std::string, std::vector<Tree>> systems;
  std::vector<Tree> proxy;

  // Yield agreement across text, gold, systems and proxy parses; lengths.
  void validate(const ExtractionConfig& config) const;
};

SetInput lowercase(const SetInput& set);

// Everything estimated from training data.
struct FeatureModels {
  TextModels text;
  std::optional<LinkIndex> links;
  // Selected branching types per parser, from that parser's training output.
  std::map<std::string, std::vector<BranchingType>> branching;

  // `corpus` feeds the text models, `lm_corpus` (when non-empty) the
  // language models, `proxy_training` the link index, and
  // `branching_source` the branching-type selection.
  static FeatureModels build(const Corpus& corpus, const std::vector<Tokens>& lm_corpus,
                             const std::vector<Tree>& proxy_training, const SetInput& branching_source,
                             const ExtractionConfig& config);
};

struct FeatureTable {
  std::string set_id;
  std::string parser;
  std::string setting;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::optional<std::vector<double>> targets;  // bracketing F1 against gold
  std::vector<bool> empty_links;

  Dataset to_dataset() const;
};

// Per-family column counts of a setting, in order Text, Link, TreeF, CF1.
struct FamilyDims {
  std::size_t text = 0, link = 0, treef = 0, cf1 = 0;
  std::size_t total() const noexcept { return text + link + treef + cf1; }
};

// One table per parser. Text is lowercased first when the config asks for
// uncased processing (models must then be built from lowercased data too).
std::map<std::string, FeatureTable> extract(const SetInput& set, const FeatureModels& models,
                                            const ExtractionConfig& config, FamilyDims* dims = nullptr);

// Columns: "sentence", features..., and "target" when targets are known.
TsvTable feature_tsv(const FeatureTable& table, std::string_view provenance_line);
// Reads a feature TSV. Without a "target" column y is filled with NaN.
Dataset dataset_from_tsv(const TsvTable& table, std::string id);

}  // namespace ppp
