#include "ppp/extraction.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ppp/errors.hpp"

namespace ppp {

namespace {

// Runs fn(i) for i in [0, n) on a few threads. Each index writes only its own
// slot, so the result does not depend on scheduling. The first exception is
// rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
  unsigned w = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::size_t>(w, n));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void check_yields(const std::vector<Tree>& trees, const Corpus& text, const std::string& what) {
  if (trees.size() != text.size()) {
    throw DataError(what + ": " + std::to_string(trees.size()) + " trees for " + std::to_string(text.size()) +
                    " sentences");
  }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (trees[i].yield() != text.sentences[i]) {
      throw YieldMismatch(what + ": tree " + std::to_string(i + 1) + " does not span sentence " +
                          std::to_string(i + 1) + " of the text");
    }
  }
}

}  // namespace

std::string_view to_string(Setting s) noexcept {
  switch (s) {
    case Setting::kText: return "Text";
    case Setting::kLink: return "+Link";
    case Setting::kTreeF: return "+TreeF";
    case Setting::kCF1: return "+CF1";
  }
  return "Text";
}

Setting parse_setting(std::string_view text) {
  std::string t;
  for (char c : text) {
    if (c != '+') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (t == "text") return Setting::kText;
  if (t == "link") return Setting::kLink;
  if (t == "treef") return Setting::kTreeF;
  if (t == "cf1") return Setting::kCF1;
  throw ArgumentError("unknown setting '" + std::string(text) + "' (expected Text, +Link, +TreeF or +CF1)");
}

bool includes(Setting setting, Setting family) noexcept { return static_cast<int>(family) <= static_cast<int>(setting); }

void SetInput::validate(const ExtractionConfig& config) const {
  if (text.size() == 0) throw DataError("set '" + id + "' has no sentences");
  if (gold) check_yields(*gold, text, "set '" + id + "' gold");
  for (const auto& [name, trees] : systems) check_yields(trees, text, "set '" + id + "' parser '" + name + "'");
  if (includes(config.setting, Setting::kLink)) check_yields(proxy, text, "set '" + id + "' proxy parses");
  if (includes(config.setting, Setting::kCF1) && systems.size() < 2) {
    throw ArgumentError("+CF1 needs at least 2 parsers, set '" + id + "' has " + std::to_string(systems.size()));
  }
}

SetInput lowercase(const SetInput& set) {
  SetInput out;
  out.id = set.id;
  out.text = lowercase(set.text);
  if (set.gold) out.gold = lowercase(*set.gold);
  for (const auto& [name, trees] : set.systems) out.systems[name] = lowercase(trees);
  out.proxy = lowercase(set.proxy);
  return out;
}

FeatureModels FeatureModels::build(const Corpus& corpus, const std::vector<Tokens>& lm_corpus,
                                   const std::vector<Tree>& proxy_training, const SetInput& branching_source,
                                   const ExtractionConfig& config) {
  const bool lower = config.casing == Casing::kLowercased;
  FeatureModels m;
  std::vector<Tokens> lm = lm_corpus;
  if (lower) {
    for (auto& s : lm) s = lowercase(s);
  }
  m.text = TextModels::build(lower ? lowercase(corpus) : corpus, lm, config.ibm1_iterations);
  if (includes(config.setting, Setting::kLink)) {
    if (proxy_training.empty()) throw ArgumentError("+Link needs proxy parses of the training corpus");
    m.links = LinkIndex::build(lower ? lowercase(proxy_training) : proxy_training);
  }
  if (includes(config.setting, Setting::kTreeF)) {
    if (branching_source.systems.empty()) throw ArgumentError("+TreeF needs parser outputs on the training set");
    for (const auto& [name, trees] : branching_source.systems) {
      std::vector<BranchingBag> bags;
      bags.reserve(trees.size());
      for (const auto& t : trees) bags.push_back(branching_bag(t, config.branching_measure));
      m.branching[name] = select_branching_features(bags, config.branching_k);
    }
  }
  return m;
}

Dataset FeatureTable::to_dataset() const {
  Dataset d;
  d.id = set_id + ":" + parser;
  d.names = names;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  d.y = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(rows.size()), std::nan(""));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    if (targets) d.y(static_cast<Eigen::Index>(i)) = (*targets)[i];
  }
  return d;
}

std::map<std::string, FeatureTable> extract(const SetInput& input, const FeatureModels& models,
                                            const ExtractionConfig& config, FamilyDims* dims) {
  const SetInput set = config.casing == Casing::kLowercased ? lowercase(input) : input;
  set.validate(config);
  if (set.systems.empty()) throw ArgumentError("set '" + set.id + "' has no parser outputs");
  const std::size_t n = set.text.size();
  const bool with_link = includes(config.setting, Setting::kLink);
  const bool with_treef = includes(config.setting, Setting::kTreeF);
  const bool with_cf1 = includes(config.setting, Setting::kCF1);
  if (with_link && !models.links) throw ArgumentError("+Link extraction needs a link index");

  // Parser-independent blocks first.
  std::vector<FeatureVector> text(n), link(n);
  std::vector<char> empty(n, 0);
  parallel_for(n, config.workers, [&](std::size_t i) {
    text[i] = text_vector(set.text.sentences[i], models.text);
    if (with_link) {
      LinkFeatures lf = link_vector(*models.links, set.proxy[i], config.empty_link_ppl);
      link[i] = std::move(lf.features);
      empty[i] = lf.empty_links;
    }
  });

  std::map<std::string, std::vector<double>> comparative;
  if (with_cf1) comparative = cf1(set.systems, config.scoring);

  std::map<std::string, FeatureTable> out;
  FamilyDims fam;
  for (const auto& [parser, trees] : set.systems) {
    FeatureTable t;
    t.set_id = set.id;
    t.parser = parser;
    t.setting = std::string(to_string(config.setting));
    t.rows.resize(n);
    t.empty_links.assign(empty.begin(), empty.end());
    const std::vector<BranchingType>* selected = nullptr;
    if (with_treef) {
      const auto it = models.branching.find(parser);
      if (it == models.branching.end()) {
        throw ArgumentError("no branching types were selected for parser '" + parser + "'");
      }
      selected = &it->second;
    }
    std::vector<FeatureVector> treef(with_treef ? n : 0);
    if (with_treef) {
      parallel_for(n, config.workers,
                   [&](std::size_t i) { treef[i] = treef_vector(trees[i], *selected, config.branching_measure); });
    }
    if (set.gold) {
      t.targets.emplace(n);
      parallel_for(n, config.workers,
                   [&](std::size_t i) { (*t.targets)[i] = bracket_f1((*set.gold)[i], trees[i], config.scoring).f1; });
    }
    for (std::size_t i = 0; i < n; ++i) {
      FeatureVector fv = text[i];
      if (with_link) fv.append(link[i]);
      if (with_treef) fv.append(treef[i]);
      if (with_cf1) fv.add("CF1", comparative.at(parser)[i]);
      if (i == 0) {
        t.names = fv.names;
        fam.text = text[0].size();
        fam.link = with_link ? link[0].size() : 0;
        fam.treef = with_treef ? treef[0].size() : 0;
        fam.cf1 = with_cf1 ? 1 : 0;
      } else if (fv.names != t.names) {
        throw DataError("feature layout differs between sentences of set '" + set.id + "'");
      }
      t.rows[i] = std::move(fv.values);
    }
    out.emplace(parser, std::move(t));
  }
  if (dims) *dims = fam;
  return out;
}

TsvTable feature_tsv(const FeatureTable& table, std::string_view provenance_line) {
  TsvTable t;
  t.comments.emplace_back(provenance_line);
  t.header.push_back("sentence");
  t.header.insert(t.header.end(), table.names.begin(), table.names.end());
  if (table.targets) t.header.push_back("target");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<std::string> row;
    row.reserve(t.header.size());
    row.push_back(std::to_string(i + 1));
    for (double v : table.rows[i]) row.push_back(format_number(v));
    if (table.targets) row.push_back(format_number((*table.targets)[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Dataset dataset_from_tsv(const TsvTable& table, std::string id) {
  const long target_col = table.column("target");
  const long sentence_col = table.column("sentence");
  std::vector<std::size_t> feature_cols;
  Dataset d;
  d.id = std::move(id);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (static_cast<long>(j) == target_col || static_cast<long>(j) == sentence_col) continue;
    feature_cols.push_back(j);
    d.names.push_back(table.header[j]);
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  d.X.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  d.y = Eigen::VectorXd::Constant(n, std::nan(""));
  // Data lines follow the comments and the header.
  const std::size_t first_line = table.comments.size() + 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::size_t line = first_line + static_cast<std::size_t>(i);
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      d.X(i, static_cast<Eigen::Index>(k)) = parse_number(row[feature_cols[k]], line, feature_cols[k] + 1);
    }
    if (target_col >= 0) {
      d.y(i) = parse_number(row[static_cast<std::size_t>(target_col)], line, static_cast<std::size_t>(target_col) + 1);
    }
  }
  return d;
}

}  // namespace ppp
