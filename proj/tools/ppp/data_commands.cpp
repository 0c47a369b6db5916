#include <json.hpp>

#include "cli.hpp"
#include "common.hpp"
#include "ppp/errors.hpp"
#include "ppp/extraction.hpp"
#include "ppp/rng.hpp"
#include "ppp/tree_features.hpp"

namespace ppp::cli {

namespace fs = std::filesystem;

namespace {

std::string tree_file(const std::vector<Tree>& trees) {
  std::string s;
  for (const auto& t : trees) s += serialize(t) + "\n";
  return s;
}

std::string text_file(const std::vector<Tree>& trees) {
  std::string s;
  for (const auto& t : trees) {
    const Tokens toks = t.yield();
    for (std::size_t i = 0; i < toks.size(); ++i) s += (i ? " " : "") + toks[i];
    s += "\n";
  }
  return s;
}

BranchingMeasure parse_measure(const std::string& text) {
  if (text == "leaves") return BranchingMeasure::kLeaves;
  if (text == "internal") return BranchingMeasure::kInternalNodes;
  throw ArgumentError("unknown branching_measure '" + text + "' (expected leaves or internal)");
}

// Reads the inputs of one set; proxy parses only when links are used.
SetInput load_set(const Config& config, const std::string& id, bool need_proxy) {
  const std::string prefix = "set." + id + ".";
  SetInput s;
  s.id = id;
  s.text = read_corpus(config.path(prefix + "text"));
  s.text.source_id = id;
  if (auto gold = config.optional_path(prefix + "gold")) s.gold = read_trees(*gold);
  for (const auto& p : config.list(prefix + "parsers")) s.systems[p] = read_trees(config.path(prefix + "parser." + p));
  if (need_proxy) s.proxy = read_trees(config.path(prefix + "proxy"));
  return s;
}

}  // namespace

void cmd_synth(Config& config, std::ostream& out) {
  const std::uint64_t seed = config.seed("seed", 1);
  SynthOptions base;
  base.vocab_size = static_cast<std::size_t>(config.integer("vocab_size", static_cast<long>(base.vocab_size)));
  base.max_len = static_cast<std::size_t>(config.integer("max_len", static_cast<long>(base.max_len)));
  base.min_len = static_cast<std::size_t>(config.integer("min_len", static_cast<long>(base.min_len)));
  base.noise = config.number("noise", base.noise);
  base.noise_b = config.number("noise_b", base.noise_b);
  const struct {
    const char* id;
    long size;
  } parts[] = {{"corpus", config.integer("corpus_size", 5000)},
               {"train", config.integer("train_size", 2000)},
               {"test", config.integer("test_size", 500)}};
  for (const auto& p : parts) {
    if (p.size < 1) throw ArgumentError(std::string(p.id) + "_size must be >= 1");
  }
  const fs::path dir = config.output_path("out_dir", "synth");
  const std::string prov = provenance("synth", config.hash());

  std::vector<std::pair<fs::path, std::string>> files;
  std::uint64_t tag = 1;
  for (const auto& p : parts) {
    SynthOptions o = base;
    o.seed = Rng::derive(seed, tag++).next();
    o.n_sentences = static_cast<std::size_t>(p.size);
    const ParallelParseSet set = synth_treebank(o);
    const std::string id = p.id;
    files.emplace_back(dir / (id + ".txt"), text_file(*set.gold));
    if (id == "corpus") {
      // The lighter-noise parser stands in for the unsupervised proxy parser.
      files.emplace_back(dir / "corpus.proxy.mrg", tree_file(set.systems.at("noisy_b")));
      continue;
    }
    files.emplace_back(dir / (id + ".gold.mrg"), tree_file(*set.gold));
    for (const auto& [name, trees] : set.systems) files.emplace_back(dir / (id + "." + name + ".mrg"), tree_file(trees));
  }

  std::string conf = "# " + prov + "\n";
  conf += "seed = " + std::to_string(seed) + "\n";
  conf += "corpus = corpus.txt\n";
  conf += "proxy_training = corpus.proxy.mrg\n";
  conf += "sets = train,test\n";
  conf += "branching_set = train\n";
  for (const char* id : {"train", "test"}) {
    const std::string s = id;
    conf += "set." + s + ".text = " + s + ".txt\n";
    conf += "set." + s + ".gold = " + s + ".gold.mrg\n";
    conf += "set." + s + ".proxy = " + s + ".noisy_b.mrg\n";
    conf += "set." + s + ".parsers = noisy,noisy_b,right\n";
    for (const char* p : {"noisy", "noisy_b", "right"}) {
      conf += "set." + s + ".parser." + p + " = " + s + "." + p + ".mrg\n";
    }
  }
  conf += "setting = +CF1\n";
  conf += "casing = cased\n";
  conf += "out_dir = features\n";
  files.emplace_back(dir / "ppp.conf", conf);

  for (const auto& [path, content] : files) write_output(path, content);
  out << "wrote " << files.size() << " files to " << dir.string() << "\n";
}

void cmd_extract(Config& config, std::ostream& out) {
  config.ignore_in_hash("workers");
  ExtractionConfig cfg;
  cfg.setting = parse_setting(config.get("setting", "+CF1"));
  cfg.casing = parse_casing(config.get("casing", "cased"));
  cfg.scoring = scoring_options(config);
  cfg.branching_k = static_cast<std::size_t>(config.integer("branching_k", static_cast<long>(cfg.branching_k)));
  cfg.branching_measure = parse_measure(config.get("branching_measure", "leaves"));
  cfg.empty_link_ppl = config.number("empty_link_ppl", cfg.empty_link_ppl);
  cfg.ibm1_iterations = static_cast<int>(config.integer("ibm1_iterations", cfg.ibm1_iterations));
  cfg.workers = static_cast<unsigned>(config.integer("workers", 0));
  const bool with_link = includes(cfg.setting, Setting::kLink);
  const bool with_treef = includes(cfg.setting, Setting::kTreeF);

  const Corpus corpus = read_corpus(config.path("corpus"));
  std::vector<Tokens> lm_corpus;
  if (auto p = config.optional_path("lm_corpus")) lm_corpus = read_corpus(*p).sentences;
  std::vector<Tree> proxy_training;
  if (with_link) proxy_training = read_trees(config.path("proxy_training"));

  const auto set_ids = config.list("sets");
  if (set_ids.empty()) throw ArgumentError("config key 'sets' lists no sets");
  std::vector<SetInput> sets;
  for (const auto& id : set_ids) sets.push_back(load_set(config, id, with_link));

  SetInput branching_source;
  if (with_treef) {
    const std::string id = config.get("branching_set", set_ids.front());
    const auto it = std::find_if(sets.begin(), sets.end(), [&](const SetInput& s) { return s.id == id; });
    if (it == sets.end()) throw ArgumentError("branching_set '" + id + "' is not one of the listed sets");
    branching_source = *it;
  }
  const std::string seed = config.get("seed", "");
  const fs::path dir = config.output_path("out_dir", "features");
  const std::string prov = provenance("extract", config.hash());

  const FeatureModels models = FeatureModels::build(corpus, lm_corpus, proxy_training, branching_source, cfg);

  nlohmann::ordered_json meta;
  meta["produced_by"] = prov;
  meta["setting"] = std::string(to_string(cfg.setting));
  meta["casing"] = std::string(to_string(cfg.casing));
  meta["labeled"] = cfg.scoring.labeled;
  meta["seed"] = seed.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(seed);
  meta["branching_k"] = cfg.branching_k;
  meta["branching_measure"] = config.get("branching_measure", "leaves");
  meta["empty_link_ppl"] = cfg.empty_link_ppl;
  meta["parsers"] = nlohmann::ordered_json::object();
  meta["sets"] = nlohmann::ordered_json::object();

  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& set : sets) {
    FamilyDims dims;
    const auto tables = extract(set, models, cfg, &dims);
    std::size_t empty = 0;
    for (const auto& [parser, table] : tables) {
      TsvTable tsv = feature_tsv(table, prov);
      tsv.comments.push_back("setting: " + table.setting);
      tsv.comments.push_back("set: " + set.id);
      tsv.comments.push_back("parser: " + parser);
      files.emplace_back(dir / (set.id + "." + parser + ".tsv"), write_tsv(tsv));
      empty = static_cast<std::size_t>(std::count(table.empty_links.begin(), table.empty_links.end(), true));

      const std::size_t treef = table.names.size() - dims.text - dims.link - dims.cf1;
      nlohmann::ordered_json p;
      p["dim_initial"] = table.names.size();
      p["dims"] = {{"Text", dims.text}, {"Link", dims.link}, {"TreeF", treef}, {"CF1", dims.cf1}};
      p["features"] = table.names;
      if (!meta["parsers"].contains(parser)) {
        meta["parsers"][parser] = p;
      } else if (meta["parsers"][parser] != p) {
        throw DataError("parser '" + parser + "' has a different feature layout in set '" + set.id + "'");
      }
    }
    meta["sets"][set.id] = {{"sentences", set.text.size()},
                            {"gold", set.gold.has_value()},
                            {"empty_link_sentences", empty}};
  }
  files.emplace_back(dir / "extract.meta.json", meta.dump(1) + "\n");

  for (const auto& [path, content] : files) write_output(path, content);
  out << "setting " << to_string(cfg.setting) << ":";
  for (const auto& [parser, p] : meta["parsers"].items()) out << " " << parser << " #dimI=" << p["dim_initial"].get<std::size_t>();
  out << "\nwrote " << files.size() << " files to " << dir.string() << "\n";
}

void cmd_score(Config& config, std::ostream& out) {
  const Casing casing = parse_casing(config.get("casing", "cased"));
  const ScoringOptions opt = scoring_options(config);
  const auto gold = load_trees(config.path("gold"), casing);
  const auto test = load_trees(config.path("test"), casing);
  const auto out_path = config.has("out") ? std::optional(config.output_path("out")) : std::nullopt;
  if (gold.size() != test.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) + " trees, test has " + std::to_string(test.size()));
  }
  const std::string prov = provenance("score", config.hash());

  TsvTable t;
  t.comments.push_back(prov);
  t.header = {"sentence", "matched", "gold", "test", "P", "R", "F1"};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const F1Report r = bracket_f1(gold[i], test[i], opt);
    t.rows.push_back({std::to_string(i + 1), std::to_string(r.matched), std::to_string(r.gold_count),
                      std::to_string(r.test_count), format_number(r.precision), format_number(r.recall),
                      format_number(r.f1)});
  }
  const F1Report c = corpus_f1(gold, test, opt);
  t.comments.push_back("corpus: P=" + format_number(c.precision) + " R=" + format_number(c.recall) +
                       " F1=" + format_number(c.f1));
  if (out_path) write_output(*out_path, write_tsv(t));
  out << "sentences " << gold.size() << "  P " << fixed(c.precision, 4) << "  R " << fixed(c.recall, 4) << "  F1 "
      << fixed(c.f1, 4) << "\n";
}

void cmd_cf1(Config& config, std::ostream& out) {
  const Casing casing = parse_casing(config.get("casing", "cased"));
  const ScoringOptions opt = scoring_options(config);
  std::map<std::string, std::vector<Tree>> outputs;
  for (const auto& p : config.list("parsers")) outputs[p] = load_trees(config.path("parser." + p), casing);
  const fs::path out_path = config.output_path("out");
  const std::string prov = provenance("cf1", config.hash());

  const auto scores = cf1(outputs, opt);
  TsvTable t;
  t.comments.push_back(prov);
  t.header = {"sentence"};
  for (const auto& [name, v] : scores) t.header.push_back("CF1_" + name);
  const std::size_t n = scores.begin()->second.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i + 1)};
    for (const auto& [name, v] : scores) row.push_back(format_number(v[i]));
    t.rows.push_back(std::move(row));
  }
  write_output(out_path, write_tsv(t));
  std::vector<std::vector<std::string>> rows{{"parser", "mean CF1"}};
  for (const auto& [name, v] : scores) {
    double sum = 0;
    for (double x : v) sum += x;
    rows.push_back({name, fixed(sum / static_cast<double>(n), 4)});
  }
  out << align(rows);
}

void cmd_treestats(Config& config, std::ostream& out) {
  const Casing casing = parse_casing(config.get("casing", "cased"));
  const fs::path path = config.path("trees");
  const std::string name = config.get("name", path.stem().string());
  const auto trees = load_trees(path, casing);
  const auto out_path = config.has("out") ? std::optional(config.output_path("out")) : std::nullopt;
  if (trees.empty()) throw DataError(path.string() + " holds no trees");
  const std::string prov = provenance("treestats", config.hash());

  double mean[5] = {0, 0, 0, 0, 0};
  for (const auto& t : trees) {
    const TreeStats s = tree_stats(t);
    mean[0] += static_cast<double>(s.numB);
    mean[1] += static_cast<double>(s.depthB);
    mean[2] += s.avg_depthB;
    mean[3] += s.r_over_l;
    mean[4] += s.avg_r_over_l;
  }
  for (double& m : mean) m /= static_cast<double>(trees.size());

  TsvTable t;
  t.comments.push_back(prov);
  t.comments.push_back("trees: " + std::to_string(trees.size()));
  t.header = {"Corpus", "numB", "depthB", "avg_depthB", "R/L", "avg_R/L"};
  t.rows.push_back({name, format_number(mean[0]), format_number(mean[1]), format_number(mean[2]),
                    format_number(mean[3]), format_number(mean[4])});
  if (out_path) write_output(*out_path, write_tsv(t));
  out << align({{"Corpus", "numB", "depthB", "avg depthB", "R/L", "avg R/L"},
                {name, fixed(mean[0], 1), fixed(mean[1], 1), fixed(mean[2], 4), fixed(mean[3], 2), fixed(mean[4], 2)}});
}

}  // namespace ppp::cli
