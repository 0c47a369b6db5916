#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "common.hpp"
#include "config.hpp"
#include "ppp/errors.hpp"
#include "ppp/tree_features.hpp"
#include "ppp/treebank.hpp"
#include "ppp/tsv.hpp"

using namespace ppp;
using namespace ppp::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// A fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ppp-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string str(const fs::path& p) { return p.string(); }

const char* kTrees = "(S (NP (D the) (N dog)) (VP (V saw) (NP (D a) (N cat))))\n"
                     "(S (NP (N it)) (VP (V rained)))\n"
                     "(S (A x) (B (C y) (D z)))\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("argument errors and help") {
    Result r = call({});
    CHECK(r.code == kArgument);
    CHECK(r.err.rfind("error: argument: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    CHECK(call({"frobnicate"}).code == kArgument);
    CHECK(call({"--help"}).code == kOk);
    CHECK(call({"score", "--help"}).code == kOk);

    r = call({"score"});
    CHECK(r.code == kArgument);
    CHECK(r.err.find("missing config key 'gold'") != std::string::npos);

    r = call({"score", "--set", "novalue"});
    CHECK(r.code == kArgument);
    r = call({"plan", "--n", "1346", "--mu", "0.7", "--s", "0.16", "--alpha", "2", "--mad", "0.1"});
    CHECK(r.code == kArgument);
  }

  TEST_CASE("error classes map to exit codes") {
    const fs::path dir = scratch("codes");
    write_file(dir / "gold.mrg", kTrees);
    write_file(dir / "broken.mrg", "(S (A x) (B y)\n");
    write_file(dir / "other.mrg", "(S (A x) (B y))\n(S (A x) (B y))\n(S (A x) (B y))\n");

    Result r = call({"score", "--gold", str(dir / "missing.mrg"), "--test", str(dir / "gold.mrg")});
    CHECK(r.code == kIo);
    CHECK(r.err.rfind("error: io: ", 0) == 0);

    r = call({"score", "--gold", str(dir / "gold.mrg"), "--test", str(dir / "broken.mrg")});
    CHECK(r.code == kParse);
    CHECK(r.err.rfind("error: parse: ", 0) == 0);

    r = call({"score", "--gold", str(dir / "gold.mrg"), "--test", str(dir / "other.mrg")});
    CHECK(r.code == kYieldMismatch);
    CHECK(r.err.rfind("error: yield-mismatch: ", 0) == 0);

    write_file(dir / "flat.tsv", "x\ttarget\n0.1\t0.3\n0.2\t0.3\n");
    r = call({"plan", "--n", "10", "--mu", "0.3", "--s", "0.1", "--targets", str(dir / "flat.tsv")});
    CHECK(r.code == kData);
    CHECK(r.err.rfind("error: data: ", 0) == 0);
  }

  TEST_CASE("config parsing") {
    Config c;
    c.load_text("# comment\n\nseed = 7\nname=  two words  \nkinds = ridge, tree ,,svr\nflag = yes\n", "/base");
    CHECK(c.integer("seed") == 7);
    CHECK(c.get("name") == "two words");
    CHECK(c.list("kinds") == std::vector<std::string>{"ridge", "tree", "svr"});
    CHECK(c.flag("flag", false));
    CHECK_FALSE(c.flag("absent", false));
    CHECK(c.number("absent", 2.5) == 2.5);
    CHECK_THROWS_AS(c.get("absent"), ArgumentError);
    CHECK_THROWS_AS(c.number("name"), ArgumentError);

    c.set("corpus", "data/c.txt", "/base");
    CHECK(c.path("corpus") == fs::path("/base/data/c.txt"));
    c.set("abs", "/x/y.txt", "/base");
    CHECK(c.path("abs") == fs::path("/x/y.txt"));

    c.set_assignment("seed=9");
    CHECK(c.integer("seed") == 9);
    CHECK_THROWS_AS(c.set_assignment("noequals"), ArgumentError);
    Config bad;
    CHECK_THROWS_AS(bad.load_text("just words\n", "/"), ParseError);
  }

  TEST_CASE("config hash covers exactly the keys read") {
    Config a, b;
    a.load_text("x = 1\ny = 2\nunused = 3\nout = a.tsv\nworkers = 4\n", "/");
    b.load_text("workers = 1\nout = b.tsv\ny = 2\nx = 1\n", "/");
    for (Config* c : {&a, &b}) {
      c->ignore_in_hash("workers");
      (void)c->get("x");
      (void)c->get("y");
      (void)c->output_path("out");
      (void)c->get("workers");
    }
    CHECK(a.hash() == b.hash());
    Config d;
    d.load_text("x = 1\ny = 3\n", "/");
    (void)d.get("x");
    (void)d.get("y");
    CHECK(d.hash() != a.hash());
  }

  TEST_CASE("score on identical files") {
    const fs::path dir = scratch("score");
    write_file(dir / "gold.mrg", kTrees);
    const Result r = call({"score", "--gold", str(dir / "gold.mrg"), "--test", str(dir / "gold.mrg"), "--out",
                           str(dir / "score.tsv")});
    REQUIRE(r.code == kOk);
    CHECK(r.out.find("F1 1.0000") != std::string::npos);
    const TsvTable t = parse_tsv(read_file(dir / "score.tsv"));
    CHECK(t.rows.size() == 3);
    for (const auto& row : t.rows) CHECK(row[static_cast<std::size_t>(t.column("F1"))] == "1");
    CHECK(t.comments.front().rfind("produced-by: ppp score; config-hash: ", 0) == 0);
    CHECK(comment_value(t, "corpus") == "P=1 R=1 F1=1");
  }

  TEST_CASE("treestats is the mean of per-sentence stats") {
    const fs::path dir = scratch("treestats");
    SynthOptions o;
    o.n_sentences = 200;
    o.seed = 3;
    const auto set = synth_treebank(o);
    const std::vector<Tree>& gold = *set.gold;
    write_trees(dir / "gold.mrg", gold);
    const Result r = call({"treestats", "--trees", str(dir / "gold.mrg"), "--out", str(dir / "stats.tsv")});
    REQUIRE(r.code == kOk);
    const TsvTable t = parse_tsv(read_file(dir / "stats.tsv"));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "gold");
    double sums[5] = {0, 0, 0, 0, 0};
    for (const auto& tree : gold) {
      const TreeStats s = tree_stats(tree);
      sums[0] += s.numB;
      sums[1] += s.depthB;
      sums[2] += s.avg_depthB;
      sums[3] += s.r_over_l;
      sums[4] += s.avg_r_over_l;
    }
    for (int k = 0; k < 5; ++k) {
      const double got = parse_number(t.rows[0][static_cast<std::size_t>(k) + 1], 1, 1);
      CHECK(std::abs(got - sums[k] / static_cast<double>(gold.size())) <= 1e-12);
    }
  }

  TEST_CASE("plan reproduces the half width and is deterministic") {
    const fs::path dir = scratch("plan");
    const std::vector<std::string> args = {"plan", "--n", "1346", "--mu", "0.7095", "--s", "0.1636", "--published",
                                           "50:0.0670", "--rae", "1,10,50", "--out", str(dir / "plan.tsv")};
    const Result r = call(args);
    REQUIRE(r.code == kOk);
    CHECK(r.out.find("0.0087") != std::string::npos);
    const std::string first = read_file(dir / "plan.tsv");
    REQUIRE(call(args).code == kOk);
    CHECK(read_file(dir / "plan.tsv") == first);
    const TsvTable t = parse_tsv(first);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[2][static_cast<std::size_t>(t.column("n_hat"))] == "25");
  }

  TEST_CASE("train, evaluate and predict on a small table") {
    const fs::path dir = scratch("model");
    TsvTable t;
    t.comments = {"produced-by: test", "setting: +TreeF", "set: toy", "parser: p"};
    t.header = {"sentence", "a", "b", "target"};
    for (int i = 0; i < 60; ++i) {
      const double a = (i % 7) / 7.0, b = (i % 5) / 5.0;
      t.rows.push_back({std::to_string(i + 1), format_number(a), format_number(b),
                        format_number(0.2 + 0.5 * a + 0.1 * b + 0.01 * ((i * 37) % 11) / 11.0)});
    }
    write_file(dir / "f.tsv", write_tsv(t));

    Result r = call({"train", "--features", str(dir / "f.tsv"), "--model", str(dir / "m.json"), "--kinds", "ridge",
                     "--preprocessing", "none"});
    REQUIRE(r.code == kOk);
    r = call({"evaluate", "--features", str(dir / "f.tsv"), "--model", str(dir / "m.json"), "--out",
              str(dir / "e.tsv")});
    REQUIRE(r.code == kOk);
    const TsvTable e = parse_tsv(read_file(dir / "e.tsv"));
    REQUIRE(e.rows.size() == 2);
    CHECK(e.rows[1][static_cast<std::size_t>(e.column("Model"))] == "MEAN");
    CHECK(parse_number(e.rows[1][static_cast<std::size_t>(e.column("RAE"))], 1, 1) == 1.0);
    CHECK(parse_number(e.rows[0][static_cast<std::size_t>(e.column("RAE"))], 1, 1) < 0.2);

    r = call({"predict", "--features", str(dir / "f.tsv"), "--model", str(dir / "m.json"), "--out",
              str(dir / "p.tsv")});
    REQUIRE(r.code == kOk);
    CHECK(parse_tsv(read_file(dir / "p.tsv")).rows.size() == 60);

    // A table with other feature names is refused.
    TsvTable other = t;
    other.header[2] = "c";
    write_file(dir / "g.tsv", write_tsv(other));
    r = call({"evaluate", "--features", str(dir / "g.tsv"), "--model", str(dir / "m.json")});
    CHECK(r.code == kData);
    CHECK(r.err.rfind("error: data: ", 0) == 0);
  }
}
