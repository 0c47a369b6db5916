#include <doctest.h>

#include "oracles.hpp"
#include "ppp/bracket_eval.hpp"
#include "ppp/errors.hpp"
#include "ppp/treebank.hpp"

using namespace ppp;

namespace {

Tree tree(const char* text) { return parse_bracketed(text)[0]; }

}  // namespace

TEST_SUITE("bracket-eval") {
  TEST_CASE("spans of a small tree") {
    const SpanSet s = spans_of(tree("(S (NP a) (VP b c))"));
    REQUIRE(s.size() == 2);
    CHECK(s.spans[0].start == 0);
    CHECK(s.spans[0].end == 3);
    CHECK(s.spans[1].start == 1);
    CHECK(s.spans[1].end == 3);
    CHECK(spans_of(tree("(NP a)")).size() == 0);
    ScoringOptions labeled;
    labeled.labeled = true;
    CHECK(spans_of(tree("(S (NP a) (VP b c))"), labeled).size() == 2);
    ScoringOptions pre;
    pre.include_preterminals = true;
    CHECK(spans_of(tree("(S (NP a) (VP b c))"), pre).size() == 3);
  }

  TEST_CASE("identity and the flat example") {
    const Tree g = tree("(S (NP a) (VP b c))");
    CHECK(bracket_f1(g, g).f1 == 1.0);
    const F1Report r = bracket_f1(g, tree("(S a b c)"));
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 0.5);
    CHECK(r.f1 == doctest::Approx(2.0 / 3).epsilon(1e-15));
  }

  TEST_CASE("degenerate zero-bracket cases") {
    CHECK(f1_from_counts(0, 0, 0).f1 == 1.0);
    CHECK(f1_from_counts(0, 2, 0).f1 == 0.0);
    CHECK(f1_from_counts(0, 0, 3).f1 == 0.0);
  }

  TEST_CASE("unary chains count once per occurrence") {
    const Tree g = tree("(S (S (NP a b)))");
    const Tree t = tree("(S (NP a b))");
    const F1Report r = bracket_f1(g, t);
    CHECK(r.gold_count == 3);
    CHECK(r.test_count == 2);
    CHECK(r.matched == 2);
  }

  TEST_CASE("labeled scoring") {
    ScoringOptions o;
    o.labeled = true;
    const F1Report r = bracket_f1(tree("(S (NP a) (VP b c))"), tree("(S (NP a) (NP b c))"), o);
    CHECK(r.matched == 1);
    CHECK(bracket_f1(tree("(S (NP a) (VP b c))"), tree("(S (NP a) (NP b c))")).matched == 2);
  }

  TEST_CASE("yield mismatch") {
    CHECK_THROWS_AS(bracket_f1(tree("(S a b)"), tree("(S a c)")), YieldMismatch);
    CHECK_THROWS_AS(corpus_f1({tree("(S a b)")}, {}), DataError);
  }

  TEST_CASE("all 4-leaf binary trees match the oracle") {
    const auto trees = oracle::all_binary_trees({"a", "b", "c", "d"});
    CHECK(trees.size() == 5);
    for (const auto& g : trees) {
      for (const auto& t : trees) {
        const F1Report r = bracket_f1(g, t);
        const oracle::Prf o = oracle::f1(g, t);
        CHECK(r.f1 == o.f);
        CHECK(r.matched == o.matched);
        CHECK(bracket_f1(t, g).f1 == r.f1);
      }
    }
  }

  TEST_CASE("range and precision monotonicity") {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      const Tree a = oracle::random_tree(rng, 2 + rng.below(8));
      Rng rng2(100 + static_cast<std::uint64_t>(i));
      const Tree b = delete_brackets(a, 0.4, rng2.next());
      const F1Report r = bracket_f1(a, b);
      CHECK(r.precision >= 0);
      CHECK(r.precision <= 1);
      CHECK(r.recall <= 1);
      CHECK(r.f1 <= 1);
      // Deleting gold brackets never creates a wrong one.
      CHECK(r.precision == 1.0);
    }
  }

  TEST_CASE("corpus F1 is micro-averaged") {
    SynthOptions o;
    o.seed = 21;
    o.n_sentences = 200;
    o.noise = 0.3;
    const auto set = synth_treebank(o);
    const auto& gold = *set.gold;
    const auto& noisy = set.systems.at("noisy");
    const F1Report r = corpus_f1(gold, noisy);
    const oracle::Prf want = oracle::corpus_f1(gold, noisy);
    CHECK(r.matched == want.matched);
    CHECK(r.gold_count == want.gold);
    CHECK(r.test_count == want.test);
    CHECK(r.f1 == doctest::Approx(want.f).epsilon(1e-15));
    CHECK(corpus_f1(gold, gold).f1 == 1.0);
    CHECK(corpus_f1({gold[0]}, {noisy[0]}).f1 == doctest::Approx(bracket_f1(gold[0], noisy[0]).f1).epsilon(1e-15));
  }

  TEST_CASE("cf1") {
    SynthOptions o;
    o.seed = 22;
    o.n_sentences = 20;
    const auto set = synth_treebank(o);
    const auto scores = cf1(set.systems);
    for (const auto& [p, v] : scores) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        double sum = 0;
        for (const auto& [q, trees] : set.systems) {
          if (q != p) sum += oracle::f1(set.systems.at(p)[i], trees[i]).f;
        }
        CHECK(v[i] == doctest::Approx(sum / 2).epsilon(1e-12));
      }
    }
    std::map<std::string, std::vector<Tree>> two{{"a", set.systems.at("noisy")}, {"b", set.systems.at("right")}};
    const auto pair = cf1(two);
    CHECK(pair.at("a") == pair.at("b"));
    std::map<std::string, std::vector<Tree>> same{{"a", *set.gold}, {"b", *set.gold}};
    const auto identical = cf1(same);
    for (double v : identical.at("a")) CHECK(v == 1.0);
    std::map<std::string, std::vector<Tree>> one{{"a", *set.gold}};
    CHECK_THROWS_AS(cf1(one), ArgumentError);
  }
}
