#include <benchmark/benchmark.h>

#include "ppp/bracket_eval.hpp"
#include "ppp/link_features.hpp"
#include "ppp/ngram_lm.hpp"
#include "ppp/regression.hpp"
#include "ppp/rng.hpp"
#include "ppp/statbound.hpp"
#include "ppp/text_features.hpp"
#include "ppp/tree_features.hpp"
#include "ppp/treebank.hpp"

using namespace ppp;

namespace {

const ParallelParseSet& treebank() {
  static const ParallelParseSet set = [] {
    SynthOptions o;
    o.n_sentences = 1000;
    o.seed = 3;
    return synth_treebank(o);
  }();
  return set;
}

std::vector<Tokens> sentences() {
  std::vector<Tokens> out;
  for (const auto& t : *treebank().gold) out.push_back(t.yield());
  return out;
}

void BM_BracketF1(benchmark::State& state) {
  const auto& gold = *treebank().gold;
  const auto& test = treebank().systems.at("noisy");
  for (auto _ : state) benchmark::DoNotOptimize(corpus_f1(gold, test));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(gold.size()));
}
BENCHMARK(BM_BracketF1);

void BM_CF1(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cf1(treebank().systems));
}
BENCHMARK(BM_CF1);

void BM_TreeStats(benchmark::State& state) {
  const auto& gold = *treebank().gold;
  for (auto _ : state) {
    for (const auto& t : gold) benchmark::DoNotOptimize(tree_stats(t));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(gold.size()));
}
BENCHMARK(BM_TreeStats);

void BM_LmTrain(benchmark::State& state) {
  const auto corpus = sentences();
  for (auto _ : state) benchmark::DoNotOptimize(NGramLM::train(corpus, static_cast<int>(state.range(0)), Direction::kForward));
}
BENCHMARK(BM_LmTrain)->Arg(1)->Arg(3)->Arg(5);

void BM_TextVector(benchmark::State& state) {
  const auto corpus = sentences();
  const TextModels models = TextModels::build(corpus_from_trees(*treebank().gold));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(text_vector(corpus[i++ % corpus.size()], models));
}
BENCHMARK(BM_TextVector);

void BM_LinkVector(benchmark::State& state) {
  const auto& proxy = treebank().systems.at("noisy_b");
  const LinkIndex index = LinkIndex::build(proxy);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(link_vector(index, proxy[i++ % proxy.size()]));
}
BENCHMARK(BM_LinkVector);

Dataset regression_data(Eigen::Index n, Eigen::Index d) {
  Rng rng(5);
  Dataset ds;
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) ds.X(i, j) = rng.normal();
    ds.y(i) = 0.5 + 0.1 * ds.X(i, 0) - 0.05 * ds.X(i, 1) + 0.05 * rng.normal();
  }
  for (Eigen::Index j = 0; j < d; ++j) ds.names.push_back("f" + std::to_string(j));
  return ds;
}

void BM_ForwardSelect(benchmark::State& state) {
  const Dataset d = regression_data(2000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_select(d));
}
BENCHMARK(BM_ForwardSelect)->Arg(50)->Arg(190)->Unit(benchmark::kMillisecond);

void BM_SolveSvr(benchmark::State& state) {
  const Dataset d = regression_data(state.range(0), 20);
  const Eigen::MatrixXd Z = Standardizer::fit(d.X).apply(d.X);
  for (auto _ : state) benchmark::DoNotOptimize(solve_svr(Z, d.y, 1.0, 0.01, 0.05));
}
BENCHMARK(BM_SolveSvr)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_RequiredN(benchmark::State& state) {
  const SampleStats stats{1346, 0.7095, 0.1636, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(required_n(stats, 0.0013));
}
BENCHMARK(BM_RequiredN);

}  // namespace

BENCHMARK_MAIN();
