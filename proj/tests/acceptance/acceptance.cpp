// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "common.hpp"
#include "oracles.hpp"
#include "ppp/bracket_eval.hpp"
#include "ppp/regression.hpp"
#include "ppp/statbound.hpp"
#include "ppp/tree_features.hpp"
#include "ppp/treebank.hpp"
#include "ppp/tsv.hpp"

using namespace ppp;
namespace fs = std::filesystem;

namespace {

// Seed of the end-to-end synthetic run.
constexpr std::uint64_t kCommittedSeed = 1;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      failures.push_back(what);
      pass = false;
    }
  }
};

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "ppp-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs a ppp subcommand in-process; throws on a nonzero exit.
std::string ppp_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) {
    std::string cmd;
    for (const auto& a : args) cmd += " " + a;
    throw std::runtime_error("ppp" + cmd + " exited " + std::to_string(code) + ": " + err.str());
  }
  return out.str();
}

std::string cell(const TsvTable& t, std::size_t row, std::string_view column) {
  const long c = t.column(column);
  if (c < 0) throw std::runtime_error("missing column " + std::string(column));
  return t.rows.at(row).at(static_cast<std::size_t>(c));
}

double num(const TsvTable& t, std::size_t row, std::string_view column) {
  return parse_number(cell(t, row, column), row + 1, 1);
}

TsvTable read_tsv(const fs::path& p) { return parse_tsv(read_file(p)); }

std::string s(const fs::path& p) { return p.string(); }

// ---- 1 --------------------------------------------------------------------

struct Column {
  const char* name;
  const char* n;
  const char* mu;
  const char* s;
  double d;
  std::vector<std::tuple<int, double, double>> rows;  // RAE %, d_hat, n_hat
};

const std::vector<Column>& published_table() {
  static const std::vector<Column> cols = {
      {"WSJ24", "1346", "0.7095", "0.1636", 0.0087,
       {{1, 0.0013, 57335}, {5, 0.0067, 2296}, {10, 0.0134, 576}, {20, 0.0268, 146}, {30, 0.0402, 66},
        {40, 0.0536, 38}, {50, 0.0670, 25}, {75, 0.1004, 13}, {80, 0.1071, 12}, {85, 0.1138, 11}}},
      {"WSJ02-21", "6960", "0.7145", "0.1633", 0.0038,
       {{1, 0.0013, 58164}, {5, 0.0066, 2329}, {10, 0.0133, 584}, {20, 0.0265, 148}, {30, 0.0398, 67},
        {40, 0.0531, 39}, {50, 0.0664, 26}, {75, 0.0995, 13}, {80, 0.1062, 12}, {85, 0.1128, 11}}},
  };
  return cols;
}

void table_reproduction(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& col : published_table()) {
    std::string published, levels;
    for (const auto& [rae, d_hat, n_hat] : col.rows) {
      std::ostringstream p;
      p << rae << ":" << std::fixed << std::setprecision(4) << d_hat;
      published += (published.empty() ? "" : ",") + p.str();
      levels += (levels.empty() ? "" : ",") + std::to_string(rae);
    }
    const fs::path out = workdir() / (std::string("plan-") + col.name + ".tsv");
    ppp_run({"plan", "--n", col.n, "--mu", col.mu, "--s", col.s, "--published", published, "--rae", levels, "--out",
             s(out)});
    const TsvTable t = read_tsv(out);
    const double d = parse_number(cli::comment_value(t, "d"), 1, 1);
    o.expect(std::abs(d - col.d) <= 1e-4 + 1e-12, std::string(col.name) + " d");
    o.expect(t.rows.size() == col.rows.size(), std::string(col.name) + " row count");
    double worst_n = 0;
    for (std::size_t i = 0; i < col.rows.size() && i < t.rows.size(); ++i) {
      const auto& [rae, d_hat, n_hat] = col.rows[i];
      o.expect(std::abs(num(t, i, "d_hat") - d_hat) <= 1e-4 + 1e-12,
               std::string(col.name) + " d_hat at " + std::to_string(rae) + "%");
      const double rel = std::abs(num(t, i, "n_hat") - n_hat) / n_hat;
      worst_n = std::max(worst_n, rel);
      o.expect(rel <= 0.01, std::string(col.name) + " n_hat at " + std::to_string(rae) + "%");
    }
    o.detail << col.name << " d=" << std::fixed << std::setprecision(4) << d << " worst n_hat error "
             << std::setprecision(2) << 100 * worst_n << "%; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(secs < 1.0, "runtime");
}

// ---- 2 --------------------------------------------------------------------

Tree leaf(int i) { return Tree::leaf("X", "w" + std::to_string(i)); }

// Nine brackets deep and 24 brackets in total.
Tree figure_tree() {
  int next = 0;
  Tree spine = Tree::node("S", {leaf(next++), leaf(next++)});
  for (int d = 2; d <= 8; ++d) spine = Tree::node("S", {leaf(next++), spine});
  std::vector<Tree> kids{leaf(next++), spine};
  for (int i = 0; i < 15; ++i) kids.push_back(Tree::node("S", {leaf(next++), leaf(next++)}));
  return Tree::node("S", std::move(kids));
}

void figure_identity(Outcome& o) {
  const TreeStats fig = tree_stats(figure_tree());
  o.expect(fig.numB == 24 && fig.depthB == 9 && fig.avg_depthB == 0.375, "published pair 9/24");
  Rng rng(2);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const TreeStats st = tree_stats(oracle::random_tree(rng, 2 + rng.below(40)));
    bad += st.avg_depthB != static_cast<double>(st.depthB) / static_cast<double>(st.numB);
  }
  o.expect(bad == 0, std::to_string(bad) + " random trees break the identity");
  o.detail << "9/24 -> " << fig.avg_depthB << "; 10000 random trees checked";
}

// ---- 3 --------------------------------------------------------------------

void error_vs_n(Outcome& o) {
  const std::vector<double> sigmas{0.05, 0.1, 0.2};
  const std::vector<std::size_t> ns{25, 100, 400, 1600};
  const ErrorGrid g = simulate_error_vs_n(0.2316, sigmas, ns, 1000, 2316);
  double worst = 0;
  for (std::size_t a = 0; a < sigmas.size(); ++a) {
    for (std::size_t b = 0; b < ns.size(); ++b) {
      if (b > 0) o.expect(g.error[a][b] < g.error[a][b - 1], "monotone in n");
      const double want = sigmas[a] * std::sqrt(2 / (std::numbers::pi * static_cast<double>(ns[b])));
      worst = std::max(worst, std::abs(g.error[a][b] - want) / want);
    }
  }
  o.expect(worst <= 0.10, "folded-normal agreement");
  o.detail << "worst deviation from closed form " << std::fixed << std::setprecision(2) << 100 * worst << "%";
}

// ---- 4 --------------------------------------------------------------------

void f1_oracle(Outcome& o) {
  std::size_t pairs = 0, bad = 0;
  for (std::size_t len = 1; len <= 6; ++len) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < len; ++i) tokens.push_back("t" + std::to_string(i));
    const auto trees = oracle::all_binary_trees(tokens);
    for (const auto& g : trees) {
      for (const auto& t : trees) {
        const F1Report got = bracket_f1(g, t);
        const oracle::Prf want = oracle::f1(g, t);
        ++pairs;
        bad += got.f1 != want.f || got.precision != want.p || got.recall != want.r ||
               got.matched != want.matched;
      }
    }
  }
  o.expect(bad == 0, std::to_string(bad) + " mismatching pairs");
  o.detail << pairs << " tree pairs, lengths 1..6";
}

// ---- 5 --------------------------------------------------------------------

void cf1_contract(Outcome& o) {
  SynthOptions so;
  so.n_sentences = 100;
  so.seed = 5;
  const ParallelParseSet set = synth_treebank(so);
  const auto two = cf1({{"noisy", set.systems.at("noisy")}, {"right", set.systems.at("right")}});
  o.expect(two.at("noisy") == two.at("right"), "two-parser symmetry");
  for (std::size_t i = 0; i < set.systems.at("noisy").size(); ++i) {
    o.expect(two.at("noisy")[i] == bracket_f1(set.systems.at("right")[i], set.systems.at("noisy")[i]).f1,
             "two-parser value");
  }
  const auto three = cf1(set.systems);
  double worst = 0;
  for (const auto& [p, trees] : set.systems) {
    for (std::size_t i = 0; i < trees.size(); ++i) {
      double sum = 0;
      for (const auto& [q, other] : set.systems) {
        if (q != p) sum += oracle::f1(other[i], trees[i]).f;
      }
      worst = std::max(worst, std::abs(three.at(p)[i] - sum / 2));
    }
  }
  o.expect(set.systems.size() == 3, "three synthetic parsers");
  o.expect(worst <= 1e-12, "three-parser average");
  o.detail << "max deviation from brute force " << worst;
}

// ---- 6 --------------------------------------------------------------------

void metric_contract(Outcome& o) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd y(2 + rng.below(300));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.uniform();
    const auto rae = evaluate(Eigen::VectorXd::Constant(y.size(), y.mean()), y).rae;
    o.expect(rae && *rae == 1.0, "mean predictor RAE");
  }
  Eigen::VectorXd y(5), p(5);
  y << 0.2, 0.4, 0.6, 0.8, 1.0;
  p << 0.3, 0.4, 0.5, 0.9, 0.9;
  // Errors 0.1 0 -0.1 0.1 -0.1; |y - mean| sums to 1.2.
  const EvalReport r = evaluate(p, y);
  o.expect(std::abs(r.mae - 0.08) < 1e-12, "MAE");
  o.expect(std::abs(r.rmse - std::sqrt(0.008)) < 1e-12, "RMSE");
  o.expect(r.rae && std::abs(*r.rae - 0.4 / 1.2) < 1e-12, "RAE");
  o.expect(std::abs(r.r - 0.34 / std::sqrt(0.32 * 0.4)) < 1e-12, "r");
  o.detail << "100 random datasets; 5-point set r=" << std::setprecision(6) << r.r << " RMSE=" << r.rmse
           << " MAE=" << r.mae << " RAE=" << *r.rae;
}

// ---- 7 --------------------------------------------------------------------

std::size_t dim_initial(const fs::path& meta, const std::string& parser) {
  const auto j = nlohmann::json::parse(read_file(meta));
  return j.at("parsers").at(parser).at("dim_initial").get<std::size_t>();
}

void family_dims(Outcome& o) {
  const fs::path dir = workdir() / "dims";
  ppp_run({"synth", "--out-dir", s(dir), "--seed", "7", "--corpus-size", "400", "--train-size", "150", "--test-size",
           "50"});
  std::map<std::string, std::size_t> dims;
  for (const char* setting : {"Text", "+Link", "+TreeF", "+CF1"}) {
    const fs::path out = dir / (std::string("f") + setting);
    ppp_run({"extract", "-c", s(dir / "ppp.conf"), "--setting", setting, "--out-dir", s(out)});
    dims[setting] = dim_initial(out / "extract.meta.json", "noisy");
  }
  o.expect(dims["+Link"] - dims["Text"] == 26, "+Link adds 26");
  o.expect(dims["+CF1"] - dims["+TreeF"] == 1, "+CF1 adds 1");
  o.expect(dims["Text"] < dims["+Link"] && dims["+Link"] < dims["+TreeF"] && dims["+TreeF"] < dims["+CF1"],
           "strictly increasing");
  o.detail << "#dimI Text " << dims["Text"] << ", +Link " << dims["+Link"] << ", +TreeF " << dims["+TreeF"]
           << ", +CF1 " << dims["+CF1"];
}

// ---- 8 --------------------------------------------------------------------

struct Scores {
  double r = 0, rae = 0;
  std::string model;
};

Scores train_and_evaluate(const fs::path& features, const fs::path& out, const std::string& tag) {
  const fs::path model = out / (tag + ".model.json");
  ppp_run({"train", "--features", s(features / "train.noisy.tsv"), "--model", s(model), "--kinds", "ridge"});
  ppp_run({"evaluate", "--features", s(features / "test.noisy.tsv"), "--model", s(model), "--out",
           s(out / (tag + ".eval.tsv"))});
  const TsvTable t = read_tsv(out / (tag + ".eval.tsv"));
  return {num(t, 0, "r"), num(t, 0, "RAE"), cell(t, 0, "Model")};
}

void end_to_end(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = workdir() / "e2e";
  ppp_run({"synth", "--out-dir", s(dir), "--seed", std::to_string(kCommittedSeed), "--train-size", "2000",
           "--test-size", "500", "--noise", "0.3"});
  ppp_run({"extract", "-c", s(dir / "ppp.conf"), "--setting", "+TreeF", "--out-dir", s(dir / "treef")});
  ppp_run({"extract", "-c", s(dir / "ppp.conf"), "--setting", "+CF1", "--out-dir", s(dir / "cf1")});
  const Scores treef = train_and_evaluate(dir / "treef", dir, "treef");
  const Scores cf1 = train_and_evaluate(dir / "cf1", dir, "cf1");
  o.expect(treef.rae < 0.95, "+TreeF RAE < 0.95");
  o.expect(treef.r > 0.3, "+TreeF r > 0.3");
  o.expect(cf1.rae < treef.rae, "+CF1 lowers RAE");

  // Byte stability: a second training run reproduces model and report.
  const std::string first_model = read_file(dir / "cf1.model.json");
  const std::string first_eval = read_file(dir / "cf1.eval.tsv");
  train_and_evaluate(dir / "cf1", dir, "cf1");
  o.expect(read_file(dir / "cf1.model.json") == first_model && read_file(dir / "cf1.eval.tsv") == first_eval,
           "rerun is byte-identical");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(secs < 300, "runtime");
  o.detail << std::fixed << std::setprecision(4) << "seed " << kCommittedSeed << ": +TreeF " << treef.model
           << " RAE " << treef.rae << " r " << treef.r << "; +CF1 " << cf1.model << " RAE " << cf1.rae << " r "
           << cf1.r << "; " << std::setprecision(0) << secs << " s";
}

// ---- 9 --------------------------------------------------------------------

Dataset dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Dataset d;
  d.X = X;
  d.y = y;
  for (Eigen::Index j = 0; j < X.cols(); ++j) d.names.push_back("f" + std::to_string(j));
  return d;
}

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& X) {
  std::vector<std::vector<double>> r(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) r[static_cast<std::size_t>(i)].push_back(X(i, j));
  }
  return r;
}

void learner_oracles(Outcome& o) {
  Eigen::MatrixXd X(5, 2);
  X << 1, 2, 2, 1, 3, 5, 4, 3, 6, 4;
  Eigen::VectorXd y(5);
  y << 0.3, 0.5, 0.4, 0.8, 0.9;
  double ridge_err = 0;
  for (double lambda : {0.0, 0.5, 5.0}) {
    const RegressionModel m = fit_ridge(dataset(X, y), lambda);
    const auto want = oracle::ridge(rows_of(X), std::vector<double>(y.data(), y.data() + 5), lambda);
    ridge_err = std::max({ridge_err, std::abs(m.input_intercept() - want[0]),
                          std::abs(m.input_coefficients()(0) - want[1]), std::abs(m.input_coefficients()(1) - want[2])});
  }
  o.expect(ridge_err <= 1e-9, "ridge normal equations");

  Rng rng(9);
  Eigen::MatrixXd Z(60, 4);
  Eigen::VectorXd v(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) Z(i, j) = rng.normal();
    v(i) = 0.5 + 0.1 * Z(i, 0) - 0.2 * Z(i, 2) + 0.05 * rng.normal();
  }
  const Dataset d = dataset(Z, v);
  const double pls_err =
      (fit_pls(d, 4).predict_unclamped(Z) - fit_ridge(d, 0.0).predict_unclamped(Z)).cwiseAbs().maxCoeff();
  o.expect(pls_err <= 1e-6, "PLS at full rank");

  std::size_t split_bad = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd S(8, 2);
    Eigen::VectorXd w(8);
    for (Eigen::Index i = 0; i < 8; ++i) {
      S(i, 0) = static_cast<double>(rng.below(6));
      S(i, 1) = rng.uniform();
      w(i) = rng.uniform();
    }
    const RegressionTree tree = grow_tree(S, w, 1, 1);
    const oracle::Split want = oracle::best_split(rows_of(S), std::vector<double>(w.data(), w.data() + 8), 1);
    split_bad += tree.nodes[0].feature != want.feature ||
                 (want.feature >= 0 && tree.nodes[0].threshold != want.threshold);
  }
  o.expect(split_bad == 0, "tree split");

  int first = 0;
  for (int t = 0; t < 100; ++t) {
    Rng r(9000 + static_cast<std::uint64_t>(t));
    Eigen::MatrixXd F(100, 10);
    Eigen::VectorXd target(100);
    const Eigen::Index planted = t % 10;
    for (Eigen::Index i = 0; i < 100; ++i) {
      for (Eigen::Index j = 0; j < 10; ++j) F(i, j) = r.normal();
      target(i) = 0.5 + 0.1 * F(i, planted) + 0.05 * r.normal();
    }
    const SelectionResult sel = forward_select(dataset(F, target));
    first += !sel.selected.empty() && sel.selected[0] == planted;
  }
  o.expect(first >= 95, "forward selection");
  o.detail << "ridge " << std::scientific << std::setprecision(1) << ridge_err << ", PLS " << pls_err
           << ", splits " << 100 - split_bad << "/100, FS first " << first << "/100";
}

// ---- 10 -------------------------------------------------------------------

// True when both trees hold the same files with the same bytes.
bool same_outputs(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
  if (files.size() != count_b || files.empty()) return false;
  for (const auto& f : files) {
    if (!fs::exists(b / f) || read_file(a / f) != read_file(b / f)) return false;
  }
  return true;
}

void determinism(Outcome& o) {
  // Same config, same paths: run into one directory, keep a copy, run again.
  const fs::path root = workdir() / "determinism";
  const fs::path dir = root / "run";
  const auto all_commands = [&] {
    fs::remove_all(dir);
    ppp_run({"synth", "--out-dir", s(dir / "synth"), "--seed", "11", "--corpus-size", "300", "--train-size", "120",
             "--test-size", "40"});
    ppp_run({"extract", "-c", s(dir / "synth" / "ppp.conf"), "--out-dir", s(dir / "features"), "--workers", "2"});
    const fs::path f = dir / "features";
    ppp_run({"score", "--gold", s(dir / "synth" / "test.gold.mrg"), "--test", s(dir / "synth" / "test.noisy.mrg"),
             "--out", s(dir / "out" / "score.tsv")});
    ppp_run({"cf1", "--parsers", "noisy,right", "--set", "parser.noisy=" + s(dir / "synth" / "test.noisy.mrg"),
             "--set", "parser.right=" + s(dir / "synth" / "test.right.mrg"), "--out", s(dir / "out" / "cf1.tsv")});
    ppp_run({"train", "--features", s(f / "train.noisy.tsv"), "--model", s(dir / "out" / "model.json"), "--report",
             s(dir / "out" / "train.tsv")});
    ppp_run({"predict", "--features", s(f / "test.noisy.tsv"), "--model", s(dir / "out" / "model.json"), "--out",
             s(dir / "out" / "predict.tsv")});
    ppp_run({"evaluate", "--features", s(f / "test.noisy.tsv"), "--model", s(dir / "out" / "model.json"), "--out",
             s(dir / "out" / "evaluate.tsv")});
    ppp_run({"plan", "--n", "1346", "--mu", "0.7095", "--s", "0.1636", "--published", "50:0.0670", "--out",
             s(dir / "out" / "plan.tsv")});
    ppp_run({"treestats", "--trees", s(dir / "synth" / "test.noisy.mrg"), "--out", s(dir / "out" / "treestats.tsv")});
  };
  all_commands();
  fs::copy(dir, root / "first", fs::copy_options::recursive);
  all_commands();
  std::size_t checked = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) checked += e.is_regular_file();
  o.expect(same_outputs(root / "first", dir), "outputs differ between runs");
  o.detail << checked << " files from 9 subcommands compared";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"sample-size table reproduction", table_reproduction},
      {"avg depth identity", figure_identity},
      {"error versus n", error_vs_n},
      {"bracketing F1 oracle", f1_oracle},
      {"CF1 contract", cf1_contract},
      {"metric contract", metric_contract},
      {"feature family dimensions", family_dims},
      {"end-to-end synthetic pipeline", end_to_end},
      {"learner oracles", learner_oracles},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.expect(false, e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << "criterion " << std::setw(2) << i + 1 << "  " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << "  (" << std::fixed << std::setprecision(2) << secs << " s)  "
              << o.detail.str();
    if (!o.failures.empty()) {
      std::cout << "  failed:";
      for (const auto& f : o.failures) std::cout << " [" << f << "]";
    }
    std::cout << std::endl;
  }
  fs::remove_all(workdir());
  return failed == 0 ? 0 : 1;
}
