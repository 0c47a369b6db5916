#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ppp/errors.hpp"
#include "ppp/regression.hpp"
#include "ppp/rng.hpp"

using namespace ppp;

namespace {

Dataset make(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Dataset d;
  d.X = X;
  d.y = y;
  for (Eigen::Index j = 0; j < X.cols(); ++j) d.names.push_back("f" + std::to_string(j));
  d.id = "toy";
  return d;
}

// y = 0.5 + 0.1 x0 - 0.05 x1 + noise, plus `extra` pure-noise columns.
Dataset linear(std::uint64_t seed, Eigen::Index n, Eigen::Index extra = 0, double noise = 0.01) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, 2 + extra);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = rng.normal();
    y(i) = 0.5 + 0.1 * X(i, 0) - 0.05 * X(i, 1) + noise * rng.normal();
  }
  return make(X, y);
}

std::vector<std::vector<double>> rows(const Eigen::MatrixXd& X) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(X(i, j));
  }
  return out;
}

std::vector<double> vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

TEST_SUITE("regression") {
  TEST_CASE("metrics on a 5-point set") {
    Eigen::VectorXd y(5), p(5);
    y << 0.2, 0.4, 0.6, 0.8, 1.0;
    p << 0.3, 0.4, 0.5, 0.9, 0.9;
    const EvalReport r = evaluate(p, y);
    CHECK(r.mae == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(r.rmse == doctest::Approx(std::sqrt(0.008)).epsilon(1e-12));
    REQUIRE(r.rae.has_value());
    CHECK(*r.rae == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(r.r == doctest::Approx(0.34 / std::sqrt(0.32 * 0.4)).epsilon(1e-12));

    const EvalReport perfect = evaluate(y, y);
    CHECK(perfect.r == doctest::Approx(1.0));
    CHECK(perfect.rmse == 0);
    CHECK(perfect.mae == 0);
    CHECK(*perfect.rae == 0);
  }

  TEST_CASE("mean predictor has RAE exactly one") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd y(3 + rng.below(200));
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.uniform();
      const EvalReport r = evaluate(Eigen::VectorXd::Constant(y.size(), y.mean()), y);
      CHECK(*r.rae == 1.0);
      CHECK(r.r == 0.0);
    }
    CHECK_FALSE(evaluate(Eigen::VectorXd::Constant(3, 0.5), Eigen::VectorXd::Constant(3, 0.4)).rae.has_value());
  }

  TEST_CASE("ridge recovers an exact linear fit") {
    Eigen::MatrixXd X(6, 1);
    X << 1, 2, 3, 4, 5, 7;
    const RegressionModel m = fit_ridge(make(X, 3 * X.col(0)), 0.0);
    CHECK(m.input_coefficients()(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(std::abs(m.input_intercept()) < 1e-9);
  }

  TEST_CASE("ridge matches the normal equations") {
    Eigen::MatrixXd X(5, 2);
    X << 1, 2, 2, 1, 3, 5, 4, 3, 6, 4;
    Eigen::VectorXd y(5);
    y << 0.3, 0.5, 0.4, 0.8, 0.9;
    for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
      const RegressionModel m = fit_ridge(make(X, y), lambda);
      const auto want = oracle::ridge(rows(X), vec(y), lambda);
      CHECK(std::abs(m.input_intercept() - want[0]) < 1e-9);
      CHECK(std::abs(m.input_coefficients()(0) - want[1]) < 1e-9);
      CHECK(std::abs(m.input_coefficients()(1) - want[2]) < 1e-9);
    }
  }

  TEST_CASE("heavy shrinkage predicts the mean") {
    const Dataset d = linear(2, 50);
    const RegressionModel m = fit_ridge(d, 1e12);
    const Eigen::VectorXd p = m.predict_unclamped(d.X);
    CHECK((p.array() - d.y.mean()).abs().maxCoeff() < 1e-9);
  }

  TEST_CASE("ridge with a constant target is intercept only") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 3);
    const RegressionModel m = fit_ridge(make(X, Eigen::VectorXd::Constant(10, 0.7)));
    CHECK(m.ridge.intercept_only);
    CHECK(m.predict(X).isApproxToConstant(0.7));
  }

  TEST_CASE("tree: perfect step, stump and exhaustive split") {
    Eigen::MatrixXd X(8, 1);
    X << -3, -2, -1, -0.5, 0.5, 1, 2, 3;
    Eigen::VectorXd y = (X.col(0).array() > 0).cast<double>();
    const RegressionModel step = fit_tree(make(X, y), 1, 1);
    CHECK(evaluate(step, make(X, y)).rmse == 0);
    const RegressionModel stump = fit_tree(make(X, y), 0, 1);
    CHECK(*evaluate(stump, make(X, y)).rae == doctest::Approx(1.0));

    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
      Eigen::MatrixXd Z(8, 3);
      Eigen::VectorXd v(8);
      for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) Z(i, j) = static_cast<double>(rng.below(5));
        v(i) = rng.uniform();
      }
      const RegressionTree tree = grow_tree(Z, v, 1, 2);
      const oracle::Split want = oracle::best_split(rows(Z), vec(v), 2);
      REQUIRE(!tree.nodes.empty());
      CHECK(tree.nodes[0].feature == want.feature);
      if (want.feature >= 0) CHECK(tree.nodes[0].threshold == want.threshold);
    }
  }

  TEST_CASE("svr on linear data is close to ridge") {
    const Dataset train = linear(3, 200), test = linear(4, 100);
    const double ridge = evaluate(fit_ridge(train), test).rmse;
    const RegressionModel svr = fit_svr(train, 100.0, 0.001, 0.01);
    CHECK(evaluate(svr, test).rmse <= 1.1 * ridge);
    CHECK(svr.svr.duality_gap() <= 1e-3 * std::max(1.0, std::abs(svr.svr.primal)));
    CHECK(svr.svr.duality_gap() >= -1e-9);
  }

  TEST_CASE("svr with a wide tube is flat") {
    const Dataset d = linear(5, 60);
    const double range = d.y.maxCoeff() - d.y.minCoeff();
    const RegressionModel m = fit_svr(d, 1.0, range + 1.0, 0.5);
    CHECK(m.svr.coef.size() == 0);
    const Eigen::VectorXd p = m.predict_unclamped(d.X);
    CHECK(p.maxCoeff() - p.minCoeff() < 1e-12);
  }

  TEST_CASE("svr iteration cap raises ConvergenceError") {
    const Dataset d = linear(6, 100);
    SvrOptions o;
    o.max_iterations = 3;
    CHECK_THROWS_AS(fit_svr(d, 10.0, 0.001, 0.5, o), ConvergenceError);
  }

  TEST_CASE("forward selection") {
    int first = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(1000 + seed);
      Eigen::MatrixXd X(100, 10);
      Eigen::VectorXd y(100);
      const Eigen::Index informative = static_cast<Eigen::Index>(seed % 10);
      for (Eigen::Index i = 0; i < 100; ++i) {
        for (Eigen::Index j = 0; j < 10; ++j) X(i, j) = rng.normal();
        y(i) = 0.5 + 0.1 * X(i, informative) + 0.05 * rng.normal();
      }
      const SelectionResult r = forward_select(make(X, y));
      first += !r.selected.empty() && r.selected[0] == informative;
    }
    CHECK(first >= 95);

    ForwardSelectOptions cap1;
    cap1.cap = 1;
    CHECK(forward_select(linear(7, 80, 5), cap1).selected.size() == 1);

    // Duplicated columns: only the lower index of each pair can be chosen.
    Dataset d = linear(8, 120, 0, 0.001);
    Eigen::MatrixXd dup(d.rows(), 4);
    dup << d.X.col(0), d.X.col(0), d.X.col(1), d.X.col(1);
    const SelectionResult r = forward_select(make(dup, d.y));
    CHECK(r.selected.size() == 2);
    CHECK(std::find(r.selected.begin(), r.selected.end(), 0) != r.selected.end());
    CHECK(std::find(r.selected.begin(), r.selected.end(), 2) != r.selected.end());
  }

  TEST_CASE("pls") {
    const Dataset one = linear(9, 40);
    const Dataset single = one.subset_cols(std::vector<Eigen::Index>{0});
    const RegressionModel p1 = fit_pls(single, 1);
    const RegressionModel ls = fit_ridge(single, 0.0);
    CHECK((p1.predict_unclamped(single.X) - ls.predict_unclamped(single.X)).cwiseAbs().maxCoeff() < 1e-9);

    const Dataset d = linear(10, 60, 3);
    const RegressionModel full = fit_pls(d, static_cast<int>(d.cols()));
    const RegressionModel ols = fit_ridge(d, 0.0);
    CHECK((full.predict_unclamped(d.X) - ols.predict_unclamped(d.X)).cwiseAbs().maxCoeff() < 1e-6);

    const Eigen::MatrixXd Z = Standardizer::fit(d.X).apply(d.X);
    const PlsProjection proj = solve_pls(Z, d.y, 4);
    const Eigen::MatrixXd T = proj.transform(Z);
    for (int a = 0; a < proj.components; ++a) {
      for (int b = a + 1; b < proj.components; ++b) CHECK(std::abs(T.col(a).dot(T.col(b))) < 1e-8);
    }
    const RegressionModel capped = fit_pls(d.subset_rows(std::vector<Eigen::Index>{0, 1, 2}), 5);
    CHECK(capped.pls.components <= 2);
    CHECK(!capped.metadata.notes.empty());
  }

  TEST_CASE("select_model") {
    const Dataset d = linear(11, 50);
    const RegressionModel good = fit_ridge(d);
    RegressionModel bad = good;
    bad.ridge.intercept += 0.2;
    CHECK(select_model({good}, d).ridge.intercept == good.ridge.intercept);
    CHECK(select_model({bad, good}, d).ridge.intercept == good.ridge.intercept);
    CHECK_THROWS_AS(select_model({}, d), ArgumentError);

    // Identical predictions, 158 inputs versus 4 selected ones.
    Dataset wide = make(Eigen::MatrixXd::Random(20, 158), Eigen::VectorXd::LinSpaced(20, 0, 1));
    RegressionModel all;
    all.feature_names = wide.names;
    all.scaler = Standardizer::fit(wide.X);
    all.ridge.intercept = 0.5;
    all.ridge.coef = Eigen::VectorXd::Zero(158);
    RegressionModel four = all;
    four.preprocessing = Preprocessing::kForwardSelection;
    four.mask = {0, 1, 2, 3};
    four.ridge.coef = Eigen::VectorXd::Zero(4);
    CHECK(select_model({all, four}, wide).dim() == 4);
    RegressionModel tree = four;
    tree.kind = ModelKind::kTree;
    tree.tree.nodes = {TreeNode{-1, 0, 0.5, -1, -1}};
    CHECK(select_model({tree, four}, wide).kind == ModelKind::kRidge);
  }

  TEST_CASE("feature scaling does not change predictions") {
    const Dataset d = linear(12, 80, 2);
    Dataset scaled = d;
    scaled.X.col(1) *= 250.0;
    scaled.X.col(3) *= 0.01;
    for (const Preprocessing prep : {Preprocessing::kNone, Preprocessing::kForwardSelection, Preprocessing::kPls}) {
      for (const ModelKind kind : {ModelKind::kRidge, ModelKind::kTree}) {
        PipelineOptions o;
        const CandidateSpec spec{kind, prep};
        const RegressionModel a = fit_candidate(d, spec, o);
        const RegressionModel b = fit_candidate(scaled, spec, o);
        CHECK((a.predict(d.X) - b.predict(scaled.X)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(a.mask == b.mask);
      }
    }
  }

  TEST_CASE("predictions are clamped and clamping never raises MAE") {
    const Dataset d = linear(13, 60, 0, 0.3);
    const RegressionModel m = fit_ridge(d);
    const Eigen::VectorXd raw = m.predict_unclamped(d.X), clamped = m.predict(d.X);
    CHECK(clamped.minCoeff() >= 0);
    CHECK(clamped.maxCoeff() <= 1);
    Eigen::VectorXd y = d.y.cwiseMax(0.0).cwiseMin(1.0);
    CHECK(evaluate(clamped, y).mae <= evaluate(raw, y).mae);
  }

  TEST_CASE("model files round trip and refuse other feature sets") {
    const Dataset d = linear(14, 60, 2);
    for (const ModelKind kind : {ModelKind::kRidge, ModelKind::kTree, ModelKind::kSvr}) {
      for (const Preprocessing prep : {Preprocessing::kNone, Preprocessing::kForwardSelection, Preprocessing::kPls}) {
        PipelineOptions o;
        const RegressionModel m = fit_candidate(d, {kind, prep}, o);
        const std::string json = model_to_json(m);
        const RegressionModel back = model_from_json(json);
        CHECK(model_to_json(back) == json);
        CHECK(back.name() == m.name());
        CHECK((back.predict(d) - m.predict(d)).cwiseAbs().maxCoeff() == 0.0);
      }
    }
    Dataset renamed = d;
    renamed.names[0] = "other";
    CHECK_THROWS_AS(fit_ridge(d).predict(renamed), DataError);
    CHECK_THROWS_AS(model_from_json("{}"), DataError);
    CHECK_THROWS_AS(model_from_json("not json"), DataError);
  }

  TEST_CASE("pipeline is deterministic and names follow the table") {
    const Dataset d = linear(15, 120, 4);
    PipelineOptions o;
    o.threads = 2;
    const PipelineResult a = train_pipeline(d, o);
    o.threads = 1;
    const PipelineResult b = train_pipeline(d, o);
    CHECK(model_to_json(a.model) == model_to_json(b.model));
    CHECK(a.candidates.size() == 9);
    std::vector<std::string> names;
    for (const auto& c : a.candidates) names.push_back(c.name);
    CHECK(names == std::vector<std::string>{"RR", "TREE", "SVR", "RR-FS", "TREE-FS", "SVR-FS", "RR-PLS", "TREE-PLS",
                                            "SVR-PLS"});
    double best = HUGE_VAL;
    for (const auto& c : a.candidates) best = std::min(best, c.validation_rmse);
    CHECK(a.model.metadata.hyperparameters.at("validation_rmse") == best);
    CHECK(a.model.dim() <= static_cast<std::size_t>(d.cols()));
  }

  TEST_CASE("dataset validation") {
    Dataset d = linear(16, 10);
    d.names[1] = d.names[0];
    CHECK_THROWS_AS(d.validate(), DataError);
    d = linear(16, 10);
    d.X(0, 0) = std::nan("");
    CHECK_THROWS_AS(d.validate(), DataError);
  }
}
