#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <thread>

#include "ppp/errors.hpp"
#include "ppp/regression.hpp"

namespace ppp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(rows[i]);
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

Eigen::MatrixXd take_cols(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(M.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = M.col(cols[j]);
  return out;
}

int fold_count(Eigen::Index n, const CvOptions& cv) {
  if (cv.folds < 2) throw ArgumentError("cross-validation needs at least 2 folds");
  return static_cast<int>(std::min<Eigen::Index>(cv.folds, n));
}

struct Split {
  std::vector<Eigen::Index> train, test;
};

std::vector<Split> make_splits(Eigen::Index n, const CvOptions& cv) {
  if (n < 2) throw ArgumentError("cross-validation needs at least 2 rows");
  std::vector<Split> out;
  for (auto& fold : cv_folds(n, fold_count(n, cv))) {
    Split s;
    s.train = complement(fold, n);
    s.test = std::move(fold);
    out.push_back(std::move(s));
  }
  return out;
}

// Pooled RMSE of out-of-fold predictions.
double cv_rmse(const std::vector<Split>& splits, const Eigen::VectorXd& y,
               const std::function<Eigen::VectorXd(const Split&)>& fit_predict) {
  double sse = 0;
  Eigen::Index n = 0;
  for (const auto& s : splits) {
    const Eigen::VectorXd p = fit_predict(s);
    for (std::size_t i = 0; i < s.test.size(); ++i) {
      const double e = p(static_cast<Eigen::Index>(i)) - y(s.test[i]);
      sse += e * e;
    }
    n += static_cast<Eigen::Index>(s.test.size());
  }
  return std::sqrt(sse / static_cast<double>(n));
}

std::vector<double> ridge_grid() {
  std::vector<double> g;
  for (int k = -8; k <= 8; ++k) g.push_back(std::pow(10.0, k / 2.0));
  return g;
}

// Per-fold centered Gram matrices, reused across lambdas and feature subsets.
struct FoldGram {
  Eigen::RowVectorXd zbar;
  double ybar = 0;
  Eigen::MatrixXd G;
  Eigen::VectorXd c;
};

std::vector<FoldGram> fold_grams(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const std::vector<Split>& splits) {
  std::vector<FoldGram> out;
  for (const auto& s : splits) {
    FoldGram g;
    const Eigen::MatrixXd Zt = take_rows(Z, s.train);
    const Eigen::VectorXd yt = take(y, s.train);
    g.zbar = Zt.colwise().mean();
    g.ybar = yt.mean();
    const Eigen::MatrixXd Zc = Zt.rowwise() - g.zbar;
    g.G = Zc.transpose() * Zc;
    g.c = Zc.transpose() * (yt.array() - g.ybar).matrix();
    out.push_back(std::move(g));
  }
  return out;
}

double ridge_cv_from_grams(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const std::vector<Split>& splits,
                           const std::vector<FoldGram>& grams, const std::vector<Eigen::Index>& cols, double lambda) {
  double sse = 0;
  Eigen::Index n = 0;
  const auto k = static_cast<Eigen::Index>(cols.size());
  for (std::size_t f = 0; f < splits.size(); ++f) {
    const auto& g = grams[f];
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    if (k > 0) {
      Eigen::MatrixXd A(k, k);
      Eigen::VectorXd b(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        b(a) = g.c(cols[static_cast<std::size_t>(a)]);
        for (Eigen::Index c = 0; c < k; ++c) A(a, c) = g.G(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(c)]);
      }
      A.diagonal().array() += lambda;
      beta = lambda > 0 ? Eigen::VectorXd(A.ldlt().solve(b)) : Eigen::VectorXd(A.completeOrthogonalDecomposition().solve(b));
    }
    for (auto r : splits[f].test) {
      double p = g.ybar;
      for (Eigen::Index a = 0; a < k; ++a) {
        const auto c = cols[static_cast<std::size_t>(a)];
        p += (Z(r, c) - g.zbar(c)) * beta(a);
      }
      sse += (p - y(r)) * (p - y(r));
      ++n;
    }
  }
  return std::sqrt(sse / static_cast<double>(n));
}

std::vector<Eigen::Index> all_columns(Eigen::Index d) {
  std::vector<Eigen::Index> c(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) c[static_cast<std::size_t>(j)] = j;
  return c;
}

double tune_ridge_lambda(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const CvOptions& cv) {
  const auto splits = make_splits(Z.rows(), cv);
  const auto grams = fold_grams(Z, y, splits);
  const auto cols = all_columns(Z.cols());
  double best = kInf, best_lambda = 1.0;
  for (double lambda : ridge_grid()) {
    const double e = ridge_cv_from_grams(Z, y, splits, grams, cols, lambda);
    if (e < best - 1e-12) {
      best = e;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

struct TreeParams {
  int depth = 4;
  int min_leaf = 5;
};

TreeParams tune_tree(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const CvOptions& cv) {
  const auto splits = make_splits(Z.rows(), cv);
  Eigen::Index smallest = Z.rows();
  for (const auto& s : splits) smallest = std::min<Eigen::Index>(smallest, static_cast<Eigen::Index>(s.train.size()));
  double best = kInf;
  TreeParams chosen{0, 1};
  for (int depth : {2, 3, 4, 5, 6, 8}) {
    for (int leaf : {5, 10, 20}) {
      if (leaf > smallest) continue;
      const double e = cv_rmse(splits, y, [&](const Split& s) {
        const RegressionTree t = grow_tree(take_rows(Z, s.train), take(y, s.train), depth, leaf);
        Eigen::VectorXd p(static_cast<Eigen::Index>(s.test.size()));
        for (std::size_t i = 0; i < s.test.size(); ++i) p(static_cast<Eigen::Index>(i)) = t.predict(Z.row(s.test[i]));
        return p;
      });
      if (e < best - 1e-12) {
        best = e;
        chosen = {depth, leaf};
      }
    }
  }
  return chosen;
}

double population_sd(const Eigen::VectorXd& y) {
  return std::sqrt((y.array() - y.mean()).square().sum() / static_cast<double>(y.size()));
}

struct SvrParams {
  double C = 1, epsilon = 0.1, gamma = 1;
};

double default_epsilon(const Eigen::VectorXd& y) {
  const double sd = population_sd(y);
  return sd > 0 ? 0.1 * sd : 0.01;
}

SvrParams tune_svr(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const CvOptions& cv, const SvrOptions& opt) {
  const auto splits = make_splits(Z.rows(), cv);
  const Eigen::MatrixXd D = squared_distances(Z, Z);
  const double d = static_cast<double>(std::max<Eigen::Index>(1, Z.cols()));
  const double eps = default_epsilon(y);
  double best = kInf;
  SvrParams chosen{1, eps, 1 / d};
  std::string last_error;
  for (double C : {1.0, 10.0}) {
    for (double g : {0.1 / d, 1.0 / d}) {
      double e;
      try {
        e = cv_rmse(splits, y, [&](const Split& s) {
          Eigen::MatrixXd K(static_cast<Eigen::Index>(s.train.size()), static_cast<Eigen::Index>(s.train.size()));
          for (std::size_t a = 0; a < s.train.size(); ++a) {
            for (std::size_t b = 0; b < s.train.size(); ++b) {
              K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = std::exp(-g * D(s.train[a], s.train[b]));
            }
          }
          const SvrFit fit = solve_svr_kernel(take_rows(Z, s.train), K, take(y, s.train), C, eps, g, opt);
          Eigen::VectorXd p(static_cast<Eigen::Index>(s.test.size()));
          for (std::size_t i = 0; i < s.test.size(); ++i) p(static_cast<Eigen::Index>(i)) = fit.predict(Z.row(s.test[i]));
          return p;
        });
      } catch (const ConvergenceError& err) {
        last_error = err.what();
        continue;
      }
      if (e < best - 1e-12) {
        best = e;
        chosen = {C, eps, g};
      }
    }
  }
  if (!std::isfinite(best)) throw ConvergenceError("no SVR grid point converged: " + last_error);
  return chosen;
}

int tune_pls_components(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, int max_components, const CvOptions& cv) {
  const auto splits = make_splits(Z.rows(), cv);
  std::vector<double> sse(static_cast<std::size_t>(max_components) + 1, 0.0);
  int usable = max_components;
  for (const auto& s : splits) {
    const Eigen::MatrixXd Zt = take_rows(Z, s.train);
    const int limit = static_cast<int>(std::min<Eigen::Index>(Zt.rows() - 1, Zt.cols()));
    const PlsProjection p = solve_pls(Zt, take(y, s.train), std::max(1, std::min(max_components, limit)));
    usable = std::min(usable, std::max(p.components, 1));
    const Eigen::MatrixXd T = p.transform(take_rows(Z, s.test));
    for (std::size_t i = 0; i < s.test.size(); ++i) {
      double pred = p.y_mean;
      for (int a = 0; a <= max_components; ++a) {
        if (a > 0 && a <= p.components) pred += T(static_cast<Eigen::Index>(i), a - 1) * p.y_loadings(a - 1);
        const double e = pred - y(s.test[i]);
        sse[static_cast<std::size_t>(a)] += e * e;
      }
    }
  }
  int best_a = 1;
  for (int a = 2; a <= usable; ++a) {
    if (sse[static_cast<std::size_t>(a)] < sse[static_cast<std::size_t>(best_a)] * (1 - 1e-12)) best_a = a;
  }
  return best_a;
}

// Shared front half of every model: scaler plus FS / PLS stage.
RegressionModel prepare(const Dataset& train, Preprocessing prep, const std::vector<Eigen::Index>& mask,
                        int pls_components) {
  train.validate();
  if (train.rows() < 2) throw ArgumentError("training needs at least 2 rows");
  RegressionModel m;
  m.preprocessing = prep;
  m.feature_names = train.names;
  m.scaler = Standardizer::fit(train.X);
  m.metadata.training_set = train.id;
  m.metadata.dim_initial = static_cast<std::size_t>(train.cols());
  if (prep == Preprocessing::kForwardSelection) {
    if (mask.empty()) throw ArgumentError("forward-selection model needs a non-empty mask");
    m.mask = mask;
  } else if (prep == Preprocessing::kPls) {
    const Eigen::MatrixXd Z = m.scaler.apply(train.X);
    m.pls = solve_pls(Z, train.y, pls_components);
    if (m.pls.components == 0) throw DataError("PLS found no component correlated with the target");
    if (m.pls.components < pls_components) {
      m.metadata.notes.push_back("PLS components reduced from " + std::to_string(pls_components) + " to " +
                                 std::to_string(m.pls.components));
    }
    m.score_scaler = Standardizer::fit(m.pls.transform(Z));
    m.metadata.hyperparameters["components"] = m.pls.components;
    m.metadata.hyperparameters["components_requested"] = pls_components;
  }
  return m;
}

void finalize(RegressionModel& m) { m.metadata.dim = m.dim(); }

void fit_learner(RegressionModel& m, const Eigen::MatrixXd& F, const Eigen::VectorXd& y, double lambda, TreeParams tp,
                 SvrParams sp, const SvrOptions& opt) {
  switch (m.kind) {
    case ModelKind::kRidge:
      m.ridge = solve_ridge(F, y, lambda);
      m.metadata.hyperparameters["lambda"] = lambda;
      if (m.ridge.intercept_only) m.metadata.notes.push_back("constant target: intercept-only model");
      break;
    case ModelKind::kTree:
      m.tree = grow_tree(F, y, tp.depth, tp.min_leaf);
      m.metadata.hyperparameters["max_depth"] = tp.depth;
      m.metadata.hyperparameters["min_leaf"] = tp.min_leaf;
      break;
    case ModelKind::kSvr:
      m.svr = solve_svr(F, y, sp.C, sp.epsilon, sp.gamma, opt);
      m.metadata.hyperparameters["C"] = sp.C;
      m.metadata.hyperparameters["epsilon"] = sp.epsilon;
      m.metadata.hyperparameters["gamma"] = sp.gamma;
      m.metadata.hyperparameters["svr_iterations"] = static_cast<double>(m.svr.iterations);
      m.metadata.hyperparameters["svr_duality_gap"] = m.svr.duality_gap();
      break;
  }
  finalize(m);
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::kRidge: return "ridge";
    case ModelKind::kTree: return "tree";
    case ModelKind::kSvr: return "svr";
  }
  return "ridge";
}

std::string_view to_string(Preprocessing prep) noexcept {
  switch (prep) {
    case Preprocessing::kNone: return "none";
    case Preprocessing::kForwardSelection: return "fs";
    case Preprocessing::kPls: return "pls";
  }
  return "none";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "ridge" || text == "rr" || text == "RR") return ModelKind::kRidge;
  if (text == "tree" || text == "TREE") return ModelKind::kTree;
  if (text == "svr" || text == "SVR") return ModelKind::kSvr;
  throw ArgumentError("unknown model kind '" + std::string(text) + "' (expected ridge, tree or svr)");
}

Preprocessing parse_preprocessing(std::string_view text) {
  if (text == "none") return Preprocessing::kNone;
  if (text == "fs" || text == "FS") return Preprocessing::kForwardSelection;
  if (text == "pls" || text == "PLS") return Preprocessing::kPls;
  throw ArgumentError("unknown preprocessing '" + std::string(text) + "' (expected none, fs or pls)");
}

std::string RegressionModel::name() const {
  std::string n = kind == ModelKind::kRidge ? "RR" : kind == ModelKind::kTree ? "TREE" : "SVR";
  if (preprocessing == Preprocessing::kForwardSelection) n += "-FS";
  if (preprocessing == Preprocessing::kPls) n += "-PLS";
  return n;
}

std::size_t RegressionModel::dim() const {
  switch (preprocessing) {
    case Preprocessing::kForwardSelection: return mask.size();
    case Preprocessing::kPls: return static_cast<std::size_t>(pls.components);
    case Preprocessing::kNone: break;
  }
  return feature_names.size();
}

Eigen::MatrixXd RegressionModel::features(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != feature_names.size()) {
    throw DataError("model expects " + std::to_string(feature_names.size()) + " features, got " +
                    std::to_string(X.cols()));
  }
  const Eigen::MatrixXd Z = scaler.apply(X);
  switch (preprocessing) {
    case Preprocessing::kForwardSelection: return take_cols(Z, mask);
    case Preprocessing::kPls: return score_scaler.apply(pls.transform(Z));
    case Preprocessing::kNone: break;
  }
  return Z;
}

Eigen::VectorXd RegressionModel::predict_unclamped(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd F = features(X);
  Eigen::VectorXd out(F.rows());
  for (Eigen::Index i = 0; i < F.rows(); ++i) {
    switch (kind) {
      case ModelKind::kRidge: out(i) = ridge.predict(F.row(i)); break;
      case ModelKind::kTree: out(i) = tree.predict(F.row(i)); break;
      case ModelKind::kSvr: out(i) = svr.predict(F.row(i)); break;
    }
  }
  return out;
}

Eigen::VectorXd RegressionModel::predict(const Eigen::MatrixXd& X) const {
  return predict_unclamped(X).cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::VectorXd RegressionModel::predict(const Dataset& data) const {
  if (data.names != feature_names) {
    std::string detail;
    if (data.names.size() != feature_names.size()) {
      detail = std::to_string(data.names.size()) + " features vs " + std::to_string(feature_names.size()) + " in model";
    } else {
      for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (data.names[j] != feature_names[j]) {
          detail = "column " + std::to_string(j + 1) + " is '" + data.names[j] + "', model expects '" +
                   feature_names[j] + "'";
          break;
        }
      }
    }
    throw DataError("feature names of '" + data.id + "' do not match the model: " + detail);
  }
  return predict(data.X);
}

Eigen::VectorXd RegressionModel::input_coefficients() const {
  if (kind != ModelKind::kRidge || preprocessing != Preprocessing::kNone) {
    throw ArgumentError("input-space coefficients exist only for plain ridge models");
  }
  return (ridge.coef.array() / scaler.scale.transpose().array()).matrix();
}

double RegressionModel::input_intercept() const {
  const Eigen::VectorXd b = input_coefficients();
  return ridge.intercept - scaler.mean.dot(b);
}

EvalReport evaluate(const RegressionModel& model, const Dataset& test) { return evaluate(model.predict(test), test.y); }

RegressionModel fit_ridge(const Dataset& train, std::optional<double> lambda, const CvOptions& cv) {
  RegressionModel m = prepare(train, Preprocessing::kNone, {}, 0);
  m.kind = ModelKind::kRidge;
  const Eigen::MatrixXd F = m.features(train.X);
  const double l = lambda ? *lambda : tune_ridge_lambda(F, train.y, cv);
  fit_learner(m, F, train.y, l, {}, {}, {});
  return m;
}

RegressionModel fit_tree(const Dataset& train, int max_depth, int min_leaf) {
  RegressionModel m = prepare(train, Preprocessing::kNone, {}, 0);
  m.kind = ModelKind::kTree;
  fit_learner(m, m.features(train.X), train.y, 0, {max_depth, min_leaf}, {}, {});
  return m;
}

RegressionModel fit_tree_cv(const Dataset& train, const CvOptions& cv) {
  RegressionModel m = prepare(train, Preprocessing::kNone, {}, 0);
  m.kind = ModelKind::kTree;
  const Eigen::MatrixXd F = m.features(train.X);
  fit_learner(m, F, train.y, 0, tune_tree(F, train.y, cv), {}, {});
  return m;
}

RegressionModel fit_svr(const Dataset& train, double C, double epsilon, double gamma, const SvrOptions& options) {
  RegressionModel m = prepare(train, Preprocessing::kNone, {}, 0);
  m.kind = ModelKind::kSvr;
  fit_learner(m, m.features(train.X), train.y, 0, {}, {C, epsilon, gamma}, options);
  return m;
}

RegressionModel fit_svr_cv(const Dataset& train, const CvOptions& cv, const SvrOptions& options) {
  RegressionModel m = prepare(train, Preprocessing::kNone, {}, 0);
  m.kind = ModelKind::kSvr;
  const Eigen::MatrixXd F = m.features(train.X);
  fit_learner(m, F, train.y, 0, {}, tune_svr(F, train.y, cv, options), options);
  return m;
}

RegressionModel fit_pls(const Dataset& train, std::optional<int> components, const CvOptions& cv) {
  train.validate();
  int a;
  if (components) {
    a = *components;
  } else {
    const Eigen::MatrixXd Z = Standardizer::fit(train.X).apply(train.X);
    a = tune_pls_components(Z, train.y, static_cast<int>(std::max<Eigen::Index>(1, train.cols())), cv);
  }
  RegressionModel m = prepare(train, Preprocessing::kPls, {}, a);
  m.kind = ModelKind::kRidge;
  fit_learner(m, m.features(train.X), train.y, 0, {}, {}, {});
  return m;
}

SelectionResult forward_select(const Dataset& train, const ForwardSelectOptions& options) {
  train.validate();
  const Eigen::MatrixXd Z = Standardizer::fit(train.X).apply(train.X);
  const auto splits = make_splits(Z.rows(), options.cv);
  const auto grams = fold_grams(Z, train.y, splits);

  SelectionResult res;
  std::vector<Eigen::Index> chosen;
  std::vector<char> used(static_cast<std::size_t>(Z.cols()), 0);
  // Orthonormal basis of the chosen columns. A column inside their span adds
  // no information; ridge would still reward splitting weight across copies.
  Eigen::MatrixXd basis(Z.rows(), 0);
  const auto redundant = [&](Eigen::Index j) {
    const double norm2 = Z.col(j).squaredNorm();
    if (norm2 == 0) return true;
    const Eigen::VectorXd r = Z.col(j) - basis * (basis.transpose() * Z.col(j));
    return r.squaredNorm() <= 1e-10 * norm2;
  };
  double current = ridge_cv_from_grams(Z, train.y, splits, grams, chosen, options.ridge_lambda);
  res.baseline_rmse = current;
  while (chosen.size() < options.cap) {
    double best = kInf;
    Eigen::Index best_j = -1;
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (redundant(j)) {
        used[static_cast<std::size_t>(j)] = 1;
        continue;
      }
      chosen.push_back(j);
      const double e = ridge_cv_from_grams(Z, train.y, splits, grams, chosen, options.ridge_lambda);
      chosen.pop_back();
      if (e < best) {
        best = e;
        best_j = j;
      }
    }
    if (best_j < 0 || !(best < current * (1 - options.min_relative_gain))) break;
    chosen.push_back(best_j);
    used[static_cast<std::size_t>(best_j)] = 1;
    Eigen::VectorXd q = Z.col(best_j) - basis * (basis.transpose() * Z.col(best_j));
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = q / q.norm();
    res.selected.push_back(best_j);
    res.cv_rmse.push_back(best);
    current = best;
  }
  return res;
}

RegressionModel fit_candidate(const Dataset& train, const CandidateSpec& spec, const PipelineOptions& options) {
  std::vector<Eigen::Index> mask;
  std::vector<std::string> ranking;
  int components = 0;
  if (spec.preprocessing == Preprocessing::kForwardSelection) {
    const SelectionResult sel = forward_select(train, options.fs);
    mask = sel.selected;
    // With no improving feature keep the single best one so the model is
    // still defined over some input.
    if (mask.empty()) {
      ForwardSelectOptions one = options.fs;
      one.cap = 1;
      one.min_relative_gain = -kInf;
      mask = forward_select(train, one).selected;
    }
    for (auto j : mask) ranking.push_back(train.names[static_cast<std::size_t>(j)]);
  } else if (spec.preprocessing == Preprocessing::kPls) {
    const Eigen::MatrixXd Z = Standardizer::fit(train.X).apply(train.X);
    const int cap = std::max(1, std::min<int>(options.max_pls_components, static_cast<int>(train.cols())));
    components = tune_pls_components(Z, train.y, cap, options.cv);
  }

  RegressionModel m = prepare(train, spec.preprocessing, mask, components);
  m.kind = spec.kind;
  m.metadata.setting = options.setting;
  m.metadata.fs_ranking = ranking;
  const Eigen::MatrixXd F = m.features(train.X);
  switch (spec.kind) {
    case ModelKind::kRidge: fit_learner(m, F, train.y, tune_ridge_lambda(F, train.y, options.cv), {}, {}, {}); break;
    case ModelKind::kTree: fit_learner(m, F, train.y, 0, tune_tree(F, train.y, options.cv), {}, {}); break;
    case ModelKind::kSvr:
      try {
        fit_learner(m, F, train.y, 0, {}, tune_svr(F, train.y, options.cv, options.svr), options.svr);
      } catch (const ConvergenceError& err) {
        m.kind = ModelKind::kRidge;
        m.metadata.hyperparameters.clear();
        if (spec.preprocessing == Preprocessing::kPls) m.metadata.hyperparameters["components"] = m.pls.components;
        m.metadata.notes.push_back(std::string("SVR fell back to ridge: ") + err.what());
        fit_learner(m, F, train.y, tune_ridge_lambda(F, train.y, options.cv), {}, {}, {});
      }
      break;
  }
  return m;
}

RegressionModel refit(const RegressionModel& model, const Dataset& train, const SvrOptions& svr) {
  if (train.names != model.feature_names) throw DataError("refit: feature names differ from the model's");
  const auto hp = [&](const char* key) {
    const auto it = model.metadata.hyperparameters.find(key);
    if (it == model.metadata.hyperparameters.end()) throw DataError(std::string("refit: model lacks '") + key + "'");
    return it->second;
  };
  const int components = model.preprocessing == Preprocessing::kPls ? model.pls.components : 0;
  RegressionModel m = prepare(train, model.preprocessing, model.mask, components);
  m.kind = model.kind;
  m.metadata.setting = model.metadata.setting;
  m.metadata.fs_ranking = model.metadata.fs_ranking;
  for (const auto& n : model.metadata.notes) {
    if (n.rfind("PLS components reduced", 0) != 0) m.metadata.notes.push_back(n);
  }
  const Eigen::MatrixXd F = m.features(train.X);
  switch (model.kind) {
    case ModelKind::kRidge: fit_learner(m, F, train.y, hp("lambda"), {}, {}, {}); break;
    case ModelKind::kTree:
      fit_learner(m, F, train.y, 0, {static_cast<int>(hp("max_depth")), static_cast<int>(hp("min_leaf"))}, {}, {});
      break;
    case ModelKind::kSvr:
      try {
        fit_learner(m, F, train.y, 0, {}, {hp("C"), hp("epsilon"), hp("gamma")}, svr);
      } catch (const ConvergenceError& err) {
        m.kind = ModelKind::kRidge;
        m.metadata.notes.push_back(std::string("SVR fell back to ridge: ") + err.what());
        fit_learner(m, F, train.y, tune_ridge_lambda(F, train.y, {}), {}, {}, {});
      }
      break;
  }
  return m;
}

const RegressionModel& select_model(const std::vector<RegressionModel>& candidates, const Dataset& validation) {
  if (candidates.empty()) throw ArgumentError("select_model needs at least one candidate");
  std::size_t best = 0;
  double best_rmse = kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double e = evaluate(candidates[i], validation).rmse;
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    bool better;
    if (i == 0 || e < best_rmse - 1e-12) {
      better = true;
    } else if (std::abs(e - best_rmse) <= 1e-12) {
      better = c.dim() < b.dim() || (c.dim() == b.dim() && static_cast<int>(c.kind) < static_cast<int>(b.kind));
    } else {
      better = false;
    }
    if (better) {
      best = i;
      best_rmse = e;
    }
  }
  return candidates[best];
}

PipelineResult train_pipeline(const Dataset& train, const PipelineOptions& options) {
  train.validate();
  if (train.rows() < 10) throw ArgumentError("the training pipeline needs at least 10 rows");
  std::vector<Eigen::Index> fit_rows, val_rows;
  for (Eigen::Index i = 0; i < train.rows(); ++i) (i % 5 == 4 ? val_rows : fit_rows).push_back(i);
  const Dataset fit_part = train.subset_rows(fit_rows);
  const Dataset val_part = train.subset_rows(val_rows);

  std::vector<CandidateSpec> specs;
  for (auto p : options.preprocessing) {
    for (auto k : options.kinds) specs.push_back({k, p});
  }
  if (specs.empty()) throw ArgumentError("no candidate models configured");

  std::vector<RegressionModel> models(specs.size());
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(specs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) models[i] = fit_candidate(fit_part, specs[i], options);
  } else {
    // Fixed assignment of candidates to workers; results land in fixed slots.
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < threads; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < specs.size(); i += threads) models[i] = fit_candidate(fit_part, specs[i], options);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  PipelineResult res;
  for (const auto& m : models) res.candidates.push_back({m.name(), evaluate(m, val_part).rmse});
  const RegressionModel& winner = select_model(models, val_part);
  res.model = refit(winner, train, options.svr);
  res.model.metadata.training_set = train.id;
  res.model.metadata.hyperparameters["validation_rmse"] = evaluate(winner, val_part).rmse;
  return res;
}

}  // namespace ppp
