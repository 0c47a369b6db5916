#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppp {

// Rows are sentences, columns are named features, y holds bracketing F1.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
  std::string id;

  Eigen::Index rows() const noexcept { return X.rows(); }
  Eigen::Index cols() const noexcept { return X.cols(); }

  // Throws DataError on shape mismatch, duplicate names or non-finite values.
  void validate() const;
  Dataset subset_rows(std::span<const Eigen::Index> rows) const;
  Dataset subset_cols(std::span<const Eigen::Index> cols) const;
};

// Per-column mean and scale from training data. Constant columns get unit
// scale.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct EvalReport {
  double r = 0;     // Pearson correlation; 0 when either side is constant
  double rmse = 0;
  double mae = 0;
  std::optional<double> rae;  // unset when the targets are constant
};

// RAE = sum |p_i - y_i| / sum |mean(y) - y_i| with the mean taken over the
// evaluated targets.
EvalReport evaluate(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

// Fold of row i is i mod k.
std::vector<std::vector<Eigen::Index>> cv_folds(Eigen::Index n, int k = 5);
std::vector<Eigen::Index> complement(const std::vector<Eigen::Index>& rows, Eigen::Index n);

// ---- learners on standardized inputs ----------------------------------------

struct RidgeFit {
  double intercept = 0;
  Eigen::VectorXd coef;  // standardized space
  double lambda = 0;
  bool intercept_only = false;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& z) const { return intercept + z.dot(coef); }
};

// Penalized least squares with an unpenalized intercept. lambda = 0 gives
// the minimum-norm least-squares solution.
RidgeFit solve_ridge(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  double value = 0;
  int left = -1;
  int right = -1;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  int max_depth = 0;
  int min_leaf = 1;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

// CART with squared-error splits at midpoints between distinct values.
// Among equally good splits the lowest feature index, then the lowest
// threshold wins.
RegressionTree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_depth, int min_leaf);

struct SvrOptions {
  double tolerance = 1e-3;
  long max_iterations = 10'000'000;
};

struct SvrFit {
  Eigen::MatrixXd support;  // rows are support vectors
  Eigen::VectorXd coef;     // alpha - alpha*
  double rho = 0;           // f(x) = sum coef_i K(s_i, x) - rho
  double C = 1;
  double epsilon = 0.1;
  double gamma = 1;
  long iterations = 0;
  double kkt_violation = 0;  // max violating pair gap at termination
  double primal = 0;
  double dual = 0;

  double duality_gap() const { return primal - dual; }
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& z) const;
};

// epsilon-SVR with RBF kernel exp(-gamma |a-b|^2), solved by SMO with
// second-order working-set selection. Throws ConvergenceError past the
// iteration cap.
SvrFit solve_svr(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double C, double epsilon, double gamma,
                 const SvrOptions& options = {});
// Same, from a precomputed kernel matrix over the rows of Z.
SvrFit solve_svr_kernel(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C,
                        double epsilon, double gamma, const SvrOptions& options = {});

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// PLS1 by NIPALS with deflation, on centered inputs.
struct PlsProjection {
  Eigen::MatrixXd weights;   // W, d x a
  Eigen::MatrixXd loadings;  // P, d x a
  Eigen::MatrixXd rotation;  // R = W (P^T W)^-1, scores T = (Z - x_mean) R
  Eigen::VectorXd y_loadings;  // q
  Eigen::RowVectorXd x_mean;
  double y_mean = 0;
  int requested = 0;
  int components = 0;

  Eigen::MatrixXd transform(const Eigen::MatrixXd& Z) const { return (Z.rowwise() - x_mean) * rotation; }
  // PLS regression prediction y_mean + T q.
  Eigen::VectorXd predict(const Eigen::MatrixXd& Z) const;
};

// Stops early, with fewer components than requested, once the deflated
// inputs or target carry no more signal.
PlsProjection solve_pls(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, int components);

// ---- trained models -----------------------------------------------------------

enum class ModelKind { kRidge = 0, kTree = 1, kSvr = 2 };
enum class Preprocessing { kNone = 0, kForwardSelection = 1, kPls = 2 };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Preprocessing prep) noexcept;
ModelKind parse_model_kind(std::string_view text);
Preprocessing parse_preprocessing(std::string_view text);

struct ModelMetadata {
  std::string provenance;  // producing command and config hash, set by callers
  std::string training_set;
  std::string setting;
  std::size_t dim_initial = 0;  // #dimI
  std::size_t dim = 0;          // #dim after FS / PLS
  std::map<std::string, double> hyperparameters;
  std::vector<std::string> notes;
  std::vector<std::string> fs_ranking;
};

class RegressionModel {
 public:
  ModelKind kind = ModelKind::kRidge;
  Preprocessing preprocessing = Preprocessing::kNone;
  std::vector<std::string> feature_names;
  Standardizer scaler;
  std::vector<Eigen::Index> mask;  // FS: selected input columns, in selection order
  PlsProjection pls;
  Standardizer score_scaler;       // PLS scores are re-standardized
  RidgeFit ridge;
  RegressionTree tree;
  SvrFit svr;
  ModelMetadata metadata;

  // Table-style name: RR, TREE, SVR with -FS / -PLS suffix.
  std::string name() const;
  std::size_t dim() const;

  // Model-space inputs (after scaling and FS / PLS).
  Eigen::MatrixXd features(const Eigen::MatrixXd& X) const;
  // Predictions clamped to [0, 1].
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd predict_unclamped(const Eigen::MatrixXd& X) const;
  // Throws DataError when the dataset's feature names differ.
  Eigen::VectorXd predict(const Dataset& data) const;

  // Ridge coefficients mapped back to the input units (kRidge, kNone only).
  Eigen::VectorXd input_coefficients() const;
  double input_intercept() const;
};

EvalReport evaluate(const RegressionModel& model, const Dataset& test);

// ---- fitting with hyperparameter search ----------------------------------------

struct CvOptions {
  int folds = 5;
};

// lambda unset: chosen by cross-validated RMSE over 10^-4 .. 10^4.
RegressionModel fit_ridge(const Dataset& train, std::optional<double> lambda = std::nullopt, const CvOptions& cv = {});
RegressionModel fit_tree(const Dataset& train, int max_depth, int min_leaf);
// Hyperparameters by cross-validated RMSE over a small grid.
RegressionModel fit_tree_cv(const Dataset& train, const CvOptions& cv = {});
RegressionModel fit_svr(const Dataset& train, double C, double epsilon, double gamma, const SvrOptions& options = {});
RegressionModel fit_svr_cv(const Dataset& train, const CvOptions& cv = {}, const SvrOptions& options = {});

// PLS regression with a fixed component count, or chosen by CV when unset.
RegressionModel fit_pls(const Dataset& train, std::optional<int> components = std::nullopt, const CvOptions& cv = {});

struct SelectionResult {
  std::vector<Eigen::Index> selected;  // in order of addition
  std::vector<double> cv_rmse;         // after each addition
  double baseline_rmse = 0;            // intercept-only
};

struct ForwardSelectOptions {
  std::size_t cap = 20;
  // A feature must lower CV RMSE by more than this fraction to be added.
  double min_relative_gain = 1e-6;
  double ridge_lambda = 1e-3;
  CvOptions cv;
};

// Greedy forward selection by cross-validated RMSE of a lightly penalized
// ridge fit on standardized columns; ties go to the lower column index.
// The same wrapper scorer is used whatever learner consumes the mask.
SelectionResult forward_select(const Dataset& train, const ForwardSelectOptions& options = {});

struct CandidateSpec {
  ModelKind kind = ModelKind::kRidge;
  Preprocessing preprocessing = Preprocessing::kNone;
};

struct PipelineOptions {
  std::vector<ModelKind> kinds = {ModelKind::kRidge, ModelKind::kTree, ModelKind::kSvr};
  std::vector<Preprocessing> preprocessing = {Preprocessing::kNone, Preprocessing::kForwardSelection,
                                              Preprocessing::kPls};
  ForwardSelectOptions fs;
  CvOptions cv;
  SvrOptions svr;
  int max_pls_components = 20;
  std::string setting;
  // Candidates are trained concurrently; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

// Tunes and fits one candidate on `train`.
RegressionModel fit_candidate(const Dataset& train, const CandidateSpec& spec, const PipelineOptions& options);

// Refits the same configuration (hyperparameters, FS mask, PLS component
// count) on new data.
RegressionModel refit(const RegressionModel& model, const Dataset& train, const SvrOptions& svr = {});

// Lowest validation RMSE; ties go to fewer model dimensions, then to the
// kind order ridge < tree < svr. Throws ArgumentError when empty.
const RegressionModel& select_model(const std::vector<RegressionModel>& candidates, const Dataset& validation);

struct CandidateScore {
  std::string name;
  double validation_rmse = 0;
};

struct PipelineResult {
  RegressionModel model;
  std::vector<CandidateScore> candidates;
};

// Candidates are fitted on rows with i mod 5 != 4 and compared on the rest;
// the winner is refitted on every row.
PipelineResult train_pipeline(const Dataset& train, const PipelineOptions& options = {});

// ---- persistence ----------------------------------------------------------------

std::string model_to_json(const RegressionModel& model);
RegressionModel model_from_json(std::string_view text);

}  // namespace ppp
