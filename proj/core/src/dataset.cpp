#include <algorithm>
#include <cmath>
#include <set>

#include "ppp/errors.hpp"
#include "ppp/regression.hpp"

namespace ppp {

void Dataset::validate() const {
  if (X.rows() != y.size()) {
    throw DataError("dataset '" + id + "': " + std::to_string(X.rows()) + " feature rows but " +
                    std::to_string(y.size()) + " targets");
  }
  if (static_cast<std::size_t>(X.cols()) != names.size()) {
    throw DataError("dataset '" + id + "': " + std::to_string(X.cols()) + " columns but " +
                    std::to_string(names.size()) + " names");
  }
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw DataError("dataset '" + id + "': duplicate feature name '" + n + "'");
  }
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (!std::isfinite(X(i, j))) {
        throw DataError("dataset '" + id + "': non-finite value in row " + std::to_string(i) + ", feature '" +
                        names[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y(i))) throw DataError("dataset '" + id + "': non-finite target in row " + std::to_string(i));
  }
}

Dataset Dataset::subset_rows(std::span<const Eigen::Index> rows) const {
  Dataset out;
  out.names = names;
  out.id = id;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.X.row(r) = X.row(rows[i]);
    out.y(r) = y(rows[i]);
  }
  return out;
}

Dataset Dataset::subset_cols(std::span<const Eigen::Index> cols) const {
  Dataset out;
  out.id = id;
  out.y = y;
  out.X.resize(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
    out.names.push_back(names[static_cast<std::size_t>(cols[j])]);
  }
  return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  const auto n = X.rows();
  s.mean = n > 0 ? Eigen::RowVectorXd(X.colwise().mean()) : Eigen::RowVectorXd::Zero(X.cols());
  s.scale = Eigen::RowVectorXd::Ones(X.cols());
  if (n < 2) return s;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - s.mean(j)).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    // Relative threshold so that columns constant up to rounding still count
    // as constant.
    if (sd > 1e-12 * std::max(1.0, std::abs(s.mean(j)))) s.scale(j) = sd;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.size()) throw DataError("standardizer expects " + std::to_string(mean.size()) + " columns");
  return (X.rowwise() - mean).array().rowwise() / scale.array();
}

EvalReport evaluate(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size()) throw DataError("prediction and target counts differ");
  if (targets.size() == 0) throw ArgumentError("cannot evaluate on an empty set");
  const auto n = static_cast<double>(targets.size());
  const Eigen::ArrayXd err = (predictions - targets).array();

  EvalReport rep;
  rep.rmse = std::sqrt(err.square().sum() / n);
  rep.mae = err.abs().sum() / n;

  // Constancy is tested on the values themselves: a constant vector's mean
  // can be off by an ulp, which would leave tiny nonzero deviations.
  const bool flat_targets = targets.minCoeff() == targets.maxCoeff();
  const bool flat_predictions = predictions.minCoeff() == predictions.maxCoeff();
  const double ybar = targets.mean();
  const double denom = (targets.array() - ybar).abs().sum();
  if (!flat_targets) rep.rae = err.abs().sum() / denom;

  const Eigen::ArrayXd dp = predictions.array() - predictions.mean();
  const Eigen::ArrayXd dy = targets.array() - ybar;
  const double spp = dp.square().sum();
  const double syy = dy.square().sum();
  if (!flat_targets && !flat_predictions) rep.r = std::clamp((dp * dy).sum() / std::sqrt(spp * syy), -1.0, 1.0);
  return rep;
}

std::vector<std::vector<Eigen::Index>> cv_folds(Eigen::Index n, int k) {
  if (k < 2) throw ArgumentError("cross-validation needs at least 2 folds");
  if (n < k) throw ArgumentError("cross-validation with " + std::to_string(k) + " folds needs at least " +
                                 std::to_string(k) + " rows, got " + std::to_string(n));
  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) folds[static_cast<std::size_t>(i % k)].push_back(i);
  return folds;
}

std::vector<Eigen::Index> complement(const std::vector<Eigen::Index>& rows, Eigen::Index n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (auto r : rows) in[static_cast<std::size_t>(r)] = 1;
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n) - rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

}  // namespace ppp
