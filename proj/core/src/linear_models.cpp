#include <algorithm>
#include <cmath>

#include "ppp/errors.hpp"
#include "ppp/regression.hpp"

namespace ppp {

RidgeFit solve_ridge(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda) {
  if (Z.rows() != y.size()) throw DataError("ridge: row count mismatch");
  if (Z.rows() < 2) throw ArgumentError("ridge needs at least 2 rows");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ArgumentError("ridge lambda must be finite and >= 0");

  RidgeFit fit;
  fit.lambda = lambda;
  fit.coef = Eigen::VectorXd::Zero(Z.cols());
  const double ybar = y.mean();
  fit.intercept = ybar;
  const Eigen::VectorXd yc = y.array() - ybar;
  if (yc.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, std::abs(ybar))) {
    fit.intercept_only = true;
    return fit;
  }
  if (Z.cols() == 0) return fit;

  const Eigen::RowVectorXd zbar = Z.colwise().mean();
  const Eigen::MatrixXd Zc = Z.rowwise() - zbar;
  if (lambda > 0) {
    Eigen::MatrixXd A = Zc.transpose() * Zc;
    A.diagonal().array() += lambda;
    fit.coef = A.ldlt().solve(Zc.transpose() * yc);
  } else {
    fit.coef = Zc.completeOrthogonalDecomposition().solve(yc);
  }
  fit.intercept = ybar - zbar.dot(fit.coef);
  return fit;
}

Eigen::VectorXd PlsProjection::predict(const Eigen::MatrixXd& Z) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(Z.rows(), y_mean);
  if (components > 0) out += transform(Z) * y_loadings;
  return out;
}

PlsProjection solve_pls(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, int components) {
  if (Z.rows() != y.size()) throw DataError("pls: row count mismatch");
  if (Z.rows() < 2) throw ArgumentError("pls needs at least 2 rows");
  if (components < 1) throw ArgumentError("pls needs at least one component");

  PlsProjection pls;
  pls.requested = components;
  pls.x_mean = Z.colwise().mean();
  pls.y_mean = y.mean();
  const int limit = static_cast<int>(std::min<Eigen::Index>(Z.rows() - 1, Z.cols()));
  const int a_max = std::min(components, limit);

  Eigen::MatrixXd X = Z.rowwise() - pls.x_mean;
  Eigen::VectorXd r = y.array() - pls.y_mean;
  const double x_scale = std::max(X.norm(), 1e-300);
  const double y_scale = std::max(r.norm(), 1e-300);

  const auto d = Z.cols();
  Eigen::MatrixXd W(d, a_max), P(d, a_max);
  Eigen::VectorXd q(a_max);
  int a = 0;
  for (; a < a_max; ++a) {
    Eigen::VectorXd w = X.transpose() * r;
    const double wn = w.norm();
    if (wn <= 1e-10 * x_scale * y_scale) break;
    w /= wn;
    const Eigen::VectorXd t = X * w;
    const double tt = t.squaredNorm();
    if (tt <= 1e-20 * x_scale * x_scale) break;
    const Eigen::VectorXd p = X.transpose() * t / tt;
    const double qa = r.dot(t) / tt;
    X.noalias() -= t * p.transpose();
    r -= qa * t;
    W.col(a) = w;
    P.col(a) = p;
    q(a) = qa;
  }
  pls.components = a;
  pls.weights = W.leftCols(a);
  pls.loadings = P.leftCols(a);
  pls.y_loadings = q.head(a);
  if (a > 0) {
    // P^T W is upper triangular with unit diagonal in exact arithmetic.
    const Eigen::MatrixXd PtW = pls.loadings.transpose() * pls.weights;
    pls.rotation = pls.weights * PtW.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(a, a));
  } else {
    pls.rotation = Eigen::MatrixXd::Zero(d, 0);
  }
  return pls;
}

}  // namespace ppp
