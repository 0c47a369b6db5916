#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ppp/errors.hpp"
#include "ppp/regression.hpp"

namespace ppp {

namespace {

constexpr double kTau = 1e-12;

// epsilon-SVR dual in the 2l-variable form: variable t < l is alpha_t with
// sign +1, variable t >= l is alpha*_{t-l} with sign -1.
class Smo {
 public:
  Smo(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C, double eps)
      : K_(K), y_(y), C_(C), eps_(eps), l_(y.size()), alpha_(Eigen::VectorXd::Zero(2 * l_)), G_(2 * l_) {
    for (Eigen::Index t = 0; t < l_; ++t) {
      G_(t) = eps - y(t);
      G_(t + l_) = eps + y(t);
    }
  }

  void run(const SvrOptions& opt, SvrFit& out) {
    long iter = 0;
    double tol = opt.tolerance;
    for (;;) {
      Eigen::Index i = -1, j = -1;
      const double gap = select(tol, i, j);
      if (i < 0) {
        out.kkt_violation = gap;
        finish(out);
        // Tighten the KKT tolerance until the duality gap also meets it.
        if (out.primal - out.dual <= opt.tolerance * std::max(1.0, std::abs(out.primal)) || tol < 1e-12) break;
        tol /= 10;
        continue;
      }
      if (++iter > opt.max_iterations) {
        finish(out);
        std::ostringstream msg;
        msg << "SVR did not converge within " << opt.max_iterations << " iterations (KKT violation " << gap
            << ", duality gap " << out.primal - out.dual << ")";
        throw ConvergenceError(msg.str());
      }
      update(i, j);
    }
    out.iterations = iter;
  }

 private:
  double sign(Eigen::Index t) const { return t < l_ ? 1.0 : -1.0; }
  Eigen::Index base(Eigen::Index t) const { return t < l_ ? t : t - l_; }
  // K is symmetric and column-major; index it as K(t, fixed) so inner loops
  // run down a contiguous column.
  double Q(Eigen::Index a, Eigen::Index b) const { return sign(a) * sign(b) * K_(base(b), base(a)); }
  bool up(Eigen::Index t) const { return t < l_ ? alpha_(t) < C_ : alpha_(t) > 0; }
  bool low(Eigen::Index t) const { return t < l_ ? alpha_(t) > 0 : alpha_(t) < C_; }

  // Second-order working set selection. Returns the maximal violation and
  // leaves i = -1 when it is below `tol`.
  double select(double tol, Eigen::Index& i, Eigen::Index& j) const {
    const Eigen::Index n = 2 * l_;
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index imax = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (up(t) && -sign(t) * G_(t) > gmax) {
        gmax = -sign(t) * G_(t);
        imax = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index jmin = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!low(t)) continue;
      const double yg = sign(t) * G_(t);
      gmax2 = std::max(gmax2, yg);
      if (imax < 0) continue;
      const double b = gmax + yg;
      if (b <= 0) continue;
      double a = K_(base(imax), base(imax)) + K_(base(t), base(t)) - 2 * sign(imax) * sign(t) * Q(imax, t);
      if (a <= 0) a = kTau;
      if (-b * b / a < best) {
        best = -b * b / a;
        jmin = t;
      }
    }
    const double gap = gmax + gmax2;
    if (imax < 0 || jmin < 0 || gap < tol) {
      i = j = -1;
      return std::isfinite(gap) ? gap : 0;
    }
    i = imax;
    j = jmin;
    return gap;
  }

  void update(Eigen::Index i, Eigen::Index j) {
    const double qii = K_(base(i), base(i)), qjj = K_(base(j), base(j)), qij = Q(i, j);
    const double old_i = alpha_(i), old_j = alpha_(j);
    double& ai = alpha_(i);
    double& aj = alpha_(j);
    if (sign(i) != sign(j)) {
      double quad = qii + qjj + 2 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-G_(i) - G_(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > C_) {
          ai = C_;
          aj = C_ - diff;
        }
      } else if (aj > C_) {
        aj = C_;
        ai = C_ + diff;
      }
    } else {
      double quad = qii + qjj - 2 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (G_(i) - G_(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C_) {
        if (ai > C_) {
          ai = C_;
          aj = sum - C_;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C_) {
        if (aj > C_) {
          aj = C_;
          ai = sum - C_;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    const double si = sign(i) * di, sj = sign(j) * dj;
    const auto bi = base(i), bj = base(j);
    for (Eigen::Index t = 0; t < l_; ++t) {
      const double v = si * K_(t, bi) + sj * K_(t, bj);
      G_(t) += v;
      G_(t + l_) -= v;
    }
  }

  double compute_rho() const {
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum = 0;
    long nfree = 0;
    for (Eigen::Index t = 0; t < 2 * l_; ++t) {
      const double yg = sign(t) * G_(t);
      const bool at_upper = alpha_(t) >= C_, at_lower = alpha_(t) <= 0;
      if (at_upper) {
        if (sign(t) < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower) {
        if (sign(t) > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++nfree;
        sum += yg;
      }
    }
    return nfree > 0 ? sum / static_cast<double>(nfree) : (ub + lb) / 2;
  }

  void finish(SvrFit& out) const {
    out.rho = compute_rho();
    const Eigen::VectorXd beta = alpha_.head(l_) - alpha_.tail(l_);
    out.coef = beta;
    // G_t = (K beta)_t + eps - y_t for t < l.
    double quad = 0, loss = 0, lin = 0;
    for (Eigen::Index t = 0; t < l_; ++t) {
      const double kb = G_(t) - eps_ + y_(t);
      quad += beta(t) * kb;
      loss += std::max(0.0, std::abs(y_(t) - (kb - out.rho)) - eps_);
      lin += eps_ * (alpha_(t) + alpha_(t + l_)) - y_(t) * beta(t);
    }
    out.primal = 0.5 * quad + C_ * loss;
    out.dual = -(0.5 * quad + lin);
  }

  const Eigen::MatrixXd& K_;
  const Eigen::VectorXd& y_;
  double C_, eps_;
  Eigen::Index l_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd G_;
};

}  // namespace

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::VectorXd na = A.rowwise().squaredNorm();
  const Eigen::VectorXd nb = B.rowwise().squaredNorm();
  Eigen::MatrixXd D = -2.0 * A * B.transpose();
  D.colwise() += na;
  D.rowwise() += nb.transpose();
  return D.cwiseMax(0.0);
}

double SvrFit::predict(const Eigen::Ref<const Eigen::RowVectorXd>& z) const {
  double f = -rho;
  for (Eigen::Index i = 0; i < support.rows(); ++i) f += coef(i) * std::exp(-gamma * (support.row(i) - z).squaredNorm());
  return f;
}

SvrFit solve_svr_kernel(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C,
                        double epsilon, double gamma, const SvrOptions& options) {
  if (Z.rows() != y.size() || K.rows() != y.size() || K.cols() != y.size()) throw DataError("svr: shape mismatch");
  if (y.size() < 2) throw ArgumentError("svr needs at least 2 rows");
  if (!(C > 0) || !(epsilon >= 0) || !(gamma > 0)) throw ArgumentError("svr needs C > 0, epsilon >= 0, gamma > 0");
  if (!(options.tolerance > 0)) throw ArgumentError("svr tolerance must be > 0");

  SvrFit fit;
  fit.C = C;
  fit.epsilon = epsilon;
  fit.gamma = gamma;
  Smo smo(K, y, C, epsilon);
  smo.run(options, fit);

  // Keep only support vectors.
  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < fit.coef.size(); ++i) {
    if (fit.coef(i) != 0) sv.push_back(i);
  }
  Eigen::MatrixXd S(static_cast<Eigen::Index>(sv.size()), Z.cols());
  Eigen::VectorXd c(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    S.row(static_cast<Eigen::Index>(k)) = Z.row(sv[k]);
    c(static_cast<Eigen::Index>(k)) = fit.coef(sv[k]);
  }
  fit.support = std::move(S);
  fit.coef = std::move(c);
  return fit;
}

SvrFit solve_svr(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double C, double epsilon, double gamma,
                 const SvrOptions& options) {
  const Eigen::MatrixXd K = (-gamma * squared_distances(Z, Z).array()).exp().matrix();
  return solve_svr_kernel(Z, K, y, C, epsilon, gamma, options);
}

}  // namespace ppp
