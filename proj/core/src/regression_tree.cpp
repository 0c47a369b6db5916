#include <algorithm>
#include <numeric>

#include "ppp/errors.hpp"
#include "ppp/regression.hpp"

namespace ppp {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0;
  double sse = 0;
};

class Grower {
 public:
  Grower(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_depth, int min_leaf)
      : X_(X), y_(y), max_depth_(max_depth), min_leaf_(static_cast<std::size_t>(min_leaf)) {}

  int grow(std::vector<Eigen::Index>& rows, int depth) {
    const int id = static_cast<int>(tree_.size());
    tree_.push_back({});
    double sum = 0;
    for (auto r : rows) sum += y_(r);
    const double mean = sum / static_cast<double>(rows.size());
    tree_[static_cast<std::size_t>(id)].value = mean;
    if (depth >= max_depth_ || rows.size() < 2 * min_leaf_) return id;

    double sse = 0;
    for (auto r : rows) sse += (y_(r) - mean) * (y_(r) - mean);
    const Split s = best_split(rows, sse);
    if (s.feature < 0) return id;

    std::vector<Eigen::Index> left, right;
    for (auto r : rows) (X_(r, s.feature) <= s.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int rt = grow(right, depth + 1);
    auto& node = tree_[static_cast<std::size_t>(id)];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.left = l;
    node.right = rt;
    return id;
  }

  std::vector<TreeNode> take() { return std::move(tree_); }

 private:
  // Scans features in index order and thresholds in increasing order,
  // replacing the incumbent only on a strict improvement.
  Split best_split(const std::vector<Eigen::Index>& rows, double parent_sse) const {
    Split best;
    best.sse = parent_sse;
    const std::size_t n = rows.size();
    std::vector<Eigen::Index> order(rows);
    for (Eigen::Index f = 0; f < X_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double xa = X_(a, f), xb = X_(b, f);
        return xa < xb || (xa == xb && a < b);
      });
      double total = 0, total_sq = 0;
      for (auto r : order) {
        total += y_(r);
        total_sq += y_(r) * y_(r);
      }
      double ls = 0, lsq = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double yi = y_(order[i]);
        ls += yi;
        lsq += yi * yi;
        const std::size_t nl = i + 1, nr = n - nl;
        const double xa = X_(order[i], f), xb = X_(order[i + 1], f);
        if (xa == xb || nl < min_leaf_ || nr < min_leaf_) continue;
        const double rs = total - ls, rsq = total_sq - lsq;
        const double sse = (lsq - ls * ls / static_cast<double>(nl)) + (rsq - rs * rs / static_cast<double>(nr));
        if (sse < best.sse - 1e-12 * std::max(1.0, parent_sse)) {
          best.sse = sse;
          best.feature = static_cast<int>(f);
          best.threshold = xa + (xb - xa) / 2;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  int max_depth_;
  std::size_t min_leaf_;
  std::vector<TreeNode> tree_;
};

}  // namespace

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (nodes.empty()) throw ArgumentError("empty regression tree");
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

RegressionTree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_depth, int min_leaf) {
  if (X.rows() != y.size()) throw DataError("tree: row count mismatch");
  if (max_depth < 0) throw ArgumentError("tree max_depth must be >= 0");
  if (min_leaf < 1) throw ArgumentError("tree min_leaf must be >= 1");
  if (X.rows() < std::max(1, min_leaf)) {
    throw ArgumentError("tree needs at least min_leaf = " + std::to_string(min_leaf) + " rows");
  }
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  Grower g(X, y, max_depth, min_leaf);
  g.grow(rows, 0);
  RegressionTree t;
  t.nodes = g.take();
  t.max_depth = max_depth;
  t.min_leaf = min_leaf;
  return t;
}

}  // namespace ppp
