#include "ppp/tree_features.hpp"

#include <algorithm>

#include "ppp/errors.hpp"

namespace ppp {

namespace {

struct Walk {
  std::size_t brackets = 0;
  std::size_t total_left = 0;
  std::size_t total_right = 0;
  double ratio_sum = 0;
};

// Returns {brackets in subtree, bracket depth of subtree}.
std::pair<std::size_t, std::size_t> walk(const Tree& t, Walk& w) {
  if (t.is_leaf()) return {0, 0};
  const auto kids = t.children();
  const std::size_t left_children = kids.size() / 2;
  std::size_t inside = 0, depth = 0, left = 0, right = 0;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    const auto [b, d] = walk(kids[i], w);
    inside += b;
    depth = std::max(depth, d);
    (i < left_children ? left : right) += b;
  }
  ++w.brackets;
  w.total_left += left;
  w.total_right += right;
  w.ratio_sum += left > 0 ? static_cast<double>(right) / static_cast<double>(left) : static_cast<double>(right);
  return {inside + 1, depth + 1};
}

std::size_t count_brackets(const Tree& t) {
  if (t.is_leaf()) return 0;
  std::size_t n = 1;
  for (const Tree& c : t.children()) n += count_brackets(c);
  return n;
}

void bag_into(const Tree& t, BranchingMeasure measure, BranchingBag& bag) {
  if (t.is_leaf()) return;
  BranchingType type;
  type.reserve(t.children().size());
  for (const Tree& c : t.children()) {
    type.push_back(measure == BranchingMeasure::kLeaves ? c.leaf_count() : count_brackets(c));
    bag_into(c, measure, bag);
  }
  ++bag[type];
}

}  // namespace

TreeStats tree_stats(const Tree& tree) {
  if (tree.is_leaf()) throw ArgumentError("tree_stats: tree has no internal nodes");
  Walk w;
  const auto [brackets, depth] = walk(tree, w);
  TreeStats s;
  s.numB = brackets;
  s.depthB = depth;
  s.avg_depthB = static_cast<double>(depth) / static_cast<double>(brackets);
  s.r_over_l = w.total_left > 0 ? static_cast<double>(w.total_right) / static_cast<double>(w.total_left)
                                : static_cast<double>(w.total_right);
  s.avg_r_over_l = w.ratio_sum / static_cast<double>(brackets);
  return s;
}

BranchingBag branching_bag(const Tree& tree, BranchingMeasure measure) {
  BranchingBag bag;
  bag_into(tree, measure, bag);
  return bag;
}

std::vector<BranchingType> select_branching_features(const std::vector<BranchingBag>& bags, std::size_t k) {
  if (k == 0) throw ArgumentError("select_branching_features: k must be >= 1");
  if (bags.empty()) throw ArgumentError("select_branching_features: no training bags");
  BranchingBag total;
  for (const auto& bag : bags) {
    for (const auto& [type, count] : bag) total[type] += count;
  }
  std::vector<std::pair<BranchingType, std::size_t>> ranked(total.begin(), total.end());
  // `total` is ordered by type, so a stable sort on count keeps the
  // lexicographic tie order.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<BranchingType> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

std::string branching_feature_name(const BranchingType& type) {
  std::string name = "branch:";
  for (std::size_t i = 0; i < type.size(); ++i) {
    if (i) name += ',';
    name += std::to_string(type[i]);
  }
  return name;
}

FeatureVector treef_vector(const Tree& tree, const std::vector<BranchingType>& selected, BranchingMeasure measure) {
  FeatureVector fv;
  const TreeStats s = tree_stats(tree);
  fv.add("numB", static_cast<double>(s.numB));
  fv.add("depthB", static_cast<double>(s.depthB));
  fv.add("avg_depthB", s.avg_depthB);
  fv.add("RL", s.r_over_l);
  fv.add("avg_RL", s.avg_r_over_l);
  const BranchingBag bag = branching_bag(tree, measure);
  for (const auto& type : selected) {
    const auto it = bag.find(type);
    fv.add(branching_feature_name(type), it == bag.end() ? 0.0 : static_cast<double>(it->second));
  }
  return fv;
}

}  // namespace ppp
