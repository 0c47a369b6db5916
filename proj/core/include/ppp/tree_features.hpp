#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ppp/feature_vector.hpp"
#include "ppp/tree.hpp"

namespace ppp {

// Bracket statistics of one tree. Brackets are internal nodes; preterminals
// and bare tokens are not brackets.
struct TreeStats {
  std::size_t numB = 0;      // number of brackets
  std::size_t depthB = 0;    // maximum bracket nesting depth (root = 1)
  double avg_depthB = 0;     // depthB / numB
  double r_over_l = 0;       // brackets on right branches / on left branches
  double avg_r_over_l = 0;   // mean over brackets of the per-node ratio
};

// Throws ArgumentError on a tree without internal nodes.
//
// Left/right assignment at a node with k children: the first floor(k/2)
// children are left branches, the rest are right branches, so the middle
// child of an odd-arity node counts right. A ratio with no left-side
// brackets evaluates to the right-side count.
TreeStats tree_stats(const Tree& tree);

// How a child is measured in a branching type.
enum class BranchingMeasure {
  kLeaves,         // number of leaves dominated by the child
  kInternalNodes,  // number of brackets inside the child subtree
};

using BranchingType = std::vector<std::size_t>;
using BranchingBag = std::map<BranchingType, std::size_t>;

// One branching type per internal node, holding the measure of each child in
// order.
BranchingBag branching_bag(const Tree& tree, BranchingMeasure measure = BranchingMeasure::kLeaves);

// The k most frequent types summed over `bags`, ties broken by lexicographic
// type order.
std::vector<BranchingType> select_branching_features(const std::vector<BranchingBag>& bags, std::size_t k = 70);

std::string branching_feature_name(const BranchingType& type);

// numB, depthB, avg_depthB, RL, avg_RL followed by one count per selected
// type. Length is always 5 + selected.size().
FeatureVector treef_vector(const Tree& tree, const std::vector<BranchingType>& selected,
                           BranchingMeasure measure = BranchingMeasure::kLeaves);

}  // namespace ppp
