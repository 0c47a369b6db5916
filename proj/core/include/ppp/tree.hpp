#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppp {

using Tokens = std::vector<std::string>;

// A constituency tree. Every node is either a leaf carrying one token or an
// internal node with at least one child. A leaf with a non-empty label is a
// preterminal "(X w)"; a leaf with an empty label is a bare token "w".
class Tree {
 public:
  static Tree leaf(std::string token, std::string label = {});
  // Throws ArgumentError on an empty child list. A single unlabeled leaf child
  // is folded into a preterminal so that the bracketed form stays canonical.
  static Tree node(std::string label, std::vector<Tree> children);

  const std::string& label() const noexcept { return label_; }
  bool is_leaf() const noexcept { return token_.has_value(); }
  bool is_internal() const noexcept { return !token_.has_value(); }
  bool is_preterminal() const noexcept { return is_leaf() && !label_.empty(); }
  const std::string& token() const;
  std::span<const Tree> children() const noexcept { return children_; }

  std::size_t leaf_count() const noexcept { return leaves_; }
  Tokens yield() const;
  void append_yield(Tokens& out) const;

  Tree with_label(std::string label) const;

  bool operator==(const Tree& other) const;

 private:
  Tree() = default;

  std::string label_;
  std::vector<Tree> children_;
  std::optional<std::string> token_;
  std::size_t leaves_ = 0;
};

// True when `token` can be stored in a bracketed file: non-empty, no
// whitespace, no parentheses.
bool is_valid_token(std::string_view token) noexcept;

// Parses zero or more bracketed trees. Trees may span lines. Throws
// ParseError with a 1-based line/column on malformed input.
std::vector<Tree> parse_bracketed(std::string_view text);

// Single-line bracketed form; parse_bracketed(serialize(t)) == {t}.
std::string serialize(const Tree& tree);

// Gives every unlabeled internal node the label `placeholder` (CCL-style
// output carries no labels). Leaves are untouched.
Tree relabel_empty(const Tree& tree, std::string_view placeholder = "NP");

// Applies `fn` to every leaf token, keeping the structure and labels.
template <typename Fn>
Tree map_tokens(const Tree& tree, Fn&& fn) {
  if (tree.is_leaf()) return Tree::leaf(fn(tree.token()), tree.label());
  std::vector<Tree> kids;
  kids.reserve(tree.children().size());
  for (const Tree& c : tree.children()) kids.push_back(map_tokens(c, fn));
  return Tree::node(tree.label(), std::move(kids));
}

}  // namespace ppp
