#include "ppp/tree.hpp"

#include <cctype>
#include <utility>

#include "ppp/errors.hpp"

namespace ppp {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_valid_label(std::string_view label) {
  for (char c : label) {
    if (is_space(c) || c == '(' || c == ')') return false;
  }
  return true;
}

}  // namespace

bool is_valid_token(std::string_view token) noexcept {
  return !token.empty() && is_valid_label(token);
}

Tree Tree::leaf(std::string token, std::string label) {
  if (!is_valid_token(token)) throw ArgumentError("invalid token '" + token + "'");
  if (!is_valid_label(label)) throw ArgumentError("invalid label '" + label + "'");
  Tree t;
  t.label_ = std::move(label);
  t.token_ = std::move(token);
  t.leaves_ = 1;
  return t;
}

Tree Tree::node(std::string label, std::vector<Tree> children) {
  if (children.empty()) throw ArgumentError("internal node '" + label + "' has no children");
  if (!is_valid_label(label)) throw ArgumentError("invalid label '" + label + "'");
  if (children.size() == 1 && children.front().is_leaf() && children.front().label().empty()) {
    return leaf(std::move(*children.front().token_), std::move(label));
  }
  Tree t;
  t.label_ = std::move(label);
  t.children_ = std::move(children);
  for (const Tree& c : t.children_) t.leaves_ += c.leaves_;
  return t;
}

const std::string& Tree::token() const {
  if (!token_) throw ArgumentError("token() called on an internal node");
  return *token_;
}

void Tree::append_yield(Tokens& out) const {
  if (token_) {
    out.push_back(*token_);
    return;
  }
  for (const Tree& c : children_) c.append_yield(out);
}

Tokens Tree::yield() const {
  Tokens out;
  out.reserve(leaves_);
  append_yield(out);
  return out;
}

Tree Tree::with_label(std::string label) const {
  if (!is_valid_label(label)) throw ArgumentError("invalid label '" + label + "'");
  Tree t = *this;
  t.label_ = std::move(label);
  return t;
}

bool Tree::operator==(const Tree& other) const {
  return label_ == other.label_ && token_ == other.token_ && children_ == other.children_;
}

namespace {

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  std::vector<Tree> read_all() {
    std::vector<Tree> trees;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] != '(') fail("expected '(' at start of tree");
      trees.push_back(read_tree());
    }
    return trees;
  }

 private:
  struct Item {
    std::optional<Tree> tree;
    std::string token;
  };

  Tree read_tree() {
    const std::size_t open_line = line_, open_col = col_;
    advance();  // '('
    std::string label;
    if (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')') {
      label = read_token();
    }
    std::vector<Item> items;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        throw ParseError("unclosed bracket", open_line, open_col);
      }
      const char c = text_[pos_];
      if (c == ')') {
        advance();
        break;
      }
      if (c == '(') {
        items.push_back({read_tree(), {}});
      } else {
        items.push_back({std::nullopt, read_token()});
      }
    }
    if (items.empty()) throw ParseError("empty constituent", open_line, open_col);
    if (items.size() == 1 && !items.front().tree) {
      return Tree::leaf(std::move(items.front().token), std::move(label));
    }
    std::vector<Tree> kids;
    kids.reserve(items.size());
    for (Item& it : items) {
      kids.push_back(it.tree ? std::move(*it.tree) : Tree::leaf(std::move(it.token)));
    }
    return Tree::node(std::move(label), std::move(kids));
  }

  std::string read_token() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')') {
      advance();
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) advance();
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

void write_tree(const Tree& t, std::string& out, bool top) {
  if (t.is_leaf()) {
    if (t.label().empty() && !top) {
      out += t.token();
      return;
    }
    out += '(';
    out += t.label();
    out += ' ';
    out += t.token();
    out += ')';
    return;
  }
  out += '(';
  out += t.label();
  for (const Tree& c : t.children()) {
    out += ' ';
    write_tree(c, out, false);
  }
  out += ')';
}

}  // namespace

std::vector<Tree> parse_bracketed(std::string_view text) { return BracketReader(text).read_all(); }

std::string serialize(const Tree& tree) {
  std::string out;
  write_tree(tree, out, true);
  return out;
}

Tree relabel_empty(const Tree& tree, std::string_view placeholder) {
  if (tree.is_leaf()) return tree;
  std::vector<Tree> kids;
  kids.reserve(tree.children().size());
  for (const Tree& c : tree.children()) kids.push_back(relabel_empty(c, placeholder));
  std::string label = tree.label().empty() ? std::string(placeholder) : tree.label();
  return Tree::node(std::move(label), std::move(kids));
}

}  // namespace ppp
