// SPDX-License-Identifier: Apache-2.0
//
// Immutable equation syntax trees.
//
// An Expr is a cheap handle (one shared_ptr) to a node that never changes after
// construction. Subtrees are shared between trees, so replacing a subtree copies
// only the path from the root to the replaced node.
//
// Subtrees are addressed by pre-order position: the root is 0, a node's left
// subtree is numbered before its right subtree.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "mathsynth/error.hpp"
#include "mathsynth/rational.hpp"

namespace mathsynth {

enum class Op : std::uint8_t { Eq, Add, Sub, Mul, Div };

char op_symbol(Op op) noexcept;

namespace detail {
struct ExprNode;
}

class Expr {
 public:
  enum class Kind : std::uint8_t { Const, Var, Node };

  static Expr constant(std::int64_t value);
  static Expr var();
  static Expr node(Op op, Expr left, Expr right);

  inline Kind kind() const noexcept;
  bool is_const() const noexcept { return kind() == Kind::Const; }
  bool is_var() const noexcept { return kind() == Kind::Var; }
  bool is_node() const noexcept { return kind() == Kind::Node; }
  inline bool is_op(Op op) const noexcept;

  inline std::int64_t value() const noexcept;
  inline Op op() const noexcept;
  inline const Expr& left() const noexcept;
  inline const Expr& right() const noexcept;

  /// Number of nodes, counting this one.
  inline std::uint32_t size() const noexcept;
  inline std::size_t hash() const noexcept;
  inline bool has_var() const noexcept;
  inline bool has_equality() const noexcept;

  bool same_node(const Expr& other) const noexcept { return p_ == other.p_; }

  friend bool operator==(const Expr& a, const Expr& b) noexcept;

 private:
  friend struct detail::ExprNode;
  Expr() = default;
  explicit Expr(std::shared_ptr<const detail::ExprNode> p) : p_(std::move(p)) {}

  std::shared_ptr<const detail::ExprNode> p_;
};

namespace detail {
struct ExprNode {
  Expr::Kind kind = Expr::Kind::Const;
  Op op = Op::Add;
  bool has_var = false;
  bool has_eq = false;
  std::uint32_t size = 1;
  std::int64_t value = 0;
  std::size_t hash = 0;
  Expr left;
  Expr right;
};
}  // namespace detail

Expr::Kind Expr::kind() const noexcept { return p_->kind; }
bool Expr::is_op(Op op) const noexcept { return p_->kind == Kind::Node && p_->op == op; }
std::int64_t Expr::value() const noexcept { return p_->value; }
Op Expr::op() const noexcept { return p_->op; }
const Expr& Expr::left() const noexcept { return p_->left; }
const Expr& Expr::right() const noexcept { return p_->right; }
std::uint32_t Expr::size() const noexcept { return p_->size; }
std::size_t Expr::hash() const noexcept { return p_->hash; }
bool Expr::has_var() const noexcept { return p_->has_var; }
bool Expr::has_equality() const noexcept { return p_->has_eq; }

struct ExprHash {
  std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

/// Pre-order subtree position; root = 0.
struct SubtreeIndex {
  std::size_t value = 0;
};

/// An Expr whose root is "=" and which contains no other "=".
class Equation {
 public:
  /// Throws ValidationError when the tree is not a well-formed equation.
  static Equation make(Expr tree);
  static Equation from_sides(Expr lhs, Expr rhs);

  const Expr& tree() const noexcept { return tree_; }
  const Expr& lhs() const noexcept { return tree_.left(); }
  const Expr& rhs() const noexcept { return tree_.right(); }
  std::uint32_t size() const noexcept { return tree_.size(); }
  std::size_t hash() const noexcept { return tree_.hash(); }

  friend bool operator==(const Equation& a, const Equation& b) noexcept { return a.tree_ == b.tree_; }

 private:
  explicit Equation(Expr tree) : tree_(std::move(tree)) {}
  friend Equation trusted_equation(Expr tree);
  Expr tree_;
};

/// Wraps a tree the caller has already proven to be a valid equation.
Equation trusted_equation(Expr tree);

struct EquationHash {
  std::size_t operator()(const Equation& e) const noexcept { return e.hash(); }
};

// ---- text codecs ----------------------------------------------------------

/// Fully parenthesized prefix form, e.g. "(= (+ (* 2 x) 1) 4)".
std::string to_prefix(const Expr& e);
std::string to_prefix(const Equation& e);
Expr parse_prefix_expr(std::string_view text);
Equation parse_prefix(std::string_view text);

/// Conventional infix with minimal parentheses, e.g. "2x+1 = 4".
std::string to_infix(const Expr& e);
std::string to_infix(const Equation& e);
Expr parse_infix_expr(std::string_view text);
Equation parse_infix(std::string_view text);

/// Prefix when the text starts with "(=" (after whitespace), infix otherwise.
Equation parse_equation(std::string_view text);

// ---- structure ------------------------------------------------------------

inline std::size_t node_count(const Expr& e) noexcept { return e.size(); }

Outcome<Expr> try_subtree_at(const Expr& root, std::size_t index);
Outcome<Expr> try_replace_subtree(const Expr& root, std::size_t index, const Expr& replacement);

/// Throws IndexError when out of bounds.
Expr subtree_at(const Equation& e, SubtreeIndex index);
/// Throws IndexError when out of bounds, ValidationError for "=" in the replacement
/// or an attempt to replace the root.
Equation replace_subtree(const Equation& e, SubtreeIndex index, const Expr& replacement);

// ---- numeric --------------------------------------------------------------

/// Exact value at x. Throws ArithmeticError on division by zero or overflow, and
/// ValidationError if the tree contains "=".
Rational eval_at(const Expr& e, const Rational& x);
std::optional<Rational> try_eval_at(const Expr& e, const Rational& x) noexcept;

/// Reads a Const leaf, or a "/" node of two Const leaves, as a rational. The
/// fraction form is accepted only when it is already in lowest terms with a
/// denominator greater than one.
std::optional<Rational> as_rational_constant(const Expr& e) noexcept;

/// Builds the canonical tree for a rational: a Const, or (/ p q) with q > 1.
Expr rational_expr(const Rational& r);

/// Solution value when one side is exactly x and the other a canonical
/// rational constant (either orientation).
std::optional<Rational> check_solved(const Equation& e) noexcept;

}  // namespace mathsynth
