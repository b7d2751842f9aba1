// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/primitives.hpp"

#include <limits>
#include <string>

namespace mathsynth {
namespace {

constexpr std::array<std::string_view, 15> kNames = {
    "add",     "sub",  "mult", "div",     "newConstGen", "lrotate", "rrotate", "swap",
    "dist",    "revdist", "simplify", "addzero", "subzero", "multone", "divone",
};

bool additive(Op op) { return op == Op::Add || op == Op::Sub; }
bool multiplicative(Op op) { return op == Op::Mul || op == Op::Div; }

bool same_class(Op a, Op b) {
  return (additive(a) && additive(b)) || (multiplicative(a) && multiplicative(b));
}

Op flip(Op op) {
  switch (op) {
    case Op::Add: return Op::Sub;
    case Op::Sub: return Op::Add;
    case Op::Mul: return Op::Div;
    case Op::Div: return Op::Mul;
    case Op::Eq: return Op::Eq;
  }
  return op;
}

bool commutative(Op op) { return op == Op::Add || op == Op::Mul; }

Outcome<Expr> rotate_right(const Expr& y) {
  if (!y.is_node()) return Fault{FaultCode::LeafNode, "rrotate"};
  const Expr& l = y.left();
  if (!l.is_node()) return Fault{FaultCode::LeafNode, "rrotate child"};
  Op o1 = y.op();
  Op o2 = l.op();
  if (!same_class(o1, o2)) return Fault{FaultCode::MixedOperatorClass, "rrotate"};
  Op o3 = commutative(o2) ? o1 : flip(o1);
  return Expr::node(o2, l.left(), Expr::node(o3, l.right(), y.right()));
}

Outcome<Expr> rotate_left(const Expr& y) {
  if (!y.is_node()) return Fault{FaultCode::LeafNode, "lrotate"};
  const Expr& r = y.right();
  if (!r.is_node()) return Fault{FaultCode::LeafNode, "lrotate child"};
  Op o1 = y.op();
  Op o2 = r.op();
  if (!same_class(o1, o2)) return Fault{FaultCode::MixedOperatorClass, "lrotate"};
  Op o3 = commutative(o1) ? o2 : flip(o2);
  return Expr::node(o3, Expr::node(o1, y.left(), r.left()), r.right());
}

// A product term seen as (factor, factor). A bare x reads as (* 1 x).
struct Product {
  Expr left;
  Expr right;
  bool implicit;
};

std::optional<Product> as_product(const Expr& t) {
  if (t.is_op(Op::Mul)) return Product{t.left(), t.right(), false};
  if (t.is_var()) return Product{Expr::constant(1), t, true};
  return std::nullopt;
}

Outcome<Expr> distribute_out(const Expr& y) {
  if (!y.is_op(Op::Add) && !y.is_op(Op::Sub)) return Fault{FaultCode::NotApplicable, "dist needs + or -"};
  auto a = as_product(y.left());
  auto b = as_product(y.right());
  if (!a || !b) return Fault{FaultCode::NotApplicable, "dist needs two products"};
  // The implicit 1 of a bare x is never offered as a shared left factor.
  if (!a->implicit && !b->implicit && a->left == b->left) {
    return Expr::node(Op::Mul, a->left, Expr::node(y.op(), a->right, b->right));
  }
  if (a->right == b->right) {
    return Expr::node(Op::Mul, Expr::node(y.op(), a->left, b->left), a->right);
  }
  return Fault{FaultCode::NoCommonFactor, "dist"};
}

Outcome<Expr> distribute_in(const Expr& y) {
  if (!y.is_op(Op::Mul)) return Fault{FaultCode::NotApplicable, "revdist needs *"};
  const Expr& l = y.left();
  const Expr& r = y.right();
  if (r.is_op(Op::Add) || r.is_op(Op::Sub)) {
    return Expr::node(r.op(), Expr::node(Op::Mul, l, r.left()), Expr::node(Op::Mul, l, r.right()));
  }
  if (l.is_op(Op::Add) || l.is_op(Op::Sub)) {
    return Expr::node(l.op(), Expr::node(Op::Mul, l.left(), r), Expr::node(Op::Mul, l.right(), r));
  }
  return Fault{FaultCode::NotApplicable, "revdist needs a sum factor"};
}

// Applies the rewrite rules at a node whose children are already simplified.
Outcome<Expr> simplify_node(const Expr& n) {
  Op op = n.op();
  if (op == Op::Eq) return n;
  const Expr& a = n.left();
  const Expr& b = n.right();
  if (op == Op::Div && b.is_const() && b.value() == 0) return Fault{FaultCode::DivisionByZero, "simplify"};
  auto ca = as_rational_constant(a);
  auto cb = as_rational_constant(b);
  if (ca && cb) {
    std::optional<Rational> r;
    switch (op) {
      case Op::Add: r = Rational::try_add(*ca, *cb); break;
      case Op::Sub: r = Rational::try_sub(*ca, *cb); break;
      case Op::Mul: r = Rational::try_mul(*ca, *cb); break;
      case Op::Div: r = Rational::try_div(*ca, *cb); break;
      case Op::Eq: break;
    }
    if (!r) return Fault{FaultCode::Overflow, "simplify fold"};
    return rational_expr(*r);
  }
  auto is_lit = [](const Expr& e, std::int64_t v) { return e.is_const() && e.value() == v; };
  switch (op) {
    case Op::Add:
    case Op::Sub:
      if (is_lit(b, 0)) return a;
      if (op == Op::Sub && a == b) return Expr::constant(0);
      break;
    case Op::Mul:
      if (is_lit(b, 1)) return a;
      if (is_lit(b, 0)) return Expr::constant(0);
      break;
    case Op::Div:
      if (is_lit(b, 1)) return a;
      // Children are simplified, so an x-free side is a folded nonzero constant here.
      if (a == b) return Expr::constant(1);
      break;
    case Op::Eq: break;
  }
  return n;
}

}  // namespace

std::string_view prim_name(Prim p) noexcept { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Prim> prim_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Prim>(i);
  }
  return std::nullopt;
}

Outcome<std::int64_t> try_new_const_gen(std::int64_t a, std::int64_t b, std::int64_t c) noexcept {
  std::int64_t prod = 0;
  std::int64_t sum = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &sum)) {
    return Fault{FaultCode::Overflow, "newConstGen"};
  }
  return sum;
}

std::int64_t new_const_gen(std::int64_t a, std::int64_t b, std::int64_t c) {
  auto r = try_new_const_gen(a, b, c);
  if (!r) throw ArithmeticError("newConstGen overflow");
  return *r;
}

Outcome<Expr> try_simplify(const Expr& e) {
  if (!e.is_node()) return e;
  auto l = try_simplify(e.left());
  if (!l) return l.fault();
  auto r = try_simplify(e.right());
  if (!r) return r.fault();
  if (l->same_node(e.left()) && r->same_node(e.right())) return simplify_node(e);
  return simplify_node(Expr::node(e.op(), *l, *r));
}

Outcome<Equation> try_apply_primitive(Prim p, const Equation& e, std::size_t index) {
  auto sub = try_subtree_at(e.tree(), index);
  if (!sub) return sub.fault();
  const Expr& y = *sub;

  auto splice = [&](Outcome<Expr> repl) -> Outcome<Equation> {
    if (!repl) return repl.fault();
    if (index == 0) return trusted_equation(*repl);
    auto t = try_replace_subtree(e.tree(), index, *repl);
    if (!t) return t.fault();
    return trusted_equation(std::move(t).value());
  };

  switch (p) {
    case Prim::Add:
    case Prim::Sub:
    case Prim::Mult:
    case Prim::Div: {
      if (y.has_equality()) return Fault{FaultCode::ContainsEquality, prim_name(p)};
      Op op = p == Prim::Add ? Op::Add : p == Prim::Sub ? Op::Sub : p == Prim::Mult ? Op::Mul : Op::Div;
      return trusted_equation(Expr::node(Op::Eq, Expr::node(op, e.lhs(), y), Expr::node(op, e.rhs(), y)));
    }
    case Prim::AddZero:
    case Prim::SubZero:
    case Prim::MultOne:
    case Prim::DivOne: {
      if (y.has_equality()) return Fault{FaultCode::ContainsEquality, prim_name(p)};
      Op op = p == Prim::AddZero ? Op::Add : p == Prim::SubZero ? Op::Sub : p == Prim::MultOne ? Op::Mul : Op::Div;
      std::int64_t unit = (p == Prim::AddZero || p == Prim::SubZero) ? 0 : 1;
      return splice(Expr::node(op, y, Expr::constant(unit)));
    }
    case Prim::LRotate:
      if (index == 0) return Fault{FaultCode::MixedOperatorClass, "lrotate at root"};
      return splice(rotate_left(y));
    case Prim::RRotate:
      if (index == 0) return Fault{FaultCode::MixedOperatorClass, "rrotate at root"};
      return splice(rotate_right(y));
    case Prim::Swap:
      if (!y.is_node()) return Fault{FaultCode::LeafNode, "swap"};
      if (!(y.op() == Op::Add || y.op() == Op::Mul || y.op() == Op::Eq)) {
        return Fault{FaultCode::NonCommutative, "swap"};
      }
      return splice(Expr::node(y.op(), y.right(), y.left()));
    case Prim::Dist: return splice(distribute_out(y));
    case Prim::RevDist: return splice(distribute_in(y));
    case Prim::Simplify: return splice(try_simplify(y));
    case Prim::NewConstGen: return Fault{FaultCode::TypeMismatch, "newConstGen is not an equation primitive"};
  }
  return Fault{FaultCode::NotApplicable, "unknown primitive"};
}

Equation apply_primitive(Prim p, const Equation& e, SubtreeIndex index) {
  auto r = try_apply_primitive(p, e, index.value);
  if (r) return *r;
  if (r.fault().code == FaultCode::IndexOutOfRange) {
    throw IndexError(std::string(prim_name(p)) + ": subtree index " + std::to_string(index.value) +
                     " out of range for " + std::to_string(e.size()) + " nodes");
  }
  throw PrimitiveError(std::string(prim_name(p)) + ": " + describe(r.fault()));
}

}  // namespace mathsynth
