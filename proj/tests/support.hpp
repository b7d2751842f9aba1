// Shared helpers for the test binaries.
#pragma once

#include <cstdint>
#include <random>

#include "mathsynth/expr.hpp"
#include "mathsynth/program.hpp"

namespace mathsynth::testing {

inline Equation eq(std::string_view text) { return parse_equation(text); }

/// Random expression with at most `depth` levels below the root, no "=".
inline Expr random_expr(std::mt19937_64& rng, int depth, bool allow_negative = true) {
  std::uniform_int_distribution<int> leaf_pick(0, 3);
  if (depth == 0 || leaf_pick(rng) == 0) {
    if (leaf_pick(rng) == 0) return Expr::var();
    std::uniform_int_distribution<std::int64_t> c(allow_negative ? -9 : 0, 12);
    return Expr::constant(c(rng));
  }
  std::uniform_int_distribution<int> op(1, 4);
  Op o = static_cast<Op>(op(rng));
  Expr l = random_expr(rng, depth - 1, allow_negative);
  Expr r = random_expr(rng, depth - 1, allow_negative);
  return Expr::node(o, l, r);
}

inline Equation random_equation(std::mt19937_64& rng, int depth) {
  return Equation::from_sides(random_expr(rng, depth), random_expr(rng, depth));
}

/// Chain program (lambda (p_k ... (p_1 $0 i_1) ... i_k)) over a small
/// alphabet so random corpora share structure.
inline Term random_chain(std::mt19937_64& rng, int steps) {
  static constexpr Prim kAlphabet[] = {Prim::Simplify, Prim::RRotate, Prim::Sub, Prim::Swap};
  std::uniform_int_distribution<int> pick(0, 3), index(0, 2);
  Term t = Term::var(0);
  for (int i = 0; i < steps; ++i) {
    t = Term::apply(Term::apply(Term::prim(kAlphabet[pick(rng)]), t), Term::integer(index(rng)));
  }
  return Term::lambda(t);
}

}  // namespace mathsynth::testing
