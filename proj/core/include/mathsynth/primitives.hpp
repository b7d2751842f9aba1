// SPDX-License-Identifier: Apache-2.0
//
// MathDSL primitives. Every equation primitive has signature
// (equation, subtree index) -> equation and is a pure function.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "mathsynth/expr.hpp"

namespace mathsynth {

enum class Prim : std::uint8_t {
  Add,
  Sub,
  Mult,
  Div,
  NewConstGen,
  LRotate,
  RRotate,
  Swap,
  Dist,
  RevDist,
  Simplify,
  AddZero,
  SubZero,
  MultOne,
  DivOne,
};

inline constexpr std::array<Prim, 15> kAllPrims = {
    Prim::Add,     Prim::Sub,    Prim::Mult,     Prim::Div,      Prim::NewConstGen,
    Prim::LRotate, Prim::RRotate, Prim::Swap,    Prim::Dist,     Prim::RevDist,
    Prim::Simplify, Prim::AddZero, Prim::SubZero, Prim::MultOne, Prim::DivOne,
};

/// The tstr -> tint -> tstr primitives, i.e. everything except newConstGen.
inline constexpr std::array<Prim, 14> kEquationPrims = {
    Prim::Add,     Prim::Sub,     Prim::Mult,     Prim::Div,     Prim::LRotate,
    Prim::RRotate, Prim::Swap,    Prim::Dist,     Prim::RevDist, Prim::Simplify,
    Prim::AddZero, Prim::SubZero, Prim::MultOne,  Prim::DivOne,
};

std::string_view prim_name(Prim p) noexcept;
std::optional<Prim> prim_from_name(std::string_view name) noexcept;
inline bool is_equation_prim(Prim p) noexcept { return p != Prim::NewConstGen; }

/// Applies an equation primitive at a pre-order index.
Outcome<Equation> try_apply_primitive(Prim p, const Equation& e, std::size_t index);

/// Throwing form: IndexError for a bad index, PrimitiveError otherwise.
Equation apply_primitive(Prim p, const Equation& e, SubtreeIndex index);

/// a*b + c.
Outcome<std::int64_t> try_new_const_gen(std::int64_t a, std::int64_t b, std::int64_t c) noexcept;
std::int64_t new_const_gen(std::int64_t a, std::int64_t b, std::int64_t c);

/// Bottom-up simplification of a single tree (may be the "=" root).
Outcome<Expr> try_simplify(const Expr& e);

}  // namespace mathsynth
