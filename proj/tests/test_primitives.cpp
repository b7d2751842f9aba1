#include "doctest.h"
#include "mathsynth/primitives.hpp"
#include "support.hpp"

using namespace mathsynth;
using mathsynth::testing::eq;

namespace {

std::string run(Prim p, std::string_view e, std::size_t i) {
  return to_prefix(apply_primitive(p, parse_prefix(e), {i}));
}

std::string subtree_run(Prim p, std::string_view y) {
  auto e = Equation::from_sides(parse_prefix_expr(y), Expr::constant(0));
  return to_prefix(apply_primitive(p, e, {1}).lhs());
}

}  // namespace

TEST_CASE("names") {
  for (Prim p : kAllPrims) CHECK(prim_from_name(prim_name(p)) == p);
  CHECK_FALSE(prim_from_name("factor"));
}

TEST_CASE("arithmetic on both sides") {
  CHECK(run(Prim::Sub, "(= (+ (* 3 x) 5) 7)", 5) == "(= (- (+ (* 3 x) 5) 5) (- 7 5))");
  CHECK(run(Prim::Div, "(= (* x 5) 3)", 3) == "(= (/ (* x 5) 5) (/ 3 5))");
  CHECK(run(Prim::Add, "(= x 0)", 2) == "(= (+ x 0) (+ 0 0))");
  CHECK_THROWS_AS(run(Prim::Add, "(= x 0)", 0), PrimitiveError);
  CHECK_THROWS_AS(run(Prim::Mult, "(= x 0)", 3), IndexError);
}

TEST_CASE("newConstGen") {
  CHECK(new_const_gen(3, 4, 5) == 17);
  CHECK(new_const_gen(10, 10, 10) == 110);
  CHECK(new_const_gen(0, 7, 0) == 0);
  CHECK_THROWS_AS(new_const_gen(INT64_MAX, 2, 0), ArithmeticError);
}

TEST_CASE("rotations") {
  CHECK(run(Prim::RRotate, "(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)", 1) == "(= (+ 1 (+ (* 2 x) (* 3 x))) 4)");
  CHECK(run(Prim::RRotate, "(= (/ (* x 5) 5) (/ 3 5))", 1) == "(= (* x (/ 5 5)) (/ 3 5))");
  CHECK(run(Prim::LRotate, "(= (- 7 (+ 2 1)) x)", 1) == "(= (- (- 7 2) 1) x)");
  CHECK_THROWS_AS(run(Prim::RRotate, "(= (+ (* 2 x) 1) 4)", 1), PrimitiveError);
  CHECK_THROWS_AS(run(Prim::RRotate, "(= (+ 1 x) 4)", 1), PrimitiveError);
  CHECK_THROWS_AS(run(Prim::LRotate, "(= x 4)", 1), PrimitiveError);
}

TEST_CASE("swap") {
  CHECK(run(Prim::Swap, "(= 2 x)", 0) == "(= x 2)");
  CHECK(run(Prim::Swap, "(= (* 5 x) 3)", 1) == "(= (* x 5) 3)");
  CHECK_THROWS_AS(run(Prim::Swap, "(= (- 5 x) 3)", 1), PrimitiveError);
  CHECK_THROWS_AS(run(Prim::Swap, "(= (- 5 x) 3)", 2), PrimitiveError);
}

TEST_CASE("dist and revdist") {
  CHECK(subtree_run(Prim::Dist, "(+ (* 2 x) (* 3 x))") == "(* (+ 2 3) x)");
  CHECK(subtree_run(Prim::Dist, "(- (* 3 x) (* 2 x))") == "(* (- 3 2) x)");
  CHECK(subtree_run(Prim::Dist, "(+ (* 2 x) x)") == "(* (+ 2 1) x)");
  CHECK(subtree_run(Prim::Dist, "(+ (* 4 x) (* 4 2))") == "(* 4 (+ x 2))");
  CHECK_THROWS_AS(subtree_run(Prim::Dist, "(+ (* 2 x) (* 3 5))"), PrimitiveError);
  CHECK(subtree_run(Prim::RevDist, "(* 2 (+ x 3))") == "(+ (* 2 x) (* 2 3))");
  CHECK(subtree_run(Prim::RevDist, "(* (+ x 3) 2)") == "(+ (* x 2) (* 3 2))");
  CHECK_THROWS_AS(subtree_run(Prim::RevDist, "(+ x 3)"), PrimitiveError);
}

TEST_CASE("simplify") {
  CHECK(run(Prim::Simplify, "(= (+ (* 5 x) (- 1 1)) (- 4 1))", 1) == "(= (* 5 x) (- 4 1))");
  CHECK(run(Prim::Simplify, "(= (* x (/ 5 5)) (/ 3 5))", 1) == "(= x (/ 3 5))");
  CHECK(run(Prim::Simplify, "(= x (/ 6 2))", 2) == "(= x 3)");
  CHECK(run(Prim::Simplify, "(= x (/ 6 4))", 2) == "(= x (/ 3 2))");
  CHECK(run(Prim::Simplify, "(= x (/ 6 -4))", 2) == "(= x (/ -3 2))");
  CHECK(run(Prim::Simplify, "(= (- (+ (* 3 x) 5) 5) (- 7 5))", 0) == "(= (- (+ (* 3 x) 5) 5) 2)");
  CHECK(run(Prim::Simplify, "(= (/ (* 2 x) (* 2 x)) 1)", 1) == "(= 1 1)");
  CHECK(run(Prim::Simplify, "(= (- (- x 2) (- x 2)) 0)", 1) == "(= 0 0)");
  CHECK(run(Prim::Simplify, "(= (* (+ x 3) 0) 0)", 1) == "(= 0 0)");
  CHECK_THROWS_AS(run(Prim::Simplify, "(= x (/ 0 0))", 2), PrimitiveError);
  CHECK_THROWS_AS(run(Prim::Simplify, "(= x (/ x 0))", 2), PrimitiveError);
}

TEST_CASE("identity insertions") {
  CHECK(run(Prim::AddZero, "(= (* 5 x) 3)", 4) == "(= (* 5 x) (+ 3 0))");
  CHECK(run(Prim::MultOne, "(= x 2)", 1) == "(= (* x 1) 2)");
  CHECK(run(Prim::DivOne, "(= x 2)", 2) == "(= x (/ 2 1))");
  CHECK(run(Prim::SubZero, "(= x 2)", 1) == "(= (- x 0) 2)");
  CHECK_THROWS_AS(run(Prim::DivOne, "(= x 2)", 0), PrimitiveError);
}

TEST_CASE("simplify is idempotent on random trees") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 2000; ++k) {
    auto e = mathsynth::testing::random_equation(rng, 4);
    for (std::size_t i = 0; i < e.size(); ++i) {
      auto once = try_apply_primitive(Prim::Simplify, e, i);
      if (!once) continue;
      auto twice = try_apply_primitive(Prim::Simplify, *once, i);
      REQUIRE(twice.ok());
      CHECK(*twice == *once);
    }
  }
}
