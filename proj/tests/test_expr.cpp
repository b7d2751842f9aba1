#include "doctest.h"
#include "support.hpp"

using namespace mathsynth;
using mathsynth::testing::eq;

TEST_CASE("prefix parse and node counts") {
  auto e = parse_prefix("(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)");
  CHECK(e.size() == 11);
  CHECK(parse_prefix("(= x 0)").size() == 3);
  CHECK(to_prefix(e) == "(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)");
  CHECK(node_count(parse_prefix_expr("(+ (* 5 x) 1)")) == 5);
  CHECK(node_count(Expr::constant(4)) == 1);
}

TEST_CASE("prefix errors") {
  CHECK_THROWS_AS(parse_prefix("(= (+ 1 2) x 3)"), ParseError);
  CHECK_THROWS_AS(parse_prefix("(+ 1 x)"), ParseError);
  CHECK_THROWS_AS(parse_prefix("(= (+ 1 (= x 2)) 3)"), ParseError);
  CHECK_THROWS_AS(parse_prefix("(= (+ 1) 3)"), ParseError);
  CHECK_THROWS_AS(parse_prefix("(= y 3)"), ParseError);
  CHECK_THROWS_AS(parse_prefix("(= x 3"), ParseError);
}

TEST_CASE("prefix negative literals and unicode minus") {
  auto e = parse_prefix("(= (− x -3) 4)");
  CHECK(to_prefix(e) == "(= (- x -3) 4)");
  CHECK(e.lhs().right().value() == -3);
}

TEST_CASE("infix parse") {
  CHECK(parse_infix("((1+2x)+3x) = 4") == parse_prefix("(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)"));
  CHECK(parse_infix("x = 3/5") == parse_prefix("(= x (/ 3 5))"));
  CHECK(parse_infix("5x+1 = 4") == parse_prefix("(= (+ (* 5 x) 1) 4)"));
  CHECK(parse_infix("4 = ((3+2)*x)+1") == parse_prefix("(= 4 (+ (* (+ 3 2) x) 1))"));
  CHECK(parse_infix("2(x+3) = 8") == parse_prefix("(= (* 2 (+ x 3)) 8)"));
  CHECK(parse_infix("x - 2 - 1 = -4") == parse_prefix("(= (- (- x 2) 1) -4)"));
  CHECK_THROWS_AS(parse_infix("(x+1 = 2"), ParseError);
  CHECK_THROWS_AS(parse_infix("x+1) = 2"), ParseError);
  CHECK_THROWS_AS(parse_infix("x+y = 2"), ParseError);
  CHECK_THROWS_AS(parse_infix("x+1"), ParseError);
}

TEST_CASE("infix rendering") {
  CHECK(to_infix(parse_prefix("(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)")) == "1+2x+3x = 4");
  CHECK(to_infix(parse_prefix("(= (- 7 (+ 2 1)) x)")) == "7-(2+1) = x");
  CHECK(to_infix(parse_prefix("(= (* x (/ 5 5)) (/ 3 5))")) == "x*(5/5) = 3/5");
  CHECK(to_infix(parse_prefix("(= (+ (* -3 x) 1) -2)")) == "(-3)*x+1 = -2");
}

TEST_CASE("auto-detected format") {
  CHECK(parse_equation("  (= x 4)") == parse_infix("x = 4"));
  CHECK(parse_equation("(x+1) = 4") == parse_prefix("(= (+ x 1) 4)"));
}

TEST_CASE("round trip on random trees") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 2000; ++k) {
    auto e = mathsynth::testing::random_equation(rng, 4);
    CHECK(parse_prefix(to_prefix(e)) == e);
    CHECK(parse_infix(to_infix(e)) == e);
  }
}

TEST_CASE("pre-order subtree addressing") {
  auto e = parse_prefix("(= (+ (* 3 x) 5) 7)");
  CHECK(subtree_at(e, {5}) == Expr::constant(5));
  CHECK(subtree_at(e, {4}) == Expr::var());
  CHECK(subtree_at(e, {0}) == e.tree());
  auto fig = parse_prefix("(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)");
  CHECK_THROWS_AS(subtree_at(fig, {11}), IndexError);
  CHECK(subtree_at(fig, {10}) == Expr::constant(4));
}

TEST_CASE("replace_subtree") {
  auto e = parse_prefix("(= (+ (* 3 x) 5) 7)");
  auto r = replace_subtree(e, {4}, parse_prefix_expr("(+ x 0)"));
  CHECK(to_prefix(r) == "(= (+ (* 3 (+ x 0)) 5) 7)");
  CHECK(to_prefix(e) == "(= (+ (* 3 x) 5) 7)");
  CHECK(to_prefix(replace_subtree(parse_prefix("(= x 4)"), {2}, Expr::constant(9))) == "(= x 9)");
  CHECK_THROWS_AS(replace_subtree(e, {1}, parse_prefix("(= 1 1)").tree()), ValidationError);
  CHECK_THROWS_AS(replace_subtree(e, {8}, Expr::var()), IndexError);

  std::mt19937_64 rng(11);
  for (int k = 0; k < 300; ++k) {
    auto t = mathsynth::testing::random_equation(rng, 3);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(replace_subtree(t, {i}, subtree_at(t, {i})) == t);
  }
}

TEST_CASE("eval_at") {
  CHECK(eval_at(parse_prefix_expr("(+ (* 2 x) 1)"), Rational(3)) == Rational(7));
  CHECK(eval_at(parse_prefix_expr("(/ 3 5)"), Rational(11)) == Rational(3, 5));
  CHECK_THROWS_AS(eval_at(parse_prefix_expr("(/ 1 (- x x))"), Rational(2)), ArithmeticError);
}

TEST_CASE("check_solved") {
  CHECK(check_solved(parse_prefix("(= x (/ 3 5))")) == Rational(3, 5));
  CHECK(check_solved(parse_prefix("(= (/ 3 5) x)")) == Rational(3, 5));
  CHECK_FALSE(check_solved(parse_prefix("(= (* 5 x) 3)")));
  CHECK(check_solved(parse_prefix("(= x -4)")) == Rational(-4));
  CHECK_FALSE(check_solved(parse_prefix("(= x (/ 6 10))")));
  CHECK_FALSE(check_solved(parse_prefix("(= x (/ 6 1))")));
  CHECK_FALSE(check_solved(parse_prefix("(= x x)")));
}

TEST_CASE("rational") {
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational::parse("3/5").str() == "3/5");
  CHECK(Rational::parse("-8/4").str() == "-2");
  CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
  CHECK_THROWS_AS(Rational(1) / Rational(0), ArithmeticError);
  CHECK_THROWS_AS(Rational(INT64_MAX) + Rational(1), ArithmeticError);
}
