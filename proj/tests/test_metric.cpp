#include <random>

#include "doctest.h"
#include "worked_example.hpp"
#include "mathsynth/metric.hpp"
#include "support.hpp"

using namespace mathsynth;

namespace {

template <class Lines>
Solution solution(const Lines& lines, std::string id = "worked") {
  Solution s{std::move(id), {}, Solution::Source::IngestedBaseline};
  for (const char* l : lines) s.states.push_back(parse_infix(l));
  return s;
}

}  // namespace

TEST_CASE("f of the short solution") {
  Solution s = solution(testing::kWorkedShort);
  CHECK(solution_cost_f(s) == 8);
  CHECK(solution_cost_f(Solution{"one", {s.states[0]}}) == 0);
  CHECK(solution_cost_f(Solution{"two", {s.states[0], s.states[0]}}) == 1);
  CHECK_THROWS_AS(solution_cost_f(Solution{"empty", {}}), ValidationError);
}

TEST_CASE("C-score against the long trace") {
  Solution a = solution(testing::kWorkedShort);
  Solution b = solution(testing::kWorkedLong);
  REQUIRE(b.states.size() == 16);
  CHECK(solution_cost_f(b) == 24);
  CHECK(*c_score_exact(a, b) == Rational(2, 3));
  Solution bd = dedup_steps(b);
  CHECK(bd.states.size() == 15);
  CHECK(solution_cost_f(bd) == 23);
  CHECK(*c_score_exact(dedup_steps(a), bd) == Rational(15, 23));
  CHECK(*c_score(a, a) == 0.0);
  CHECK_FALSE(c_score(a, Solution{"worked", {a.states[0]}}));
  CHECK_THROWS_AS(c_score(a, solution(testing::kWorkedLong, "other")), ValidationError);
}

TEST_CASE("dedup collapses only consecutive repeats") {
  Equation a = parse_infix("x = 1"), b = parse_infix("x = 2");
  CHECK(dedup_steps(Solution{"t", {a, a, b}}).states.size() == 2);
  CHECK(dedup_steps(Solution{"t", {a, b, a}}).states.size() == 3);
}

TEST_CASE("mean over the solved intersection") {
  SolutionMap targets, baselines;
  CHECK_FALSE(mean_c_score(targets, baselines).mean);
  Equation e0 = parse_infix("x+1 = 2"), e1 = parse_infix("x = 1");
  // f = 2 against f = 5 and f = 10: C = 0.6 and 0.8.
  targets["a"] = Solution{"a", {e0, e1}};
  baselines["a"] = Solution{"a", {e0, e1, e1, e1, e1}};
  targets["b"] = Solution{"b", {e0, e1}};
  baselines["b"] = Solution{"b", std::vector<Equation>(11, e1)};
  targets["c"] = Solution{"c", {e0}};
  baselines["d"] = Solution{"d", {e0}};
  auto r = mean_c_score(targets, baselines);
  CHECK(r.intersection == 2);
  CHECK(r.target_solved == 3);
  CHECK(*r.mean == doctest::Approx(0.7));
  auto self = mean_c_score(targets, targets);
  CHECK(*self.mean == 0.0);
  CHECK(self.undefined == 1);
}

TEST_CASE("f floor and dedup invariants on random solutions") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Solution s{"r", {}};
    int n = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) s.states.push_back(testing::random_equation(rng, 2));
    CHECK(solution_cost_f(s) >= n - 1);
    CHECK(solution_cost_f(dedup_steps(s)) <= solution_cost_f(s));
    if (n > 1) CHECK(*c_score(s, s) == 0.0);
  }
}
