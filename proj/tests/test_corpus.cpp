#include <filesystem>

#include "doctest.h"
#include "worked_example.hpp"
#include "mathsynth/corpus.hpp"
#include "support.hpp"

using namespace mathsynth;

namespace {

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "mathsynth_test_corpus";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("oracle on worked examples") {
  CHECK(*oracle_goal(parse_prefix("(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)")) == Rational(3, 5));
  CHECK(*oracle_goal(instantiate(shape_by_id("a_over_x_plus_b"), {6, 1, 4, 0})) == Rational(2));
  CHECK(*oracle_goal(parse_infix("2x+5 = 7")) == Rational(1));
  CHECK_FALSE(oracle_goal(parse_infix("2x = 2x")));
  CHECK_FALSE(oracle_goal(parse_infix("x*x = 4")));
  CHECK_FALSE(oracle_goal(parse_infix("3/x = 0")));
  CHECK_THROWS_AS(instantiate(shape_by_id("a_eq_bx_minus_cx"), {4, 3, 3, 0}), ValidationError);
  Equation worked = instantiate(shape_by_id("a_plus_bx_plus_cx"), {1, 2, 3, 4});
  CHECK(to_prefix(worked) == "(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)");
}

TEST_CASE("generated corpora are deterministic and labelled") {
  auto a = generate_corpus(42, 30, {}, 0.7);
  auto b = generate_corpus(42, 30, {}, 0.7);
  CHECK(tasks_to_jsonl(a.train) == tasks_to_jsonl(b.train));
  CHECK(tasks_to_jsonl(a.test) == tasks_to_jsonl(b.test));
  CHECK(a.train.size() == 21);
  CHECK(a.test.size() == 9);
  CHECK(tasks_to_jsonl(generate_corpus(43, 30, {}, 0.7).train) != tasks_to_jsonl(a.train));
  for (const auto* part : {&a.train, &a.test}) {
    for (const Task& t : *part) {
      CHECK(eval_at(t.input.lhs(), t.goal) == eval_at(t.input.rhs(), t.goal));
      for (const Task& u : (part == &a.train ? a.test : a.train)) CHECK(t.template_id != u.template_id);
    }
  }
}

TEST_CASE("task files round trip and validate") {
  auto c = generate_corpus(1, 8, {}, 1.0);
  auto path = scratch("tasks.jsonl");
  save_tasks(path, c.train);
  auto back = load_tasks(path);
  REQUIRE(back.size() == c.train.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].input == c.train[i].input);
    CHECK(back[i].goal == c.train[i].goal);
    CHECK(back[i].template_id == c.train[i].template_id);
  }
  CHECK_THROWS_AS(
      tasks_from_jsonl(R"j({"goal":"1/2","id":"t","input":"(= (+ (+ 1 (* 2 x)) (* 3 x)) 4)","template_id":"s#0"})j"),
      ValidationError);
  CHECK_THROWS_WITH_AS(tasks_from_jsonl("\n{\"goal\":\"1\",\"id\":\"t\",\"input\":\"(= (+ x\",\"template_id\":\"s\"}"),
                       doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("baseline solutions ingest") {
  std::string text = "{\"worked\": [";
  for (std::size_t i = 0; i < testing::kWorkedLong.size(); ++i) {
    text += (i ? ", \"" : "\"") + std::string(testing::kWorkedLong[i]) + "\"";
  }
  text += "]}";
  auto m = solutions_from_json(text, Solution::Source::IngestedBaseline);
  CHECK(m.at("worked").states.size() == 16);
  auto again = solutions_from_json(solutions_to_json(m), Solution::Source::IngestedBaseline);
  CHECK(again.at("worked").states == m.at("worked").states);
  CHECK_THROWS_AS(solutions_from_json(R"({"a": ["x = = 1"]})", Solution::Source::IngestedBaseline), ValidationError);
}

TEST_CASE("checkpoint round trip") {
  Checkpoint c;
  c.iteration = 3;
  auto f0 = c.library.add_abstraction(
      make_abstraction("", parse_program("(lambda (lambda (simplify (rrotate $1 $0) 0)))"), 1));
  auto known = c.library.abstractions();
  c.library.add_abstraction(make_abstraction(
      "", parse_program("(lambda (#(lambda (lambda (simplify (rrotate $1 $0) 0))) (sub $0 5) 1))", known), 2));
  std::vector<Term> corpus{parse_program("(lambda (f1 (f0 $0 2)))", c.library.abstractions())};
  c.library = fit_grammar(c.library, corpus);
  c.solved["t001"] = "(lambda (f1 (f0 $0 2)))";
  auto path = scratch("ckpt.json");
  save_checkpoint(path, c);
  Checkpoint d = load_checkpoint(path);
  CHECK(d.iteration == 3);
  REQUIRE(d.library.productions().size() == c.library.productions().size());
  for (std::size_t i = 0; i < d.library.productions().size(); ++i) {
    CHECK(d.library.productions()[i].log_weight == c.library.productions()[i].log_weight);
    CHECK(d.library.productions()[i].name() == c.library.productions()[i].name());
  }
  CHECK(d.library.variable_log_weight() == c.library.variable_log_weight());
  CHECK(d.solved == c.solved);
  CHECK(checkpoint_to_json(d) == checkpoint_to_json(c));
  CHECK(d.library.abstractions()[1]->body == c.library.abstractions()[1]->body);
}
