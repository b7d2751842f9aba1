// SPDX-License-Identifier: Apache-2.0
//
// mathsynth: generate corpora, train, solve, score and compare solutions.
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mathsynth/corpus.hpp"
#include "mathsynth/error.hpp"
#include "mathsynth/interpreter.hpp"
#include "mathsynth/metric.hpp"
#include "mathsynth/training.hpp"

namespace fs = std::filesystem;
using namespace mathsynth;
using nlohmann::json;

namespace {

struct Options {
  std::uint64_t seed = 0;
  int iterations = 5;
  int eval_every = 1;
  std::size_t budget_expansions = 1000000;
  double timeout_secs = 600;
  std::int64_t max_cost = 10000;
  int rounds = 3;
  int max_arity = 2;
  bool dedup = false;
  int jobs = 1;
  std::string out;

  // gen
  std::size_t templates = 30;
  double train_fraction = 0.7;
  std::vector<std::string> shapes;
  // inputs
  std::string train_path, test_path, tasks_path, checkpoint_path, solutions_path, target_path, baseline_path;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("mathsynth");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("MATHSYNTH_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

SolveOptions solve_options(const Options& o) {
  SolveOptions s;
  s.budget.max_expansions = o.budget_expansions;
  s.budget.timeout_secs = o.timeout_secs;
  s.budget.max_program_cost = o.max_cost;
  return s;
}

Library library_from(const Options& o) {
  if (o.checkpoint_path.empty()) return Library::initial();
  return load_checkpoint(o.checkpoint_path).library;
}

void emit(const Options& o, const std::string& default_name, const std::string& content) {
  if (o.out.empty()) return;
  fs::path p = o.out;
  if (fs::is_directory(p)) p /= default_name;
  write_file_atomic(p, content);
  spdlog::info("wrote {}", p.string());
}

int cmd_gen(const Options& o) {
  if (o.out.empty()) throw ValidationError("gen needs --out DIR");
  auto c = generate_corpus(o.seed, o.templates, o.shapes, o.train_fraction);
  fs::create_directories(o.out);
  save_tasks(fs::path(o.out) / "train.jsonl", c.train);
  save_tasks(fs::path(o.out) / "test.jsonl", c.test);
  std::printf("%zu train and %zu test tasks written to %s\n", c.train.size(), c.test.size(), o.out.c_str());
  return 0;
}

int cmd_train(const Options& o) {
  auto train = load_tasks(o.train_path);
  std::vector<Task> test;
  if (!o.test_path.empty()) test = load_tasks(o.test_path);
  TrainConfig cfg;
  cfg.iterations = o.iterations;
  cfg.eval_every = o.eval_every;
  cfg.solve = solve_options(o);
  cfg.rounds = o.rounds;
  cfg.max_arity = o.max_arity;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  if (!o.out.empty()) cfg.out = o.out;
  auto r = run_training_loop(train, test, cfg);
  std::fputs(curve_tsv(r, train.size(), test.size()).c_str(), stdout);
  return 0;
}

int cmd_solve(const Options& o) {
  Library lib = library_from(o);
  auto tasks = load_tasks(o.tasks_path);
  SolverContext ctx(lib);
  auto outcomes = solve_all(tasks, ctx, solve_options(o), o.jobs);
  SolutionMap solutions;
  json programs = json::object();
  std::size_t solved = 0;
  std::printf("%-8s %-7s %6s  %s\n", "task", "solved", "f", "program");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& oc = outcomes[i];
    if (!oc.solved) {
      std::printf("%-8s %-7s %6s  -\n", oc.task_id.c_str(), "no", "-");
      continue;
    }
    ++solved;
    Solution s = extract_steps(oc.program->program, tasks[i].input, oc.task_id);
    if (o.dedup) s = dedup_steps(s);
    std::string text = render(oc.program->program, AbstractionStyle::Named);
    std::printf("%-8s %-7s %6lld  %s\n", oc.task_id.c_str(), "yes", static_cast<long long>(solution_cost_f(s)),
                text.c_str());
    programs[oc.task_id] = text;
    solutions.emplace(oc.task_id, std::move(s));
  }
  std::printf("solved %zu/%zu\n", solved, tasks.size());
  emit(o, "solutions.json", solutions_to_json(solutions));
  if (!o.out.empty()) {
    fs::path p = fs::path(o.out).replace_extension(".programs.json");
    if (fs::is_directory(o.out)) p = fs::path(o.out) / "programs.json";
    write_file_atomic(p, programs.dump(2) + "\n");
  }
  return 0;
}

int cmd_score(const Options& o) {
  auto sols = load_solutions(o.solutions_path, Solution::Source::IngestedBaseline);
  if (o.dedup) sols = dedup_steps(sols);
  json j = json::object();
  std::printf("%-12s %6s %6s\n", "task", "steps", "f");
  for (const auto& [id, s] : sols) {
    auto f = solution_cost_f(s);
    std::printf("%-12s %6zu %6lld\n", id.c_str(), s.states.size(), static_cast<long long>(f));
    j[id] = {{"steps", s.states.size()}, {"f", f}};
  }
  emit(o, "scores.json", j.dump(2) + "\n");
  return 0;
}

json report_to_json(const MetricReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e{{"task", row.task_id}, {"f_target", row.f_target}, {"f_baseline", row.f_baseline}};
    e["c"] = row.c ? json(*row.c) : json(nullptr);
    rows.push_back(std::move(e));
  }
  json j{{"target_solved", r.target_solved},
         {"baseline_solved", r.baseline_solved},
         {"intersection", r.intersection},
         {"undefined", r.undefined},
         {"rows", rows}};
  j["mean_c"] = r.mean ? json(*r.mean) : json(nullptr);
  return j;
}

int cmd_compare(const Options& o) {
  auto target = load_solutions(o.target_path, Solution::Source::ProgramTrace);
  auto baseline = load_solutions(o.baseline_path, Solution::Source::IngestedBaseline);
  MetricReport raw = mean_c_score(target, baseline);
  MetricReport dd = mean_c_score(dedup_steps(target), dedup_steps(baseline));
  std::printf("%-12s %8s %8s %9s %8s %8s %9s\n", "task", "f_tgt", "f_base", "C", "f_tgt'", "f_base'", "C'");
  auto cstr = [](const std::optional<double>& c) {
    char buf[32];
    if (c) {
      std::snprintf(buf, sizeof buf, "%.4f", *c);
    } else {
      std::snprintf(buf, sizeof buf, "undef");
    }
    return std::string(buf);
  };
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& a = raw.rows[i];
    const auto& b = dd.rows[i];
    std::printf("%-12s %8lld %8lld %9s %8lld %8lld %9s\n", a.task_id.c_str(), static_cast<long long>(a.f_target),
                static_cast<long long>(a.f_baseline), cstr(a.c).c_str(), static_cast<long long>(b.f_target),
                static_cast<long long>(b.f_baseline), cstr(b.c).c_str());
  }
  std::printf("solved: target %zu, baseline %zu, both %zu\n", raw.target_solved, raw.baseline_solved,
              raw.intersection);
  std::printf("mean C-score: %s raw, %s de-duplicated\n", cstr(raw.mean).c_str(), cstr(dd.mean).c_str());
  json j{{"raw", report_to_json(raw)}, {"dedup", report_to_json(dd)}};
  emit(o, "compare.json", j.dump(2) + "\n");
  return 0;
}

int cmd_library(const Options& o) {
  Checkpoint c = load_checkpoint(o.checkpoint_path);
  std::vector<Task> tasks;
  if (!o.tasks_path.empty()) tasks = load_tasks(o.tasks_path);
  auto known = c.library.abstractions();
  std::printf("library at iteration %d: %zu abstractions\n\n", c.iteration, known.size());
  for (const auto& a : known) {
    std::printf("%s : %s  (iteration %d)\n  %s\n", a->name.c_str(), a->type.str().c_str(), a->origin_iteration,
                render(a->body, AbstractionStyle::Named).c_str());
    std::size_t used = 0;
    std::string example;
    for (const auto& [id, text] : c.solved) {
      if (text.find(a->name + " ") == std::string::npos && text.find(a->name + ")") == std::string::npos) continue;
      ++used;
      if (!example.empty()) continue;
      for (const Task& t : tasks) {
        if (t.id != id) continue;
        Term p = parse_program(text, known);
        Solution s = dedup_steps(extract_steps(p, t.input, id));
        example = to_infix(t.input) + "  ->  " + to_infix(s.states.back()) + "   via " + text;
      }
    }
    std::printf("  used by %zu solutions\n", used);
    if (!example.empty()) std::printf("  e.g. %s\n", example.c_str());
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Equation solving by program synthesis with learned abstractions"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--budget-expansions", o.budget_expansions, "Search pops per task");
    c->add_option("--timeout-secs", o.timeout_secs, "Wall-clock limit per task");
    c->add_option("--max-cost", o.max_cost, "Largest program cost explored");
    c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    c->add_flag("--dedup", o.dedup, "Collapse repeated consecutive steps");
    c->add_option("--out", o.out, "Output file or directory");
  };

  auto* gen = app.add_subcommand("gen", "Generate a train/test corpus");
  add_common(gen);
  gen->add_option("--templates", o.templates, "Number of templates");
  gen->add_option("--train-fraction", o.train_fraction, "Share of templates used for training");
  gen->add_option("--shapes", o.shapes, "Shape ids (default: all built-in)");

  auto* train = app.add_subcommand("train", "Run the wake/sleep loop");
  add_common(train);
  train->add_option("--train", o.train_path, "Training tasks (JSONL)")->required();
  train->add_option("--test", o.test_path, "Held-out tasks (JSONL)");
  train->add_option("--iterations", o.iterations, "Iterations")->check(CLI::NonNegativeNumber);
  train->add_option("--eval-every", o.eval_every, "Held-out evaluation period")->check(CLI::PositiveNumber);
  train->add_option("--rounds", o.rounds, "Compression rounds per iteration")->check(CLI::PositiveNumber);
  train->add_option("--max-arity", o.max_arity, "Abstraction arity limit")->check(CLI::NonNegativeNumber);

  auto* solve = app.add_subcommand("solve", "Solve tasks with a library");
  add_common(solve);
  solve->add_option("--tasks", o.tasks_path, "Tasks (JSONL)")->required();
  solve->add_option("--checkpoint", o.checkpoint_path, "Library checkpoint (default: base library)");

  auto* score = app.add_subcommand("score", "Conciseness f per solution");
  add_common(score);
  score->add_option("--solutions", o.solutions_path, "Solution file")->required();

  auto* compare = app.add_subcommand("compare", "C-scores of a target against a baseline");
  add_common(compare);
  compare->add_option("--target", o.target_path, "Target solution file")->required();
  compare->add_option("--baseline", o.baseline_path, "Baseline solution file")->required();

  auto* library = app.add_subcommand("library", "Show learned abstractions");
  add_common(library);
  library->add_option("--checkpoint", o.checkpoint_path, "Checkpoint")->required();
  library->add_option("--tasks", o.tasks_path, "Tasks used for examples");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(o);
    if (*train) return cmd_train(o);
    if (*solve) return cmd_solve(o);
    if (*score) return cmd_score(o);
    if (*compare) return cmd_compare(o);
    if (*library) return cmd_library(o);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 2;
  }
  return 0;
}
