// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/training.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <set>
#include <thread>

#include "json.hpp"
#include "mathsynth/error.hpp"
#include "mathsynth/metric.hpp"

namespace mathsynth {
namespace {

// Cheaper program first, then more probable, then by text.
bool better(const Term& a, double lpa, const Term& b, double lpb) {
  if (a.cost() != b.cost()) return a.cost() < b.cost();
  if (lpa != lpb) return lpa > lpb;
  return render(a) < render(b);
}

TaskOutcome solve_one(const Task& task, const SolverContext& ctx, const SolveOptions& options) {
  SolveResult r = solve_task(task, ctx, options);
  TaskOutcome out;
  out.task_id = task.id;
  out.expansions = r.expansions;
  for (const Candidate& c : r.programs) {
    if (!out.program || better(c.program, c.log_prior, out.program->program, out.program->log_prior)) {
      out.program = c;
    }
  }
  if (out.program) {
    out.solved = true;
    Solution s = extract_steps(out.program->program, task.input, task.id);
    out.f_raw = solution_cost_f(s);
    out.f_dedup = solution_cost_f(dedup_steps(s));
  }
  if (r.timed_out) spdlog::warn("task {} hit the wall-clock timeout; results may vary between runs", task.id);
  return out;
}

double mean_f(const std::vector<TaskOutcome>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : v) {
    if (o.solved) {
      sum += static_cast<double>(o.f_dedup);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void write_outputs(const TrainResult& r, const TrainConfig& config, std::size_t n_train, std::size_t n_test) {
  if (!config.out) return;
  write_file_atomic(*config.out / "curve.tsv", curve_tsv(r, n_train, n_test));
  write_file_atomic(*config.out / "report.json", report_json(r, config, n_train, n_test));
}

void checkpoint(const TrainConfig& config, int iteration, const Library& lib, const std::map<std::string, Term>& frontier) {
  if (!config.out) return;
  Checkpoint c;
  c.iteration = iteration;
  c.library = lib;
  for (const auto& [id, p] : frontier) c.solved[id] = render(p, AbstractionStyle::Named);
  char name[40];
  std::snprintf(name, sizeof name, "checkpoint_%03d.json", iteration);
  save_checkpoint(*config.out / name, c);
  save_checkpoint(*config.out / "checkpoint.json", c);
}

}  // namespace

std::vector<TaskOutcome> solve_all(const std::vector<Task>& tasks, const SolverContext& ctx,
                                   const SolveOptions& options, int jobs) {
  std::vector<TaskOutcome> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      out[i] = solve_one(tasks[i], ctx, options);
      spdlog::debug("task {}: {} after {} expansions", tasks[i].id,
                    out[i].solved ? render(out[i].program->program, AbstractionStyle::Named) : "unsolved",
                    out[i].expansions);
    }
  };
  int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

TrainResult run_training_loop(const std::vector<Task>& train, const std::vector<Task>& test,
                              const TrainConfig& config) {
  if (config.iterations < 0) throw ValidationError("iterations must be non-negative");
  if (config.eval_every < 1) throw ValidationError("eval_every must be positive");
  if (config.out) std::filesystem::create_directories(*config.out);

  TrainResult result;
  Library& lib = result.library;
  std::set<std::string> covered;
  checkpoint(config, 0, lib, result.frontier);

  for (int it = 1; it <= config.iterations; ++it) {
    auto start = std::chrono::steady_clock::now();
    IterationStats stats;
    stats.iteration = it;
    {
      SolverContext ctx(lib);
      stats.wake = solve_all(train, ctx, config.solve, config.jobs);
    }
    for (const TaskOutcome& o : stats.wake) {
      if (!o.solved) continue;
      ++stats.train_solved;
      covered.insert(o.task_id);
      auto it_old = result.frontier.find(o.task_id);
      if (it_old == result.frontier.end()) {
        result.frontier.emplace(o.task_id, o.program->program);
      } else if (better(o.program->program, o.program->log_prior, it_old->second, log_prior(lib, it_old->second))) {
        it_old->second = o.program->program;
      }
    }
    stats.train_covered = covered.size();

    std::vector<CorpusEntry> corpus;
    for (const auto& [id, p] : result.frontier) corpus.push_back({id, p});
    stats.corpus_cost_before = corpus_cost(corpus);
    if (!corpus.empty()) {
      CompressOptions copt;
      copt.rounds = config.rounds;
      copt.max_arity = config.max_arity;
      copt.iteration = it;
      copt.first_name_index = lib.abstractions().size();
      CompressResult cr = compress(corpus, copt);
      for (const auto& step : cr.steps) {
        lib.add_abstraction(step.abstraction);
        stats.new_abstractions.push_back(render(Term::abs(step.abstraction)));
        spdlog::info("iteration {}: {} = {} (utility {}, saved {})", it, step.abstraction->name,
                     render(step.abstraction->body, AbstractionStyle::Named), step.utility, step.realized_saving);
      }
      corpus = std::move(cr.corpus);
      for (const auto& e : corpus) result.frontier.at(e.task_id) = e.program;
    }
    stats.corpus_cost_after = corpus_cost(corpus);
    std::vector<Term> programs;
    for (const auto& e : corpus) programs.push_back(e.program);
    lib = fit_grammar(lib, programs);
    lib.set_iteration(it);
    stats.library_size = lib.abstractions().size();

    if (it % config.eval_every == 0 || it == config.iterations) {
      SolverContext ctx(lib);
      stats.test = solve_all(test, ctx, config.solve, config.jobs);
      stats.test_solved = static_cast<std::size_t>(
          std::count_if(stats.test->begin(), stats.test->end(), [](const TaskOutcome& o) { return o.solved; }));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    spdlog::info("iteration {}: train {}/{} (covered {}), test {}, library {} abstractions, {:.1f}s", it,
                 stats.train_solved, train.size(), stats.train_covered,
                 stats.test ? std::to_string(stats.test_solved) + "/" + std::to_string(test.size()) : "-",
                 stats.library_size, secs);
    result.iterations.push_back(std::move(stats));
    checkpoint(config, it, lib, result.frontier);
    write_outputs(result, config, train.size(), test.size());
  }
  write_outputs(result, config, train.size(), test.size());
  return result;
}

std::map<std::string, std::size_t> abstraction_usage(const TrainResult& r) {
  std::map<std::string, std::size_t> usage;
  for (const auto& a : r.library.abstractions()) usage[a->name] = 0;
  for (const auto& [id, p] : r.frontier) {
    std::set<std::string> seen;
    std::vector<const Term*> stack{&p};
    while (!stack.empty()) {
      const Term* t = stack.back();
      stack.pop_back();
      switch (t->kind()) {
        case Term::Kind::Lambda: stack.push_back(&t->body()); break;
        case Term::Kind::Apply:
          stack.push_back(&t->fn());
          stack.push_back(&t->arg());
          break;
        case Term::Kind::Abs: seen.insert(t->abstraction()->name); break;
        default: break;
      }
    }
    for (const auto& n : seen) ++usage[n];
  }
  return usage;
}

std::string curve_tsv(const TrainResult& r, std::size_t n_train, std::size_t n_test) {
  std::string out =
      "iteration\ttrain_solved\ttrain_accuracy\ttrain_covered\ttrain_coverage\ttest_solved\ttest_accuracy\t"
      "abstractions\tmean_f_dedup\n";
  auto ratio = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  for (const auto& s : r.iterations) {
    out += std::to_string(s.iteration) + "\t" + std::to_string(s.train_solved) + "\t" +
           fixed(ratio(s.train_solved, n_train)) + "\t" + std::to_string(s.train_covered) + "\t" +
           fixed(ratio(s.train_covered, n_train)) + "\t" + (s.test ? std::to_string(s.test_solved) : "-") + "\t" +
           (s.test ? fixed(ratio(s.test_solved, n_test)) : "-") + "\t" + std::to_string(s.library_size) + "\t" +
           fixed(mean_f(s.wake)) + "\n";
  }
  return out;
}

std::string report_json(const TrainResult& r, const TrainConfig& config, std::size_t n_train, std::size_t n_test) {
  using nlohmann::json;
  auto outcomes = [](const std::vector<TaskOutcome>& v) {
    json j = json::object();
    for (const auto& o : v) {
      json e{{"solved", o.solved}, {"expansions", o.expansions}};
      if (o.program) {
        e["program"] = render(o.program->program, AbstractionStyle::Named);
        e["log_prior"] = o.program->log_prior;
        e["f_raw"] = o.f_raw;
        e["f_dedup"] = o.f_dedup;
      }
      j[o.task_id] = std::move(e);
    }
    return j;
  };
  json iters = json::array();
  for (const auto& s : r.iterations) {
    json e{{"iteration", s.iteration},
           {"train_solved", s.train_solved},
           {"train_covered", s.train_covered},
           {"abstractions", s.library_size},
           {"new_abstractions", s.new_abstractions},
           {"corpus_cost_before", s.corpus_cost_before},
           {"corpus_cost_after", s.corpus_cost_after},
           {"mean_f_dedup", mean_f(s.wake)},
           {"wake", outcomes(s.wake)}};
    if (s.test) {
      e["test_solved"] = s.test_solved;
      e["test"] = outcomes(*s.test);
    }
    iters.push_back(std::move(e));
  }
  auto usage = abstraction_usage(r);
  json abstractions = json::array();
  for (const auto& a : r.library.abstractions()) {
    abstractions.push_back({{"name", a->name},
                            {"body", render(a->body, AbstractionStyle::Named)},
                            {"inline", render(Term::abs(a))},
                            {"type", a->type.str()},
                            {"origin_iteration", a->origin_iteration},
                            {"used_by", usage[a->name]}});
  }
  json frontier = json::object();
  for (const auto& [id, p] : r.frontier) frontier[id] = render(p, AbstractionStyle::Named);
  json cfg{{"iterations", config.iterations},
           {"eval_every", config.eval_every},
           {"budget_expansions", config.solve.budget.max_expansions},
           {"max_cost", config.solve.budget.max_program_cost},
           {"rounds", config.rounds},
           {"max_arity", config.max_arity},
           {"seed", config.seed},
           {"k", config.solve.k}};
  json j{{"config", cfg},
         {"train_tasks", n_train},
         {"test_tasks", n_test},
         {"iterations", iters},
         {"abstractions", abstractions},
         {"frontier", frontier}};
  return j.dump(2) + "\n";
}

}  // namespace mathsynth
