// SPDX-License-Identifier: Apache-2.0
//
// Wake / abstraction-sleep / refit loop.
//
// Each iteration solves every training task against a frozen library, keeps
// the cheapest known program per task (the frontier), compresses the frontier
// into new abstractions, rewrites it and refits the grammar on the result.
// Search is bounded by expansion counts, so runs are reproducible as long as
// the wall-clock timeout never fires.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mathsynth/compression.hpp"
#include "mathsynth/corpus.hpp"
#include "mathsynth/solver.hpp"

namespace mathsynth {

struct TrainConfig {
  int iterations = 5;
  /// Held-out evaluation every k iterations; the last iteration is always evaluated.
  int eval_every = 1;
  SolveOptions solve;
  int rounds = 3;
  int max_arity = 2;
  std::uint64_t seed = 0;
  /// Worker threads for wake and evaluation.
  int jobs = 1;
  /// When set, checkpoints, curve.tsv and report.json go here.
  std::optional<std::filesystem::path> out;
};

struct TaskOutcome {
  std::string task_id;
  bool solved = false;
  /// Cheapest program found in this pass.
  std::optional<Candidate> program;
  std::size_t expansions = 0;
  /// f of the de-duplicated trace of `program`.
  std::int64_t f_dedup = 0;
  std::int64_t f_raw = 0;
};

struct IterationStats {
  int iteration = 0;
  std::vector<TaskOutcome> wake;
  std::size_t train_solved = 0;
  /// Tasks solved in any iteration so far.
  std::size_t train_covered = 0;
  std::optional<std::vector<TaskOutcome>> test;
  std::size_t test_solved = 0;
  std::vector<std::string> new_abstractions;  // inline bodies
  std::size_t library_size = 0;
  std::int64_t corpus_cost_before = 0;
  std::int64_t corpus_cost_after = 0;
};

struct TrainResult {
  Library library = Library::initial();
  /// Final frontier: task id -> cheapest program, rewritten with the library.
  std::map<std::string, Term> frontier;
  std::vector<IterationStats> iterations;
};

/// Solves tasks in parallel against one library snapshot; output in input order.
std::vector<TaskOutcome> solve_all(const std::vector<Task>& tasks, const SolverContext& ctx,
                                   const SolveOptions& options, int jobs);

TrainResult run_training_loop(const std::vector<Task>& train, const std::vector<Task>& test,
                              const TrainConfig& config);

/// Number of frontier programs that reference each abstraction directly.
std::map<std::string, std::size_t> abstraction_usage(const TrainResult& r);

std::string curve_tsv(const TrainResult& r, std::size_t n_train, std::size_t n_test);
std::string report_json(const TrainResult& r, const TrainConfig& config, std::size_t n_train, std::size_t n_test);

}  // namespace mathsynth
