// SPDX-License-Identifier: Apache-2.0
//
// Per-task program search.
//
// Every equation function takes the equation as its first argument, so a
// solving program is a chain (lambda (f_k ... (f_1 $0 a_1) ... a_k)). The
// search runs uniform-cost over equation states: an edge applies one library
// function with fixed index arguments and costs its negative log-probability.
// Since that cost does not depend on the state, edges are sorted once per
// library and expanded lazily, one edge per queue pop. The first program that
// reaches a state is therefore its most probable chain, and solutions come out
// in prior order.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mathsynth/enumerator.hpp"
#include "mathsynth/task.hpp"

namespace mathsynth {

struct SolveOptions {
  SearchBudget budget;
  /// Programs kept per task.
  std::size_t k = 5;
  /// After the first solution, keep searching while the frontier cost is
  /// within this many nats of it.
  double solution_window = 1.0;
  /// States larger than this are not explored.
  std::uint32_t max_state_nodes = 40;
};

struct Candidate {
  Term program;
  double log_prior = 0.0;
};

struct SolveResult {
  std::vector<Candidate> programs;
  std::size_t expansions = 0;
  /// Expansions spent when the first solution appeared (0 if none).
  std::size_t first_solution_at = 0;
  std::size_t states = 0;
  bool timed_out = false;
};

/// Edge tables derived from a library; immutable and shareable across threads.
class SolverContext {
 public:
  explicit SolverContext(const Library& lib);
  ~SolverContext();
  SolverContext(const SolverContext&) = delete;
  SolverContext& operator=(const SolverContext&) = delete;

  const Library& library() const noexcept;

  /// Most probable index term for each value 0..110 (nullopt if unreachable).
  const std::vector<std::optional<Candidate>>& index_terms() const noexcept;
  std::size_t edge_count() const noexcept;

  struct Impl;
  const Impl& impl() const noexcept { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

SolveResult solve_task(const Task& task, const SolverContext& ctx, const SolveOptions& options);
SolveResult solve_task(const Task& task, const Library& lib, const SolveOptions& options);

}  // namespace mathsynth
