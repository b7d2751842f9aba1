// SPDX-License-Identifier: Apache-2.0
//
// Conciseness of step-by-step solutions.
//
//   f(s) = sum over consecutive states of max(|dL|, |dR|, 1)
//   C(target, baseline) = (f(baseline) - f(target)) / f(baseline)
//
// dL and dR are node-count changes of the two sides of "=".
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mathsynth/expr.hpp"
#include "mathsynth/program.hpp"
#include "mathsynth/rational.hpp"

namespace mathsynth {

struct Solution {
  enum class Source : std::uint8_t { ProgramTrace, IngestedBaseline };
  std::string task_id;
  std::vector<Equation> states;
  Source source = Source::ProgramTrace;
};

/// Throws ValidationError on an empty solution.
std::int64_t solution_cost_f(const Solution& s);

/// Exact C-score; nullopt when f(baseline) = 0. Throws ValidationError when
/// the task ids differ.
std::optional<Rational> c_score_exact(const Solution& target, const Solution& baseline);
std::optional<double> c_score(const Solution& target, const Solution& baseline);

struct MetricRow {
  std::string task_id;
  std::int64_t f_target = 0;
  std::int64_t f_baseline = 0;
  std::optional<double> c;
};

struct MetricReport {
  std::vector<MetricRow> rows;  // the solved intersection, by task id
  std::size_t target_solved = 0;
  std::size_t baseline_solved = 0;
  std::size_t intersection = 0;
  std::size_t undefined = 0;  // rows whose baseline has f = 0
  /// Mean over defined rows; nullopt when there are none.
  std::optional<double> mean;
};

using SolutionMap = std::map<std::string, Solution>;

MetricReport mean_c_score(const SolutionMap& targets, const SolutionMap& baselines);

/// Trace of a tstr -> tstr program; the first state is the input.
/// Evaluation errors propagate as EvaluationError.
Solution extract_steps(const Term& program, const Equation& input, std::string task_id = {});

/// Collapses runs of equal consecutive states.
Solution dedup_steps(const Solution& s);
SolutionMap dedup_steps(const SolutionMap& m);

}  // namespace mathsynth
