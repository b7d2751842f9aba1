// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/metric.hpp"

#include <algorithm>
#include <cstdlib>

#include "mathsynth/error.hpp"
#include "mathsynth/interpreter.hpp"

namespace mathsynth {

std::int64_t solution_cost_f(const Solution& s) {
  if (s.states.empty()) throw ValidationError("solution for '" + s.task_id + "' has no states");
  std::int64_t f = 0;
  for (std::size_t i = 0; i + 1 < s.states.size(); ++i) {
    const Equation& a = s.states[i];
    const Equation& b = s.states[i + 1];
    std::int64_t dl = std::llabs(static_cast<std::int64_t>(a.lhs().size()) - b.lhs().size());
    std::int64_t dr = std::llabs(static_cast<std::int64_t>(a.rhs().size()) - b.rhs().size());
    f += std::max({dl, dr, std::int64_t{1}});
  }
  return f;
}

std::optional<Rational> c_score_exact(const Solution& target, const Solution& baseline) {
  if (target.task_id != baseline.task_id) {
    throw ValidationError("c_score compares different tasks: " + target.task_id + " vs " + baseline.task_id);
  }
  std::int64_t fb = solution_cost_f(baseline);
  std::int64_t fa = solution_cost_f(target);
  if (fb == 0) return std::nullopt;
  return Rational(fb - fa, fb);
}

std::optional<double> c_score(const Solution& target, const Solution& baseline) {
  auto c = c_score_exact(target, baseline);
  if (!c) return std::nullopt;
  return static_cast<double>(c->num()) / static_cast<double>(c->den());
}

MetricReport mean_c_score(const SolutionMap& targets, const SolutionMap& baselines) {
  MetricReport r;
  r.target_solved = targets.size();
  r.baseline_solved = baselines.size();
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& [id, t] : targets) {
    auto it = baselines.find(id);
    if (it == baselines.end()) continue;
    ++r.intersection;
    MetricRow row{id, solution_cost_f(t), solution_cost_f(it->second), c_score(t, it->second)};
    if (row.c) {
      sum += *row.c;
      ++defined;
    } else {
      ++r.undefined;
    }
    r.rows.push_back(std::move(row));
  }
  if (defined > 0) r.mean = sum / static_cast<double>(defined);
  return r;
}

Solution extract_steps(const Term& program, const Equation& input, std::string task_id) {
  Evaluation ev = evaluate(program, input, EvalOptions{true});
  return Solution{std::move(task_id), std::move(ev.trace), Solution::Source::ProgramTrace};
}

Solution dedup_steps(const Solution& s) {
  Solution out{s.task_id, {}, s.source};
  for (const Equation& e : s.states) {
    if (out.states.empty() || !(out.states.back() == e)) out.states.push_back(e);
  }
  return out;
}

SolutionMap dedup_steps(const SolutionMap& m) {
  SolutionMap out;
  for (const auto& [id, s] : m) out.emplace(id, dedup_steps(s));
  return out;
}

}  // namespace mathsynth
