// SPDX-License-Identifier: Apache-2.0
//
// Call-by-value evaluation of programs on equations, with optional step traces.
//
// A trace records the input, then every equation-valued primitive result that
// happens outside abstraction bodies, then the final result of each top-level
// abstraction call. Work done inside an abstraction is not recorded.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mathsynth/program.hpp"

namespace mathsynth {

inline constexpr std::size_t kDefaultStepLimit = 100000;

struct EvalOptions {
  bool trace = false;
  std::size_t step_limit = kDefaultStepLimit;
};

struct Evaluation {
  Equation output;
  std::vector<Equation> trace;
};

/// Runs a tstr -> tstr program. Throws EvaluationError naming the failing step.
Evaluation evaluate(const Term& program, const Equation& input, const EvalOptions& options = {});

struct EvalFailure {
  Fault fault;
  std::size_t step = 0;
};

/// Non-throwing core. When `trace` is given, states are appended to it.
Outcome<Equation> try_evaluate(const Term& program, const Equation& input, std::vector<Equation>* trace = nullptr,
                               std::size_t step_limit = kDefaultStepLimit, std::size_t* failing_step = nullptr);

/// Calls an abstraction of type tstr -> tint... -> tstr.
Outcome<Equation> try_invoke(const Abstraction& a, const Equation& e, std::span<const std::int64_t> ints,
                             std::size_t step_limit = kDefaultStepLimit);

/// Value of a closed tint term.
Outcome<std::int64_t> try_eval_int(const Term& t, std::size_t step_limit = kDefaultStepLimit);

}  // namespace mathsynth
