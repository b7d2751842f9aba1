// SPDX-License-Identifier: Apache-2.0
//
// Best-first enumeration of programs in decreasing prior order.
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mathsynth/library.hpp"

namespace mathsynth {

struct SearchBudget {
  /// Partial programs popped (enumerate) or edges applied (solve_task).
  std::size_t max_expansions = 200000;
  double timeout_secs = 60.0;
  std::int64_t max_program_cost = 10000;
};

struct Enumerated {
  Term program;
  double log_prior = 0.0;
};

/// Streams closed programs of type tstr -> tstr or tint in non-increasing
/// prior order; equal priors come out in rendered-text order.
class Enumerator {
 public:
  Enumerator(const Library& lib, const Type& request, const SearchBudget& budget);
  ~Enumerator();
  Enumerator(Enumerator&&) noexcept;
  Enumerator& operator=(Enumerator&&) noexcept;

  std::optional<Enumerated> next();
  std::size_t expansions() const noexcept;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

/// Collects up to `limit` programs from an Enumerator.
std::vector<Enumerated> enumerate(const Library& lib, const Type& request, const SearchBudget& budget,
                                  std::size_t limit);

}  // namespace mathsynth
