// SPDX-License-Identifier: Apache-2.0
//
// Equation templates, task generation and the file formats.
//
// A template is a shape such as A*x + B = C plus an id; each template is
// instantiated once. Coefficients of x are drawn from 2..10 and the other
// constants from 1..10, all distinct within one equation, so that every
// instance of a shape simplifies the same way.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mathsynth/library.hpp"
#include "mathsynth/metric.hpp"
#include "mathsynth/task.hpp"

namespace mathsynth {

struct Shape {
  std::string_view id;
  /// Prefix form with slots A, B, C, D.
  std::string_view text;
  /// Per slot: 'c' coefficient, 'k' constant, '1' one minus A, ' ' unused.
  std::string_view slots;
};

const std::vector<Shape>& builtin_shapes();
const Shape& shape_by_id(std::string_view id);
/// Shape id of a template id "<shape>#<n>".
std::string_view shape_of_template(std::string_view template_id);

/// Solution of a linear or reciprocal equation by rational-function algebra;
/// nullopt when there is no unique solution.
std::optional<Rational> oracle_goal(const Equation& e) noexcept;

/// Fills the slots. Throws ValidationError if the result has no unique solution.
Equation instantiate(const Shape& shape, std::array<std::int64_t, 4> constants);

/// Fresh constants for a shape; redraws degenerate cases.
Task random_instance(const Shape& shape, std::mt19937_64& rng, std::string id, std::string template_id);

struct GeneratedCorpus {
  std::vector<Task> train;
  std::vector<Task> test;
};

/// Template i uses shapes[i mod |shapes|] (all built-ins when empty); the
/// split shuffles template indices.
GeneratedCorpus generate_corpus(std::uint64_t seed, std::size_t n_templates, std::vector<std::string> shapes,
                                double train_fraction);

// ---- files -------------------------------------------------------------------

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// One JSON object per line: goal, id, input (prefix), template_id.
std::string tasks_to_jsonl(const std::vector<Task>& tasks);
/// Validates every equation and that the oracle agrees with the declared goal.
/// Throws ParseError/ValidationError naming the line.
std::vector<Task> tasks_from_jsonl(std::string_view text);
void save_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks);
std::vector<Task> load_tasks(const std::filesystem::path& path);

/// JSON object: task id -> list of step strings (infix or prefix).
SolutionMap solutions_from_json(std::string_view text, Solution::Source source);
std::string solutions_to_json(const SolutionMap& solutions);
SolutionMap load_solutions(const std::filesystem::path& path,
                           Solution::Source source = Solution::Source::IngestedBaseline);

struct Checkpoint {
  int iteration = 0;
  Library library = Library::initial();
  /// task id -> program text with abstractions by name.
  std::map<std::string, std::string> solved;
};

std::string checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(std::string_view text);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mathsynth
