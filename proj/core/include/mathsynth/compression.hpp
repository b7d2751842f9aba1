// SPDX-License-Identifier: Apache-2.0
//
// Corpus-guided abstraction learning.
//
// A pattern is a lambda-free term whose holes are abstraction variables,
// numbered 0..a-1 in pre-order and each used once. Holes sit only at argument
// positions of base type. The abstraction built from a pattern is
// (lambda^a body) where hole j becomes the de Bruijn variable a-1-j, so the
// first hole is the first argument.
//
// Because every variable occurs once, rewriting one match saves the same
// amount regardless of the fillers:
//     saving = cost(pattern) - 101 * arity - 100
// and the corpus-level utility is
//     U = -(cost(pattern) + arity) + sum over programs of max(0, best saving)
// which counts each program at most once. The number actually realized by
// rewriting every non-overlapping match is reported separately.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mathsynth/program.hpp"

namespace mathsynth {

struct CorpusEntry {
  std::string task_id;
  Term program;
};

struct Pattern {
  /// Term with Hole nodes; hole_context() is the variable number.
  Term skeleton = Term::integer(0);
  int arity = 0;
  /// Types of the variables in order.
  std::vector<BaseType> var_types;
  BaseType result = BaseType::Str;
};

/// Validates hole numbering and shape. Throws ValidationError.
Pattern make_pattern(Term skeleton);
/// Parses a pattern where "#0", "#1" ... mark variables, e.g.
/// "(simplify (rrotate #0 #1) 0)".
Pattern parse_pattern(std::string_view text, std::span<const AbstractionPtr> known = {});
std::string render(const Pattern& p);

/// Requires arity >= 1.
AbstractionPtr to_abstraction(const Pattern& p, std::string name, int origin_iteration);

/// Terminals of a term, the n-ary node count (lambdas not counted).
std::size_t terminal_count(const Term& t) noexcept;

/// cost of the abstraction body: pattern cost plus one per lambda.
std::int64_t abstraction_cost(const Pattern& p) noexcept;

/// Fillers for the pattern's variables if `t` matches at its root.
std::optional<std::vector<Term>> match_pattern(const Pattern& p, const Term& t);

/// Utility counting the best single match per program, floored at zero.
std::int64_t utility(const Pattern& p, std::span<const CorpusEntry> corpus);

/// Rewrites every match, leftmost-outermost; fillers are rewritten too.
Term rewrite_program(const Term& program, const Pattern& p, const AbstractionPtr& a);
std::vector<CorpusEntry> rewrite_with_abstraction(const Pattern& p, const AbstractionPtr& a,
                                                  std::span<const CorpusEntry> corpus);

std::int64_t corpus_cost(std::span<const CorpusEntry> corpus) noexcept;

struct CompressOptions {
  int rounds = 3;
  int max_arity = 2;
  /// Upper limit on pattern terminals including holes; 0 means none.
  std::size_t max_pattern_nodes = 0;
  /// Stamped on the abstractions.
  int iteration = 0;
  /// Names become "f<first_name_index>", "f<first_name_index + 1>", ...
  std::size_t first_name_index = 0;
  /// Test mode: disables pruning and verifies every bound against the best
  /// completion below it.
  bool check_bounds = false;
};

struct CompressStep {
  Pattern pattern;
  AbstractionPtr abstraction;
  std::int64_t utility = 0;
  /// Corpus cost before minus after the rewrite.
  std::int64_t realized_saving = 0;
};

struct CompressResult {
  std::vector<CompressStep> steps;
  std::vector<CorpusEntry> corpus;
  std::size_t search_nodes = 0;
  /// Only counted with check_bounds.
  std::size_t bound_checks = 0;
  std::size_t bound_violations = 0;
};

struct PatternChoice {
  Pattern pattern;
  std::int64_t utility = 0;
};

/// Branch-and-bound search for one round: the best pattern with at least one
/// match and at least one variable, ties to the smaller rendering.
std::optional<PatternChoice> best_pattern(std::span<const CorpusEntry> corpus, const CompressOptions& options,
                                          CompressResult* stats = nullptr);

/// Repeats best_pattern and rewrite while utility stays positive.
/// Throws ValidationError when rounds < 1 or max_arity < 0.
CompressResult compress(std::span<const CorpusEntry> corpus, const CompressOptions& options);

struct OracleResult {
  Pattern pattern;
  std::int64_t utility = 0;
  std::size_t candidates = 0;
};

/// Brute force over every pattern that matches somewhere: each top prefix of
/// each corpus location, with cut points as variables (at least one). Limits: 1..5 programs,
/// at most 15 terminals each, max_pattern_nodes <= 7. Throws ValidationError
/// outside them.
OracleResult exhaustive_oracle(std::span<const CorpusEntry> corpus, int max_arity, std::size_t max_pattern_nodes);

}  // namespace mathsynth
