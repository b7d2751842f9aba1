// SPDX-License-Identifier: Apache-2.0
//
// Library of productions and the unigram grammar over them.
//
// Each production keeps one stored log-weight. Probabilities are obtained by
// renormalizing those weights over the candidates that fit an expansion
// context:
//   Str     equation-valued slot: the bound variable, equation primitives,
//           equation-valued abstractions;
//   Int     index slot of an equation function: literals, newConstGen and
//           integer-valued abstractions;
//   IntArg  argument of an integer-valued function: literals only, which
//           caps index terms at depth two (values up to 110).
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mathsynth/program.hpp"

namespace mathsynth {

enum class Context : std::uint8_t { Str, Int, IntArg };

struct Production {
  enum class Kind : std::uint8_t { Primitive, Literal, Abstraction };
  Kind kind = Kind::Primitive;
  Prim prim = Prim::Add;
  std::int64_t literal = 0;
  AbstractionPtr abs;
  Type type;
  double log_weight = 0.0;

  Term term() const;
  /// Primitive name, literal digits, or abstraction name.
  std::string name() const;
  BaseType result() const noexcept { return type.result; }
};

struct Choice {
  Term term;
  double log_prob = 0.0;
  /// Index into Library::productions(), or -1 for the bound variable.
  int production = -1;
};

class Library {
 public:
  /// The base primitives, literals 0..10, uniform weights.
  static Library initial();

  const std::vector<Production>& productions() const noexcept { return productions_; }
  double variable_log_weight() const noexcept { return variable_log_weight_; }
  int iteration() const noexcept { return iteration_; }
  void set_iteration(int i) noexcept { iteration_ = i; }

  std::vector<AbstractionPtr> abstractions() const;
  /// Appends an abstraction (named "f<k>" if unnamed) with a zero-count weight.
  AbstractionPtr add_abstraction(AbstractionPtr a);

  /// Replaces all stored log-weights; `weights` is parallel to productions().
  void set_weights(std::span<const double> weights, double variable_weight);

  /// Candidates for a context, each with its normalized log-probability.
  /// Sorted by descending probability, ties by rendered form.
  const std::vector<Choice>& choices(Context c, bool variable_in_scope) const noexcept;

  /// Normalized log-probability of production `index` in a context
  /// (-infinity when it is not a candidate there).
  double log_prob(Context c, int index) const noexcept;
  /// Log-probability of the bound variable in a Str context.
  double variable_log_prob() const noexcept { return variable_log_prob_; }

  /// Index of the production that renders the given terminal, or -1.
  int find(const Term& terminal) const;

 private:
  void refresh();

  std::vector<Production> productions_;
  double variable_log_weight_ = 0.0;
  int iteration_ = 0;
  // Derived from the weights by refresh().
  std::array<std::vector<double>, 3> log_probs_;
  double variable_log_prob_ = 0.0;
  std::array<std::vector<Choice>, 3> choices_;
  std::vector<Choice> str_choices_with_variable_;
};

/// Laplace-smoothed (alpha = 1) usage counts over a corpus of programs,
/// stored as log((count + 1) / total).
Library fit_grammar(const Library& lib, std::span<const Term> corpus);

/// Log-prior of a closed tstr -> tstr program, or of a closed tint term.
/// Returns -infinity when the program uses something outside the library.
double log_prior(const Library& lib, const Term& program);

}  // namespace mathsynth
