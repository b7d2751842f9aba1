// SPDX-License-Identifier: Apache-2.0
//
// Typed lambda terms over MathDSL primitives.
//
// Variables are de Bruijn indices. Application is curried: (sub $0 5) is
// Apply(Apply(sub, $0), 5). Abstractions are referenced by pointer and render
// either inline as "#(lambda ...)" or by name.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mathsynth/primitives.hpp"

namespace mathsynth {

enum class BaseType : std::uint8_t { Str, Int };

std::string_view base_type_name(BaseType t) noexcept;

/// First-order arrow type args[0] -> args[1] -> ... -> result.
struct Type {
  std::vector<BaseType> args;
  BaseType result = BaseType::Str;

  static Type base(BaseType t) { return Type{{}, t}; }
  bool is_arrow() const noexcept { return !args.empty(); }
  std::string str() const;
  friend bool operator==(const Type&, const Type&) = default;
};

Type primitive_type(Prim p);

struct Abstraction;
using AbstractionPtr = std::shared_ptr<const Abstraction>;

namespace detail {
struct TermNode;
}

class Term {
 public:
  enum class Kind : std::uint8_t { Lambda, Apply, Var, Prim, Int, Abs, Hole };

  static Term lambda(Term body);
  static Term apply(Term fn, Term arg);
  static Term apply(Term fn, std::span<const Term> args);
  static Term var(std::uint32_t index);
  static Term prim(Prim p);
  static Term integer(std::int64_t value);
  static Term abs(AbstractionPtr a);
  /// Placeholder used by enumeration and pattern search.
  static Term hole(BaseType t, std::uint8_t context = 0);

  inline Kind kind() const noexcept;
  inline const Term& body() const noexcept;   // Lambda
  inline const Term& fn() const noexcept;     // Apply
  inline const Term& arg() const noexcept;    // Apply
  inline std::uint32_t index() const noexcept;  // Var
  inline Prim primitive() const noexcept;     // Prim
  inline std::int64_t value() const noexcept;   // Int
  inline const AbstractionPtr& abstraction() const noexcept;  // Abs
  inline BaseType hole_type() const noexcept;  // Hole
  inline std::uint8_t hole_context() const noexcept;

  inline std::size_t hash() const noexcept;
  /// Cost model: 100 per terminal, 1 per Apply, 1 per Lambda.
  inline std::int64_t cost() const noexcept;
  /// Number of unfilled holes.
  inline std::uint32_t holes() const noexcept;
  /// One past the largest free de Bruijn index (0 for closed terms).
  inline std::uint32_t free_bound() const noexcept;

  bool same_node(const Term& o) const noexcept { return p_ == o.p_; }
  friend bool operator==(const Term& a, const Term& b) noexcept;

  /// Head symbol and arguments of an application spine.
  Term head() const;
  std::vector<Term> spine_args() const;

 private:
  friend struct detail::TermNode;
  Term() = default;
  explicit Term(std::shared_ptr<const detail::TermNode> p) : p_(std::move(p)) {}
  std::shared_ptr<const detail::TermNode> p_;
};

struct Abstraction {
  std::string name;
  Term body = Term::integer(0);
  Type type;
  int arity = 0;
  int origin_iteration = 0;
};

/// Builds an abstraction from a closed lambda body, computing type and arity.
AbstractionPtr make_abstraction(std::string name, Term body, int origin_iteration);

namespace detail {
struct TermNode {
  Term::Kind kind = Term::Kind::Int;
  std::uint8_t hole_context = 0;
  BaseType hole_type = BaseType::Str;
  Prim prim = Prim::Add;
  std::uint32_t holes = 0;
  std::uint32_t free_bound = 0;
  std::int64_t value = 0;
  std::int64_t cost = 0;
  std::size_t hash = 0;
  Term a;
  Term b;
  AbstractionPtr abs;
};
}  // namespace detail

Term::Kind Term::kind() const noexcept { return p_->kind; }
const Term& Term::body() const noexcept { return p_->a; }
const Term& Term::fn() const noexcept { return p_->a; }
const Term& Term::arg() const noexcept { return p_->b; }
std::uint32_t Term::index() const noexcept { return static_cast<std::uint32_t>(p_->value); }
Prim Term::primitive() const noexcept { return p_->prim; }
std::int64_t Term::value() const noexcept { return p_->value; }
const AbstractionPtr& Term::abstraction() const noexcept { return p_->abs; }
BaseType Term::hole_type() const noexcept { return p_->hole_type; }
std::uint8_t Term::hole_context() const noexcept { return p_->hole_context; }
std::size_t Term::hash() const noexcept { return p_->hash; }
std::int64_t Term::cost() const noexcept { return p_->cost; }
std::uint32_t Term::holes() const noexcept { return p_->holes; }
std::uint32_t Term::free_bound() const noexcept { return p_->free_bound; }

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

inline std::int64_t program_cost(const Term& t) noexcept { return t.cost(); }

enum class AbstractionStyle { Inline, Named };

std::string render(const Term& t, AbstractionStyle style = AbstractionStyle::Inline);

/// Parses program text. Named references and "#(...)" bodies are resolved
/// against `known`; an unknown inline body becomes a fresh anonymous
/// abstraction. Throws ParseError (syntax, unbound variable, unknown name) or
/// TypeError (ill-typed).
Term parse_program(std::string_view text, std::span<const AbstractionPtr> known = {});

/// Principal type of a closed term. Unconstrained parameters default to tstr.
Type typecheck(const Term& t);
std::optional<Type> try_typecheck(const Term& t) noexcept;

/// Replaces every abstraction reference by its body and beta-reduces.
Term inline_abstractions(const Term& t);

}  // namespace mathsynth
