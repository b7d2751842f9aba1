// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/program.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

namespace mathsynth {
namespace {

std::size_t mix(std::size_t h, std::size_t v) noexcept {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

enum Tag : std::size_t { kLambdaTag = 11, kApplyTag, kVarTag, kPrimTag, kIntTag, kAbsTag, kHoleTag };

}  // namespace

std::string_view base_type_name(BaseType t) noexcept { return t == BaseType::Str ? "tstr" : "tint"; }

std::string Type::str() const {
  std::string out;
  for (BaseType a : args) {
    out += base_type_name(a);
    out += " -> ";
  }
  out += base_type_name(result);
  return out;
}

Type primitive_type(Prim p) {
  if (p == Prim::NewConstGen) return Type{{BaseType::Int, BaseType::Int, BaseType::Int}, BaseType::Int};
  return Type{{BaseType::Str, BaseType::Int}, BaseType::Str};
}

// ---- construction ---------------------------------------------------------------

Term Term::lambda(Term body) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Lambda;
  n->cost = 1 + body.cost();
  n->holes = body.holes();
  n->free_bound = body.free_bound() > 0 ? body.free_bound() - 1 : 0;
  n->hash = mix(kLambdaTag, body.hash());
  n->a = std::move(body);
  return Term(std::move(n));
}

Term Term::apply(Term fn, Term arg) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Apply;
  n->cost = 1 + fn.cost() + arg.cost();
  n->holes = fn.holes() + arg.holes();
  n->free_bound = std::max(fn.free_bound(), arg.free_bound());
  n->hash = mix(mix(kApplyTag, fn.hash()), arg.hash());
  n->a = std::move(fn);
  n->b = std::move(arg);
  return Term(std::move(n));
}

Term Term::apply(Term fn, std::span<const Term> args) {
  for (const Term& a : args) fn = apply(std::move(fn), a);
  return fn;
}

Term Term::var(std::uint32_t index) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Var;
  n->value = index;
  n->cost = 100;
  n->free_bound = index + 1;
  n->hash = mix(kVarTag, index);
  return Term(std::move(n));
}

Term Term::prim(Prim p) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Prim;
  n->prim = p;
  n->cost = 100;
  n->hash = mix(kPrimTag, static_cast<std::size_t>(p));
  return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Int;
  n->value = value;
  n->cost = 100;
  n->hash = mix(kIntTag, static_cast<std::size_t>(value));
  return Term(std::move(n));
}

Term Term::abs(AbstractionPtr a) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Abs;
  n->cost = 100;
  n->hash = mix(kAbsTag, a->body.hash());
  n->abs = std::move(a);
  return Term(std::move(n));
}

Term Term::hole(BaseType t, std::uint8_t context) {
  auto n = std::make_shared<detail::TermNode>();
  n->kind = Kind::Hole;
  n->hole_type = t;
  n->hole_context = context;
  n->cost = 100;
  n->holes = 1;
  n->hash = mix(mix(kHoleTag, static_cast<std::size_t>(t)), context);
  return Term(std::move(n));
}

bool operator==(const Term& a, const Term& b) noexcept {
  if (a.p_ == b.p_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.cost() != b.cost()) return false;
  switch (a.kind()) {
    case Term::Kind::Lambda: return a.body() == b.body();
    case Term::Kind::Apply: return a.fn() == b.fn() && a.arg() == b.arg();
    case Term::Kind::Var:
    case Term::Kind::Int: return a.value() == b.value();
    case Term::Kind::Prim: return a.primitive() == b.primitive();
    case Term::Kind::Abs:
      return a.abstraction() == b.abstraction() || a.abstraction()->body == b.abstraction()->body;
    case Term::Kind::Hole: return a.hole_type() == b.hole_type() && a.hole_context() == b.hole_context();
  }
  return false;
}

Term Term::head() const {
  const Term* t = this;
  while (t->kind() == Kind::Apply) t = &t->fn();
  return *t;
}

std::vector<Term> Term::spine_args() const {
  std::vector<Term> out;
  const Term* t = this;
  while (t->kind() == Kind::Apply) {
    out.push_back(t->arg());
    t = &t->fn();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

AbstractionPtr make_abstraction(std::string name, Term body, int origin_iteration) {
  if (body.kind() != Term::Kind::Lambda) throw ValidationError("abstraction body must be a lambda");
  if (body.free_bound() != 0) throw ValidationError("abstraction body must be closed");
  auto a = std::make_shared<Abstraction>();
  a->name = std::move(name);
  a->type = typecheck(body);
  a->arity = static_cast<int>(a->type.args.size());
  a->origin_iteration = origin_iteration;
  a->body = std::move(body);
  return a;
}

// ---- rendering ---------------------------------------------------------------------

namespace {

void write(const Term& t, AbstractionStyle style, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Lambda:
      out += "(lambda ";
      write(t.body(), style, out);
      out += ')';
      return;
    case Term::Kind::Apply: {
      out += '(';
      write(t.head(), style, out);
      for (const Term& a : t.spine_args()) {
        out += ' ';
        write(a, style, out);
      }
      out += ')';
      return;
    }
    case Term::Kind::Var:
      out += '$';
      out += std::to_string(t.index());
      return;
    case Term::Kind::Prim: out += prim_name(t.primitive()); return;
    case Term::Kind::Int: out += std::to_string(t.value()); return;
    case Term::Kind::Abs:
      if (style == AbstractionStyle::Named && !t.abstraction()->name.empty()) {
        out += t.abstraction()->name;
      } else {
        out += '#';
        write(t.abstraction()->body, style, out);
      }
      return;
    case Term::Kind::Hole:
      out += '?';
      out += base_type_name(t.hole_type());
      return;
  }
}

}  // namespace

std::string render(const Term& t, AbstractionStyle style) {
  std::string out;
  write(t, style, out);
  return out;
}

// ---- parsing -------------------------------------------------------------------------

namespace {

class ProgramParser {
 public:
  ProgramParser(std::string_view text, std::span<const AbstractionPtr> known) : text_(text), known_(known) {}

  Term parse_all() {
    Term t = parse(0);
    skip_space();
    if (i_ != text_.size()) throw ParseError("trailing input", i_);
    return t;
  }

 private:
  void skip_space() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }

  std::string_view atom() {
    std::size_t start = i_;
    while (i_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i_])) && text_[i_] != '(' &&
           text_[i_] != ')') {
      ++i_;
    }
    return text_.substr(start, i_ - start);
  }

  Term parse(std::uint32_t depth) {
    skip_space();
    if (i_ >= text_.size()) throw ParseError("unexpected end of program", i_);
    char c = text_[i_];
    if (c == ')') throw ParseError("unexpected ')'", i_);
    if (c == '#') {
      std::size_t at = i_;
      ++i_;
      Term body = parse(0);
      if (body.kind() != Term::Kind::Lambda) throw ParseError("'#' must prefix a lambda", at);
      return Term::abs(resolve_inline(body));
    }
    if (c == '(') {
      std::size_t at = i_;
      ++i_;
      skip_space();
      std::size_t save = i_;
      if (atom() == "lambda") {
        Term body = parse(depth + 1);
        close(at);
        return Term::lambda(std::move(body));
      }
      i_ = save;
      Term fn = parse(depth);
      skip_space();
      if (i_ < text_.size() && text_[i_] == ')') throw ParseError("application without arguments", i_);
      while (true) {
        skip_space();
        if (i_ >= text_.size()) throw ParseError("unbalanced parentheses", at);
        if (text_[i_] == ')') break;
        fn = Term::apply(std::move(fn), parse(depth));
      }
      ++i_;
      return fn;
    }
    std::size_t at = i_;
    std::string_view a = atom();
    if (a.empty()) throw ParseError("unexpected character", at);
    if (a[0] == '$') {
      std::uint32_t k = 0;
      auto [ptr, ec] = std::from_chars(a.data() + 1, a.data() + a.size(), k);
      if (ec != std::errc() || ptr != a.data() + a.size()) throw ParseError("malformed variable", at);
      if (k >= depth) throw ParseError("unbound variable $" + std::to_string(k), at);
      return Term::var(k);
    }
    if (std::isdigit(static_cast<unsigned char>(a[0])) || a[0] == '-') {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
      if (ec != std::errc() || ptr != a.data() + a.size()) throw ParseError("malformed integer", at);
      if (v < 0 || v > 10) throw ParseError("integer literal outside 0..10", at);
      return Term::integer(v);
    }
    if (auto p = prim_from_name(a)) return Term::prim(*p);
    for (const auto& k : known_) {
      if (k->name == a) return Term::abs(k);
    }
    throw ParseError("unknown primitive '" + std::string(a) + "'", at);
  }

  void close(std::size_t open_at) {
    skip_space();
    if (i_ >= text_.size()) throw ParseError("unbalanced parentheses", open_at);
    if (text_[i_] != ')') throw ParseError("expected ')'", i_);
    ++i_;
  }

  AbstractionPtr resolve_inline(const Term& body) {
    for (const auto& k : known_) {
      if (k->body == body) return k;
    }
    for (const auto& k : fresh_) {
      if (k->body == body) return k;
    }
    try {
      fresh_.push_back(make_abstraction("", body, 0));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), i_);
    }
    return fresh_.back();
  }

  std::string_view text_;
  std::span<const AbstractionPtr> known_;
  std::vector<AbstractionPtr> fresh_;
  std::size_t i_ = 0;
};

}  // namespace

Term parse_program(std::string_view text, std::span<const AbstractionPtr> known) {
  Term t = ProgramParser(text, known).parse_all();
  typecheck(t);
  return t;
}

// ---- type inference -------------------------------------------------------------------

namespace {

// Type atoms: 0 = tstr, 1 = tint, >= 2 type variables.
using Atom = int;
constexpr Atom kStr = 0;
constexpr Atom kInt = 1;

struct IType {
  std::vector<Atom> args;
  Atom result = kStr;
};

Atom atom_of(BaseType t) { return t == BaseType::Str ? kStr : kInt; }

IType from_type(const Type& t) {
  IType out;
  for (BaseType a : t.args) out.args.push_back(atom_of(a));
  out.result = atom_of(t.result);
  return out;
}

class Inference {
 public:
  IType infer(const Term& t, std::vector<Atom>& env) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        if (t.index() >= env.size()) throw TypeError("unbound variable $" + std::to_string(t.index()));
        return IType{{}, env[env.size() - 1 - t.index()]};
      }
      case Term::Kind::Prim: return from_type(primitive_type(t.primitive()));
      case Term::Kind::Int: return IType{{}, kInt};
      case Term::Kind::Abs: return from_type(t.abstraction()->type);
      case Term::Kind::Hole: return IType{{}, atom_of(t.hole_type())};
      case Term::Kind::Lambda: {
        Atom param = fresh();
        env.push_back(param);
        IType body = infer(t.body(), env);
        env.pop_back();
        body.args.insert(body.args.begin(), param);
        return body;
      }
      case Term::Kind::Apply: {
        IType f = infer(t.fn(), env);
        if (f.args.empty()) throw TypeError("applying a non-function");
        IType x = infer(t.arg(), env);
        if (!x.args.empty()) throw TypeError("higher-order argument");
        unify(f.args.front(), x.result);
        f.args.erase(f.args.begin());
        return f;
      }
    }
    throw TypeError("unknown term");
  }

  Atom resolve(Atom a) {
    while (a >= 2 && binding_[a - 2] != -1) a = binding_[a - 2];
    return a;
  }

 private:
  Atom fresh() {
    binding_.push_back(-1);
    return static_cast<Atom>(binding_.size() + 1);
  }

  void unify(Atom a, Atom b) {
    a = resolve(a);
    b = resolve(b);
    if (a == b) return;
    if (a >= 2) {
      binding_[a - 2] = b;
    } else if (b >= 2) {
      binding_[b - 2] = a;
    } else {
      throw TypeError(std::string("type mismatch: expected ") + (a == kStr ? "tstr" : "tint") + ", got " +
                      (b == kStr ? "tstr" : "tint"));
    }
  }

  std::vector<Atom> binding_;
};

}  // namespace

Type typecheck(const Term& t) {
  if (t.free_bound() != 0) throw TypeError("term has free variables");
  Inference inf;
  std::vector<Atom> env;
  IType it = inf.infer(t, env);
  auto concrete = [&](Atom a) {
    Atom r = inf.resolve(a);
    return r == kInt ? BaseType::Int : BaseType::Str;
  };
  Type out;
  for (Atom a : it.args) out.args.push_back(concrete(a));
  out.result = concrete(it.result);
  return out;
}

std::optional<Type> try_typecheck(const Term& t) noexcept {
  try {
    return typecheck(t);
  } catch (...) {
    return std::nullopt;
  }
}

// ---- beta reduction --------------------------------------------------------------------

namespace {

Term shift(const Term& t, int d, std::uint32_t cutoff) {
  if (t.free_bound() <= cutoff) return t;
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.index() >= cutoff ? Term::var(static_cast<std::uint32_t>(static_cast<int>(t.index()) + d)) : t;
    case Term::Kind::Lambda: return Term::lambda(shift(t.body(), d, cutoff + 1));
    case Term::Kind::Apply: return Term::apply(shift(t.fn(), d, cutoff), shift(t.arg(), d, cutoff));
    default: return t;
  }
}

// Substitutes s for variable j in t.
Term subst(const Term& t, std::uint32_t j, const Term& s) {
  if (t.free_bound() <= j) return t;
  switch (t.kind()) {
    case Term::Kind::Var: return t.index() == j ? s : t;
    case Term::Kind::Lambda: return Term::lambda(subst(t.body(), j + 1, shift(s, 1, 0)));
    case Term::Kind::Apply: return Term::apply(subst(t.fn(), j, s), subst(t.arg(), j, s));
    default: return t;
  }
}

Term beta(const Term& lam, const Term& arg) { return shift(subst(lam.body(), 0, shift(arg, 1, 0)), -1, 0); }

Term normalize(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Abs: return normalize(t.abstraction()->body);
    case Term::Kind::Lambda: return Term::lambda(normalize(t.body()));
    case Term::Kind::Apply: {
      Term f = normalize(t.fn());
      Term x = normalize(t.arg());
      if (f.kind() == Term::Kind::Lambda) return normalize(beta(f, x));
      return Term::apply(std::move(f), std::move(x));
    }
    default: return t;
  }
}

}  // namespace

Term inline_abstractions(const Term& t) { return normalize(t); }

}  // namespace mathsynth
