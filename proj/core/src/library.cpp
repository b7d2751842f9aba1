// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/library.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mathsynth {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool fits(const Production& p, Context c) {
  switch (c) {
    case Context::Str: return p.result() == BaseType::Str;
    case Context::Int: return p.result() == BaseType::Int;
    case Context::IntArg: return p.kind == Production::Kind::Literal;
  }
  return false;
}

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

Term Production::term() const {
  switch (kind) {
    case Kind::Primitive: return Term::prim(prim);
    case Kind::Literal: return Term::integer(literal);
    case Kind::Abstraction: return Term::abs(abs);
  }
  return Term::integer(0);
}

std::string Production::name() const {
  switch (kind) {
    case Kind::Primitive: return std::string(prim_name(prim));
    case Kind::Literal: return std::to_string(literal);
    case Kind::Abstraction: return abs->name;
  }
  return {};
}

Library Library::initial() {
  Library lib;
  for (Prim p : kEquationPrims) lib.productions_.push_back({Production::Kind::Primitive, p, 0, nullptr, primitive_type(p), 0.0});
  lib.productions_.push_back(
      {Production::Kind::Primitive, Prim::NewConstGen, 0, nullptr, primitive_type(Prim::NewConstGen), 0.0});
  for (std::int64_t v = 0; v <= 10; ++v) {
    lib.productions_.push_back({Production::Kind::Literal, Prim::Add, v, nullptr, Type::base(BaseType::Int), 0.0});
  }
  double w = -std::log(static_cast<double>(lib.productions_.size() + 1));
  for (auto& p : lib.productions_) p.log_weight = w;
  lib.variable_log_weight_ = w;
  lib.refresh();
  return lib;
}

std::vector<AbstractionPtr> Library::abstractions() const {
  std::vector<AbstractionPtr> out;
  for (const auto& p : productions_) {
    if (p.kind == Production::Kind::Abstraction) out.push_back(p.abs);
  }
  return out;
}

AbstractionPtr Library::add_abstraction(AbstractionPtr a) {
  if (a->name.empty()) {
    auto named = std::make_shared<Abstraction>(*a);
    named->name = "f" + std::to_string(abstractions().size());
    a = std::move(named);
  }
  double w = -std::log(static_cast<double>(productions_.size() + 2));
  productions_.push_back({Production::Kind::Abstraction, Prim::Add, 0, a, a->type, w});
  refresh();
  return a;
}

void Library::set_weights(std::span<const double> weights, double variable_weight) {
  if (weights.size() != productions_.size()) throw ValidationError("weight vector size mismatch");
  for (std::size_t i = 0; i < weights.size(); ++i) productions_[i].log_weight = weights[i];
  variable_log_weight_ = variable_weight;
  refresh();
}

void Library::refresh() {
  for (int c = 0; c < 3; ++c) {
    auto ctx = static_cast<Context>(c);
    std::vector<double> ws;
    for (const auto& p : productions_) {
      if (fits(p, ctx)) ws.push_back(p.log_weight);
    }
    std::vector<double> with_var = ws;
    with_var.push_back(variable_log_weight_);
    double z = log_sum_exp(ws);
    double z_var = log_sum_exp(with_var);

    auto& lp = log_probs_[c];
    lp.assign(productions_.size(), kNegInf);
    auto& plain = choices_[c];
    plain.clear();
    std::vector<Choice> with_variable;
    for (std::size_t i = 0; i < productions_.size(); ++i) {
      const auto& p = productions_[i];
      if (!fits(p, ctx)) continue;
      // Str slots of programs always have the bound variable in scope, so that
      // is the distribution recorded for scoring.
      double zz = ctx == Context::Str ? z_var : z;
      lp[i] = p.log_weight - zz;
      plain.push_back({p.term(), p.log_weight - z, static_cast<int>(i)});
      with_variable.push_back({p.term(), p.log_weight - z_var, static_cast<int>(i)});
    }
    if (ctx == Context::Str) {
      variable_log_prob_ = variable_log_weight_ - z_var;
      with_variable.push_back({Term::var(0), variable_log_prob_, -1});
    }
    auto order = [](const Choice& a, const Choice& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      return render(a.term) < render(b.term);
    };
    std::stable_sort(plain.begin(), plain.end(), order);
    std::stable_sort(with_variable.begin(), with_variable.end(), order);
    if (ctx == Context::Str) str_choices_with_variable_ = std::move(with_variable);
  }
}

const std::vector<Choice>& Library::choices(Context c, bool variable_in_scope) const noexcept {
  if (c == Context::Str && variable_in_scope) return str_choices_with_variable_;
  return choices_[static_cast<int>(c)];
}

double Library::log_prob(Context c, int index) const noexcept {
  if (index < 0 || static_cast<std::size_t>(index) >= productions_.size()) return kNegInf;
  return log_probs_[static_cast<int>(c)][index];
}

int Library::find(const Term& t) const {
  for (std::size_t i = 0; i < productions_.size(); ++i) {
    const auto& p = productions_[i];
    switch (t.kind()) {
      case Term::Kind::Prim:
        if (p.kind == Production::Kind::Primitive && p.prim == t.primitive()) return static_cast<int>(i);
        break;
      case Term::Kind::Int:
        if (p.kind == Production::Kind::Literal && p.literal == t.value()) return static_cast<int>(i);
        break;
      case Term::Kind::Abs:
        if (p.kind == Production::Kind::Abstraction &&
            (p.abs == t.abstraction() || p.abs->body == t.abstraction()->body)) {
          return static_cast<int>(i);
        }
        break;
      default: return -1;
    }
  }
  return -1;
}

// ---- grammar fitting -------------------------------------------------------------------

namespace {

void count_uses(const Library& lib, const Term& t, std::vector<double>& counts, double& var_count) {
  switch (t.kind()) {
    case Term::Kind::Lambda: count_uses(lib, t.body(), counts, var_count); return;
    case Term::Kind::Apply:
      count_uses(lib, t.fn(), counts, var_count);
      count_uses(lib, t.arg(), counts, var_count);
      return;
    case Term::Kind::Var: var_count += 1; return;
    case Term::Kind::Prim:
    case Term::Kind::Int:
    case Term::Kind::Abs: {
      int i = lib.find(t);
      if (i >= 0) counts[i] += 1;
      return;
    }
    case Term::Kind::Hole: return;
  }
}

double prior_of(const Library& lib, const Term& t, Context ctx) {
  if (t.kind() == Term::Kind::Var) return ctx == Context::Str ? lib.variable_log_prob() : kNegInf;
  Term head = t.head();
  if (head.kind() != Term::Kind::Prim && head.kind() != Term::Kind::Int && head.kind() != Term::Kind::Abs) {
    return kNegInf;
  }
  int idx = lib.find(head);
  if (idx < 0) return kNegInf;
  const Production& p = lib.productions()[idx];
  std::vector<Term> args = t.spine_args();
  if (args.size() != p.type.args.size()) return kNegInf;
  double lp = lib.log_prob(ctx, idx);
  for (std::size_t j = 0; j < args.size() && lp != kNegInf; ++j) {
    Context sub = Context::Str;
    if (p.type.args[j] == BaseType::Int) sub = p.result() == BaseType::Int ? Context::IntArg : Context::Int;
    lp += prior_of(lib, args[j], sub);
  }
  return lp;
}

}  // namespace

Library fit_grammar(const Library& lib, std::span<const Term> corpus) {
  std::vector<double> counts(lib.productions().size(), 0.0);
  double var_count = 0.0;
  for (const Term& p : corpus) count_uses(lib, p, counts, var_count);
  double total = var_count + 1.0;
  for (double c : counts) total += c + 1.0;
  std::vector<double> weights(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) weights[i] = std::log((counts[i] + 1.0) / total);
  Library out = lib;
  out.set_weights(weights, std::log((var_count + 1.0) / total));
  return out;
}

double log_prior(const Library& lib, const Term& program) {
  if (program.kind() == Term::Kind::Lambda) return prior_of(lib, program.body(), Context::Str);
  return prior_of(lib, program, Context::Int);
}

}  // namespace mathsynth
