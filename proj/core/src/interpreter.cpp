// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/interpreter.hpp"

#include <memory>
#include <string>
#include <variant>

namespace mathsynth {
namespace {

struct FunctionValue;
using FunctionPtr = std::shared_ptr<const FunctionValue>;
using Value = std::variant<Equation, std::int64_t, FunctionPtr>;
using Env = std::vector<Value>;

struct FunctionValue {
  enum class Kind { Prim, Abs, Closure } kind = Kind::Prim;
  Prim prim = Prim::Add;
  const Abstraction* abs = nullptr;
  Term body = Term::integer(0);
  Env env;
  std::vector<Value> args;
  std::size_t needed = 0;
};

class Interp {
 public:
  Interp(std::vector<Equation>* trace, std::size_t limit) : trace_(trace), limit_(limit) {}

  std::size_t steps() const { return steps_; }

  Outcome<Value> eval(const Term& t, const Env& env, int depth) {
    switch (t.kind()) {
      case Term::Kind::Var: return env[env.size() - 1 - t.index()];
      case Term::Kind::Int: return Value(t.value());
      case Term::Kind::Prim: {
        auto f = std::make_shared<FunctionValue>();
        f->kind = FunctionValue::Kind::Prim;
        f->prim = t.primitive();
        f->needed = t.primitive() == Prim::NewConstGen ? 3 : 2;
        return Value(FunctionPtr(std::move(f)));
      }
      case Term::Kind::Abs: {
        auto f = std::make_shared<FunctionValue>();
        f->kind = FunctionValue::Kind::Abs;
        f->abs = t.abstraction().get();
        f->needed = static_cast<std::size_t>(t.abstraction()->arity);
        return Value(FunctionPtr(std::move(f)));
      }
      case Term::Kind::Lambda: {
        auto f = std::make_shared<FunctionValue>();
        f->kind = FunctionValue::Kind::Closure;
        f->body = t.body();
        f->env = env;
        f->needed = 1;
        return Value(FunctionPtr(std::move(f)));
      }
      case Term::Kind::Apply: {
        auto f = eval(t.fn(), env, depth);
        if (!f) return f;
        auto x = eval(t.arg(), env, depth);
        if (!x) return x;
        const auto* fp = std::get_if<FunctionPtr>(&*f);
        if (fp == nullptr) return Fault{FaultCode::TypeMismatch, "applying a non-function"};
        return apply(**fp, std::move(x).value(), depth);
      }
      case Term::Kind::Hole: return Fault{FaultCode::TypeMismatch, "unfilled hole"};
    }
    return Fault{FaultCode::TypeMismatch, "unknown term"};
  }

  Outcome<Value> apply(const FunctionValue& f, Value x, int depth) {
    if (f.kind == FunctionValue::Kind::Closure) {
      Env env = f.env;
      env.push_back(std::move(x));
      return eval(f.body, env, depth);
    }
    if (f.args.size() + 1 < f.needed) {
      auto g = std::make_shared<FunctionValue>(f);
      g->args.push_back(std::move(x));
      return Value(FunctionPtr(std::move(g)));
    }
    std::vector<Value> args = f.args;
    args.push_back(std::move(x));
    if (f.kind == FunctionValue::Kind::Prim) return run_prim(f.prim, args, depth);
    return run_abs(*f.abs, args, depth);
  }

  Outcome<Value> run_prim(Prim p, const std::vector<Value>& args, int depth) {
    if (++steps_ > limit_) return Fault{FaultCode::StepLimit, ""};
    if (p == Prim::NewConstGen) {
      const auto* a = std::get_if<std::int64_t>(&args[0]);
      const auto* b = std::get_if<std::int64_t>(&args[1]);
      const auto* c = std::get_if<std::int64_t>(&args[2]);
      if (!a || !b || !c) return Fault{FaultCode::TypeMismatch, "newConstGen expects integers"};
      auto r = try_new_const_gen(*a, *b, *c);
      if (!r) return r.fault();
      return Value(*r);
    }
    const auto* e = std::get_if<Equation>(&args[0]);
    const auto* i = std::get_if<std::int64_t>(&args[1]);
    if (!e || !i) return Fault{FaultCode::TypeMismatch, "primitive expects (equation, index)"};
    if (*i < 0) return Fault{FaultCode::IndexOutOfRange, ""};
    auto r = try_apply_primitive(p, *e, static_cast<std::size_t>(*i));
    if (!r) return r.fault();
    if (depth == 0 && trace_) trace_->push_back(*r);
    return Value(std::move(r).value());
  }

  Outcome<Value> run_abs(const Abstraction& a, const std::vector<Value>& args, int depth) {
    auto v = eval(a.body, {}, depth + 1);
    if (!v) return v;
    for (const Value& x : args) {
      const auto* fp = std::get_if<FunctionPtr>(&*v);
      if (fp == nullptr) return Fault{FaultCode::TypeMismatch, "abstraction arity"};
      v = apply(**fp, x, depth + 1);
      if (!v) return v;
    }
    if (depth == 0 && trace_) {
      if (const auto* e = std::get_if<Equation>(&*v)) trace_->push_back(*e);
    }
    return v;
  }

 private:
  std::vector<Equation>* trace_;
  std::size_t limit_;
  std::size_t steps_ = 0;
};

}  // namespace

Outcome<Equation> try_evaluate(const Term& program, const Equation& input, std::vector<Equation>* trace,
                               std::size_t step_limit, std::size_t* failing_step) {
  if (trace) trace->push_back(input);
  Interp in(trace, step_limit);
  auto f = in.eval(program, {}, 0);
  if (f) {
    const auto* fp = std::get_if<FunctionPtr>(&*f);
    if (fp == nullptr) {
      f = Fault{FaultCode::TypeMismatch, "program is not a function"};
    } else {
      f = in.apply(**fp, Value(input), 0);
    }
  }
  if (!f) {
    if (failing_step) *failing_step = in.steps();
    return f.fault();
  }
  const auto* e = std::get_if<Equation>(&*f);
  if (e == nullptr) {
    if (failing_step) *failing_step = in.steps();
    return Fault{FaultCode::TypeMismatch, "program did not return an equation"};
  }
  return *e;
}

Evaluation evaluate(const Term& program, const Equation& input, const EvalOptions& options) {
  Evaluation out{input, {}};
  std::size_t step = 0;
  auto r = try_evaluate(program, input, options.trace ? &out.trace : nullptr, options.step_limit, &step);
  if (!r) {
    throw EvaluationError("evaluation failed at step " + std::to_string(step) + ": " + describe(r.fault()), step);
  }
  out.output = *r;
  return out;
}

Outcome<Equation> try_invoke(const Abstraction& a, const Equation& e, std::span<const std::int64_t> ints,
                             std::size_t step_limit) {
  if (a.arity != static_cast<int>(ints.size()) + 1) return Fault{FaultCode::TypeMismatch, "abstraction arity"};
  Interp in(nullptr, step_limit);
  std::vector<Value> args;
  args.reserve(ints.size() + 1);
  args.emplace_back(e);
  for (std::int64_t v : ints) args.emplace_back(v);
  auto r = in.run_abs(a, args, 1);
  if (!r) return r.fault();
  const auto* out = std::get_if<Equation>(&*r);
  if (out == nullptr) return Fault{FaultCode::TypeMismatch, "abstraction did not return an equation"};
  return *out;
}

Outcome<std::int64_t> try_eval_int(const Term& t, std::size_t step_limit) {
  Interp in(nullptr, step_limit);
  auto r = in.eval(t, {}, 1);
  if (!r) return r.fault();
  const auto* v = std::get_if<std::int64_t>(&*r);
  if (v == nullptr) return Fault{FaultCode::TypeMismatch, "not an integer term"};
  return *v;
}

}  // namespace mathsynth
