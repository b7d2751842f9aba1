// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/enumerator.hpp"

#include <queue>
#include <string>

namespace mathsynth {
namespace {

constexpr std::uint8_t kStrHole = 0;
constexpr std::uint8_t kIntHole = 1;
constexpr std::uint8_t kIntArgHole = 2;

Context context_of(std::uint8_t hole_context) {
  return hole_context == kStrHole ? Context::Str : hole_context == kIntHole ? Context::Int : Context::IntArg;
}

// Replaces the first hole in pre-order.
Term fill_first(const Term& t, const Term& with) {
  switch (t.kind()) {
    case Term::Kind::Hole: return with;
    case Term::Kind::Lambda: return Term::lambda(fill_first(t.body(), with));
    case Term::Kind::Apply:
      if (t.fn().holes() > 0) return Term::apply(fill_first(t.fn(), with), t.arg());
      return Term::apply(t.fn(), fill_first(t.arg(), with));
    default: return t;
  }
}

const Term* first_hole(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Hole: return &t;
    case Term::Kind::Lambda: return first_hole(t.body());
    case Term::Kind::Apply: return t.fn().holes() > 0 ? first_hole(t.fn()) : first_hole(t.arg());
    default: return nullptr;
  }
}

struct Partial {
  Term term;
  double prior;
  std::uint64_t seq;
};

struct PartialOrder {
  bool operator()(const Partial& a, const Partial& b) const {
    if (a.prior != b.prior) return a.prior < b.prior;
    return a.seq > b.seq;
  }
};

struct Done {
  Term term;
  double prior;
  std::string text;
};

struct DoneOrder {
  bool operator()(const Done& a, const Done& b) const {
    if (a.prior != b.prior) return a.prior < b.prior;
    return a.text > b.text;
  }
};

}  // namespace

struct Enumerator::State {
  const Library* lib;
  SearchBudget budget;
  bool variable_in_scope = false;
  std::priority_queue<Partial, std::vector<Partial>, PartialOrder> open;
  std::priority_queue<Done, std::vector<Done>, DoneOrder> done;
  std::uint64_t seq = 0;
  std::size_t expansions = 0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool exhausted = false;

  bool out_of_budget() {
    if (expansions >= budget.max_expansions) return true;
    if ((expansions & 1023) == 0) {
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (secs > budget.timeout_secs) return true;
    }
    return false;
  }

  void expand(const Partial& p) {
    const Term* hole = first_hole(p.term);
    Context ctx = context_of(hole->hole_context());
    for (const Choice& c : lib->choices(ctx, variable_in_scope)) {
      Term filler = c.term;
      if (c.production >= 0) {
        const Production& prod = lib->productions()[c.production];
        for (BaseType a : prod.type.args) {
          std::uint8_t hc = a == BaseType::Str ? kStrHole : prod.result() == BaseType::Int ? kIntArgHole : kIntHole;
          filler = Term::apply(std::move(filler), Term::hole(a, hc));
        }
      }
      Term next = fill_first(p.term, filler);
      if (next.cost() > budget.max_program_cost) continue;
      double prior = p.prior + c.log_prob;
      if (next.holes() == 0) {
        done.push({next, prior, render(next)});
      } else {
        open.push({std::move(next), prior, seq++});
      }
    }
  }
};

Enumerator::Enumerator(const Library& lib, const Type& request, const SearchBudget& budget)
    : s_(std::make_unique<State>()) {
  s_->lib = &lib;
  s_->budget = budget;
  Term root = Term::hole(BaseType::Int, kIntHole);
  if (request == Type{{BaseType::Str}, BaseType::Str}) {
    root = Term::lambda(Term::hole(BaseType::Str, kStrHole));
    s_->variable_in_scope = true;
  } else if (!(request == Type::base(BaseType::Int))) {
    throw ValidationError("enumeration request must be tstr -> tstr or tint, got " + request.str());
  }
  s_->open.push({root, 0.0, s_->seq++});
}

Enumerator::~Enumerator() = default;
Enumerator::Enumerator(Enumerator&&) noexcept = default;
Enumerator& Enumerator::operator=(Enumerator&&) noexcept = default;

std::size_t Enumerator::expansions() const noexcept { return s_->expansions; }

std::optional<Enumerated> Enumerator::next() {
  State& s = *s_;
  while (true) {
    bool can_expand = !s.exhausted && !s.open.empty();
    if (!s.done.empty() && (!can_expand || s.done.top().prior >= s.open.top().prior)) {
      Done d = s.done.top();
      s.done.pop();
      return Enumerated{std::move(d.term), d.prior};
    }
    if (!can_expand) return std::nullopt;
    if (s.out_of_budget()) {
      s.exhausted = true;
      continue;
    }
    Partial p = s.open.top();
    s.open.pop();
    ++s.expansions;
    s.expand(p);
  }
}

std::vector<Enumerated> enumerate(const Library& lib, const Type& request, const SearchBudget& budget,
                                  std::size_t limit) {
  Enumerator e(lib, request, budget);
  std::vector<Enumerated> out;
  while (out.size() < limit) {
    auto p = e.next();
    if (!p) break;
    out.push_back(std::move(*p));
  }
  return out;
}

}  // namespace mathsynth
