// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "mathsynth/interpreter.hpp"

namespace mathsynth {
namespace {

constexpr std::int64_t kMaxIndexValue = 110;
constexpr std::uint32_t kSizeTableCap = 64;

struct Edge {
  int production = 0;
  std::uint8_t nvals = 0;
  std::array<std::int64_t, 2> vals{};
  double cost = 0.0;
  std::int64_t program_cost = 0;
  /// Index argument of a primitive edge; -1 for abstractions.
  std::int64_t max_index = -1;
};

}  // namespace

struct SolverContext::Impl {
  Library lib;
  std::vector<std::optional<Candidate>> index_terms;
  std::vector<Edge> edges;
  /// valid[s] lists edge positions usable on a state of s nodes, in cost order.
  std::vector<std::vector<std::uint32_t>> valid;
  double variable_cost = 0.0;

  explicit Impl(const Library& l) : lib(l) {
    build_index_terms();
    build_edges();
  }

  void offer(std::int64_t value, const Term& t, double lp) {
    if (value < 0 || value > kMaxIndexValue || lp == -std::numeric_limits<double>::infinity()) return;
    auto& slot = index_terms[value];
    if (!slot || lp > slot->log_prior ||
        (lp == slot->log_prior && (t.cost() < slot->program.cost() ||
                                   (t.cost() == slot->program.cost() && render(t) < render(slot->program))))) {
      slot = Candidate{t, lp};
    }
  }

  void build_index_terms() {
    index_terms.assign(kMaxIndexValue + 1, std::nullopt);
    const auto& prods = lib.productions();
    std::vector<int> literal_index(11, -1);
    for (std::size_t i = 0; i < prods.size(); ++i) {
      if (prods[i].kind == Production::Kind::Literal && prods[i].literal >= 0 && prods[i].literal <= 10) {
        literal_index[prods[i].literal] = static_cast<int>(i);
      }
    }
    for (std::int64_t v = 0; v <= 10; ++v) {
      if (literal_index[v] >= 0) offer(v, Term::integer(v), lib.log_prob(Context::Int, literal_index[v]));
    }
    for (std::size_t i = 0; i < prods.size(); ++i) {
      const Production& p = prods[i];
      if (p.result() != BaseType::Int || p.kind == Production::Kind::Literal) continue;
      std::size_t m = p.type.args.size();
      if (m == 0 || m > 3) continue;
      if (std::any_of(p.type.args.begin(), p.type.args.end(), [](BaseType b) { return b != BaseType::Int; })) continue;
      double head = lib.log_prob(Context::Int, static_cast<int>(i));
      std::vector<std::int64_t> digits(m, 0);
      while (true) {
        double lp = head;
        std::vector<Term> args;
        for (std::int64_t d : digits) {
          lp += lib.log_prob(Context::IntArg, literal_index[d]);
          args.push_back(Term::integer(d));
        }
        Term t = Term::apply(p.term(), args);
        std::optional<std::int64_t> value;
        if (p.kind == Production::Kind::Primitive) {
          value = digits[0] * digits[1] + digits[2];
        } else if (auto r = try_eval_int(t); r) {
          value = *r;
        }
        if (value) offer(*value, t, lp);
        std::size_t k = 0;
        while (k < m && ++digits[k] > 10) digits[k++] = 0;
        if (k == m) break;
      }
    }
  }

  void build_edges() {
    const auto& prods = lib.productions();
    variable_cost = -lib.variable_log_prob();
    for (std::size_t i = 0; i < prods.size(); ++i) {
      const Production& p = prods[i];
      if (p.result() != BaseType::Str || p.type.args.empty() || p.type.args[0] != BaseType::Str) continue;
      std::size_t m = p.type.args.size() - 1;
      if (m > 2) continue;
      if (std::any_of(p.type.args.begin() + 1, p.type.args.end(), [](BaseType b) { return b != BaseType::Int; })) {
        continue;
      }
      double head = -lib.log_prob(Context::Str, static_cast<int>(i));
      if (!std::isfinite(head)) continue;
      std::array<std::int64_t, 2> vals{};
      while (true) {
        Edge e;
        e.production = static_cast<int>(i);
        e.nvals = static_cast<std::uint8_t>(m);
        e.vals = vals;
        e.cost = head;
        e.program_cost = 100 + static_cast<std::int64_t>(m) + 1;
        bool ok = true;
        for (std::size_t j = 0; j < m; ++j) {
          const auto& t = index_terms[vals[j]];
          if (!t) {
            ok = false;
            break;
          }
          e.cost -= t->log_prior;
          e.program_cost += t->program.cost();
        }
        if (p.kind == Production::Kind::Primitive) e.max_index = vals[0];
        if (ok) edges.push_back(e);
        std::size_t k = 0;
        while (k < m && ++vals[k] > kMaxIndexValue) vals[k++] = 0;
        if (k == m) break;
      }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      if (a.production != b.production) return a.production < b.production;
      return a.vals < b.vals;
    });
    valid.assign(kSizeTableCap + 1, {});
    for (std::uint32_t s = 1; s <= kSizeTableCap; ++s) {
      for (std::uint32_t pos = 0; pos < edges.size(); ++pos) {
        if (edges[pos].max_index < 0 || edges[pos].max_index < static_cast<std::int64_t>(s)) valid[s].push_back(pos);
      }
    }
  }

  Term index_term(std::int64_t v) const { return index_terms[v]->program; }

  Outcome<Equation> apply(const Edge& e, const Equation& state) const {
    const Production& p = lib.productions()[e.production];
    if (p.kind == Production::Kind::Primitive) return try_apply_primitive(p.prim, state, static_cast<std::size_t>(e.vals[0]));
    return try_invoke(*p.abs, state, std::span<const std::int64_t>(e.vals.data(), e.nvals));
  }

  Term wrap(const Edge& e, Term inner) const {
    const Production& p = lib.productions()[e.production];
    Term t = Term::apply(p.term(), std::move(inner));
    for (std::size_t j = 0; j < e.nvals; ++j) t = Term::apply(std::move(t), index_term(e.vals[j]));
    return t;
  }
};

SolverContext::SolverContext(const Library& lib) : impl_(std::make_unique<Impl>(lib)) {}
SolverContext::~SolverContext() = default;
const Library& SolverContext::library() const noexcept { return impl_->lib; }
const std::vector<std::optional<Candidate>>& SolverContext::index_terms() const noexcept {
  return impl_->index_terms;
}
std::size_t SolverContext::edge_count() const noexcept { return impl_->edges.size(); }

namespace {

struct StateRec {
  Equation eq;
  double g;
  std::int64_t program_cost;
  int parent;
  int edge;
};

struct Frontier {
  double f;
  std::uint32_t size;  // parent state size, a tie-break toward compact states
  int state;
  std::uint32_t pos;  // position within the state's valid-edge list
};

struct FrontierOrder {
  bool operator()(const Frontier& a, const Frontier& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.size != b.size) return a.size > b.size;
    if (a.state != b.state) return a.state > b.state;
    return a.pos > b.pos;
  }
};

}  // namespace

SolveResult solve_task(const Task& task, const SolverContext& ctx, const SolveOptions& options) {
  const auto& impl = ctx.impl();
  SolveResult result;
  const SearchBudget& budget = options.budget;
  const std::int64_t base_cost = 1 + 100;  // lambda and $0

  if (check_solved(task.input) == task.goal) {
    result.programs.push_back({Term::lambda(Term::var(0)), -impl.variable_cost});
    return result;
  }
  std::uint32_t size_cap = std::min(options.max_state_nodes, kSizeTableCap);
  if (task.input.size() > size_cap || budget.max_expansions == 0) return result;

  std::vector<StateRec> states;
  std::unordered_map<Equation, int, EquationHash> seen;
  std::priority_queue<Frontier, std::vector<Frontier>, FrontierOrder> open;

  auto valid_of = [&](int s) -> const std::vector<std::uint32_t>& { return impl.valid[states[s].eq.size()]; };
  auto push = [&](int s, std::uint32_t pos) {
    const auto& v = valid_of(s);
    if (pos < v.size()) open.push({states[s].g + impl.edges[v[pos]].cost, states[s].eq.size(), s, pos});
  };
  auto program_of = [&](int s, const Edge* last) {
    std::vector<const Edge*> chain;
    if (last) chain.push_back(last);
    for (int c = s; states[c].parent >= 0; c = states[c].parent) chain.push_back(&impl.edges[states[c].edge]);
    Term t = Term::var(0);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t = impl.wrap(**it, std::move(t));
    return Term::lambda(std::move(t));
  };

  states.push_back({task.input, 0.0, base_cost, -1, -1});
  seen.emplace(task.input, 0);
  push(0, 0);

  const auto start = std::chrono::steady_clock::now();
  double first_solution = std::numeric_limits<double>::infinity();

  while (!open.empty() && result.programs.size() < options.k) {
    Frontier top = open.top();
    if (top.f > first_solution + options.solution_window) break;
    if (result.expansions >= budget.max_expansions) break;
    if ((result.expansions & 1023) == 0) {
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (secs > budget.timeout_secs) {
        result.timed_out = true;
        break;
      }
    }
    open.pop();
    ++result.expansions;
    push(top.state, top.pos + 1);

    const Edge& edge = impl.edges[valid_of(top.state)[top.pos]];
    std::int64_t pc = states[top.state].program_cost + edge.program_cost;
    if (pc > budget.max_program_cost) continue;
    auto child = impl.apply(edge, states[top.state].eq);
    if (!child) continue;
    const Equation& next = *child;
    if (next == states[top.state].eq) continue;
    if (auto v = check_solved(next)) {
      if (*v == task.goal) {
        result.programs.push_back({program_of(top.state, &edge), -(top.f + impl.variable_cost)});
        if (result.programs.size() == 1) result.first_solution_at = result.expansions;
        first_solution = std::min(first_solution, top.f);
      }
      continue;
    }
    if (next.size() > size_cap) continue;
    if (seen.count(next)) continue;
    int id = static_cast<int>(states.size());
    states.push_back({next, top.f, pc, top.state, static_cast<int>(valid_of(top.state)[top.pos])});
    seen.emplace(next, id);
    push(id, 0);
  }
  result.states = states.size();
  return result;
}

SolveResult solve_task(const Task& task, const Library& lib, const SolveOptions& options) {
  SolverContext ctx(lib);
  return solve_task(task, ctx, options);
}

}  // namespace mathsynth
