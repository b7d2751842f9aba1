// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/compression.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <unordered_set>

#include "mathsynth/error.hpp"

namespace mathsynth {
namespace {

constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();

// Result type of a spine head applied to n arguments, if that is a base type.
std::optional<BaseType> spine_type(const Term& head, std::size_t n) {
  switch (head.kind()) {
    case Term::Kind::Int: return n == 0 ? std::optional(BaseType::Int) : std::nullopt;
    case Term::Kind::Var: return n == 0 ? std::optional(BaseType::Str) : std::nullopt;
    case Term::Kind::Hole: return n == 0 ? std::optional(head.hole_type()) : std::nullopt;
    case Term::Kind::Prim: {
      Type t = primitive_type(head.primitive());
      if (n != t.args.size()) return std::nullopt;
      return t.result;
    }
    case Term::Kind::Abs: {
      const Type& t = head.abstraction()->type;
      if (n != t.args.size()) return std::nullopt;
      return t.result;
    }
    default: return std::nullopt;
  }
}

std::vector<BaseType> arg_types(const Term& head) {
  if (head.kind() == Term::Kind::Prim) return primitive_type(head.primitive()).args;
  if (head.kind() == Term::Kind::Abs) return head.abstraction()->type.args;
  return {};
}

bool concrete_head(const Term& h) { return h.kind() == Term::Kind::Prim || h.kind() == Term::Kind::Abs; }

void write_pattern(const Term& t, std::string& out) {
  if (t.kind() == Term::Kind::Hole) {
    out += '#';
    out += std::to_string(t.hole_context());
  } else if (t.kind() == Term::Kind::Apply) {
    out += '(';
    write_pattern(t.head(), out);
    for (const Term& a : t.spine_args()) {
      out += ' ';
      write_pattern(a, out);
    }
    out += ')';
  } else {
    out += render(t);
  }
}

bool match_into(const Term& p, const Term& t, std::vector<Term>& fillers) {
  switch (p.kind()) {
    case Term::Kind::Hole:
      fillers[p.hole_context()] = t;
      return true;
    case Term::Kind::Apply:
      return t.kind() == Term::Kind::Apply && match_into(p.fn(), t.fn(), fillers) &&
             match_into(p.arg(), t.arg(), fillers);
    default: return p == t;
  }
}

// ---- n-ary view of a corpus --------------------------------------------------------

struct Node {
  Term term;
  Term head;
  std::vector<int> kids;
  std::optional<BaseType> type;
  int program = 0;
};

struct Flat {
  std::vector<Node> nodes;
  std::vector<int> locations;  // candidate pattern roots, pre-order
  int programs = 0;

  explicit Flat(std::span<const CorpusEntry> corpus) {
    programs = static_cast<int>(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) add(corpus[i].program, static_cast<int>(i));
  }

  int add(const Term& t, int program) {
    if (t.kind() == Term::Kind::Lambda) return add(t.body(), program);
    int id = static_cast<int>(nodes.size());
    nodes.push_back({t, t.head(), {}, std::nullopt, program});
    std::vector<Term> args = t.spine_args();
    nodes[id].type = spine_type(nodes[id].head, args.size());
    if (nodes[id].type && concrete_head(nodes[id].head)) locations.push_back(id);
    for (const Term& a : args) {
      int k = add(a, program);
      nodes[id].kids.push_back(k);
    }
    return id;
  }
};

// ---- branch and bound --------------------------------------------------------------

struct PNode {
  enum class Kind : std::uint8_t { Open, Var, Sym } kind = Kind::Open;
  BaseType type = BaseType::Str;
  Term head = Term::integer(0);
  int nargs = 0;
  int var = 0;
};

struct Search {
  const Flat& flat;
  const CompressOptions& opt;
  CompressResult* stats;
  std::int64_t best = kNegInf;
  std::string best_render;
  std::optional<Pattern> best_pattern;

  // Optimistic utility of any completion.
  std::int64_t bound(std::int64_t cost, int arity, const std::vector<std::vector<int>>& matches) const {
    std::vector<std::int64_t> per_program(flat.programs, kNegInf);
    for (const auto& m : matches) {
      int root = m[0];
      per_program[flat.nodes[root].program] =
          std::max(per_program[flat.nodes[root].program], flat.nodes[root].term.cost());
    }
    std::vector<std::int64_t> c;
    for (auto v : per_program) {
      if (v != kNegInf) c.push_back(v);
    }
    std::sort(c.rbegin(), c.rend());
    std::int64_t ub = -cost - arity;
    for (std::size_t j = 1; j <= c.size(); ++j) {
      auto jj = static_cast<std::int64_t>(j);
      ub = std::max(ub, (jj - 1) * c[j - 1] - arity * (1 + 101 * jj) - 100 * jj);
    }
    return ub;
  }

  Term build(const std::vector<PNode>& nodes, std::size_t& pos) const {
    const PNode& n = nodes[pos++];
    if (n.kind == PNode::Kind::Var) return Term::hole(n.type, static_cast<std::uint8_t>(n.var));
    Term t = n.head;
    for (int i = 0; i < n.nargs; ++i) t = Term::apply(std::move(t), build(nodes, pos));
    return t;
  }

  std::int64_t finish(const std::vector<PNode>& nodes, std::int64_t cost, int arity,
                      const std::vector<std::vector<int>>& matches) {
    bool has_concrete = std::any_of(nodes.begin(), nodes.end(), [](const PNode& n) {
      return n.kind == PNode::Kind::Sym && concrete_head(n.head);
    });
    if (!has_concrete || arity == 0) return kNegInf;
    std::vector<bool> hit(flat.programs, false);
    std::int64_t m = 0;
    for (const auto& mt : matches) {
      int p = flat.nodes[mt[0]].program;
      if (!hit[p]) {
        hit[p] = true;
        ++m;
      }
    }
    std::int64_t saving = cost - 101 * arity - 100;
    std::int64_t u = -(cost + arity) + m * std::max<std::int64_t>(0, saving);
    if (u < best) return u;
    std::size_t pos = 0;
    Term skeleton = build(nodes, pos);
    Pattern p = make_pattern(skeleton);
    std::string r = render(p);
    if (u > best || r < best_render) {
      best = u;
      best_render = std::move(r);
      best_pattern = std::move(p);
    }
    return u;
  }

  // Returns the best completion utility below this node (kNegInf if none).
  std::int64_t dfs(std::vector<PNode>& nodes, std::size_t cursor, std::int64_t cost, int arity,
                   const std::vector<std::vector<int>>& matches) {
    if (stats) ++stats->search_nodes;
    while (cursor < nodes.size() && nodes[cursor].kind != PNode::Kind::Open) ++cursor;
    if (cursor == nodes.size()) return finish(nodes, cost, arity, matches);

    std::int64_t ub = bound(cost, arity, matches);
    if (!opt.check_bounds && ub < best) return kNegInf;

    std::int64_t sub_best = kNegInf;
    // Concrete symbols first, grouped by (head, argument count).
    std::vector<std::pair<std::string, std::vector<std::vector<int>>>> groups;
    std::map<std::string, std::size_t> group_of;
    for (const auto& m : matches) {
      const Node& n = flat.nodes[m[cursor]];
      if (!concrete_head(n.head) && n.head.kind() != Term::Kind::Int) continue;
      std::string key = render(n.head) + "/" + std::to_string(n.kids.size());
      auto [it, fresh] = group_of.emplace(key, groups.size());
      if (fresh) groups.push_back({key, {}});
      groups[it->second].second.push_back(m);
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t limit = opt.max_pattern_nodes == 0 ? std::numeric_limits<std::size_t>::max() : opt.max_pattern_nodes;
    for (auto& [key, gm] : groups) {
      const Node& sample = flat.nodes[gm.front()[cursor]];
      std::size_t k = sample.kids.size();
      if (nodes.size() + k > limit) continue;
      std::vector<BaseType> types = arg_types(sample.head);
      std::vector<PNode> next = nodes;
      next[cursor] = PNode{PNode::Kind::Sym, nodes[cursor].type, sample.head, static_cast<int>(k), 0};
      std::vector<PNode> kids;
      for (std::size_t i = 0; i < k; ++i) kids.push_back(PNode{PNode::Kind::Open, types[i], Term::integer(0), 0, 0});
      next.insert(next.begin() + static_cast<std::ptrdiff_t>(cursor) + 1, kids.begin(), kids.end());
      std::vector<std::vector<int>> nm;
      nm.reserve(gm.size());
      for (auto& m : gm) {
        std::vector<int> row = m;
        const Node& n = flat.nodes[m[cursor]];
        row.insert(row.begin() + static_cast<std::ptrdiff_t>(cursor) + 1, n.kids.begin(), n.kids.end());
        nm.push_back(std::move(row));
      }
      std::int64_t c = cost + static_cast<std::int64_t>(k) * 101;
      sub_best = std::max(sub_best, dfs(next, cursor + 1, c, arity, nm));
    }
    if (cursor > 0 && arity < opt.max_arity) {
      PNode saved = nodes[cursor];
      nodes[cursor].kind = PNode::Kind::Var;
      nodes[cursor].var = arity;
      sub_best = std::max(sub_best, dfs(nodes, cursor + 1, cost, arity + 1, matches));
      nodes[cursor] = saved;
    }
    if (opt.check_bounds && stats) {
      ++stats->bound_checks;
      if (sub_best != kNegInf && sub_best > ub) ++stats->bound_violations;
    }
    return sub_best;
  }
};

Term rewrite_term(const Term& t, const Pattern& p, const AbstractionPtr& a) {
  if (t.kind() == Term::Kind::Lambda) return Term::lambda(rewrite_term(t.body(), p, a));
  if (auto fillers = match_pattern(p, t)) {
    Term out = Term::abs(a);
    for (const Term& f : *fillers) out = Term::apply(std::move(out), rewrite_term(f, p, a));
    return out;
  }
  if (t.kind() != Term::Kind::Apply) return t;
  Term out = t.head();
  for (const Term& arg : t.spine_args()) out = Term::apply(std::move(out), rewrite_term(arg, p, a));
  return out;
}

void check_pattern(const Term& t, bool root, std::optional<BaseType> expected, Pattern& p, bool& concrete) {
  switch (t.kind()) {
    case Term::Kind::Hole:
      if (root) throw ValidationError("pattern root cannot be a variable");
      if (t.hole_context() != p.arity) throw ValidationError("pattern variables must be numbered in pre-order");
      if (expected && *expected != t.hole_type()) throw ValidationError("pattern variable has the wrong type");
      p.var_types.push_back(t.hole_type());
      ++p.arity;
      return;
    case Term::Kind::Lambda: throw ValidationError("patterns cannot contain lambdas");
    case Term::Kind::Var: throw ValidationError("patterns cannot contain free variables");
    default: break;
  }
  Term head = t.head();
  if (head.kind() == Term::Kind::Hole) throw ValidationError("pattern variable in function position");
  std::vector<Term> args = t.spine_args();
  auto type = spine_type(head, args.size());
  if (!type) throw ValidationError("pattern node is not a full application: " + render(t));
  if (expected && *expected != *type) throw ValidationError("ill-typed pattern: " + render(t));
  if (root) p.result = *type;
  concrete = concrete || concrete_head(head);
  std::vector<BaseType> types = arg_types(head);
  for (std::size_t i = 0; i < args.size(); ++i) check_pattern(args[i], false, types[i], p, concrete);
}

// ---- pattern text --------------------------------------------------------------------

struct PatternReader {
  std::string_view text;
  std::span<const AbstractionPtr> known;
  std::size_t pos = 0;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  std::string_view atom() {
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
           text[pos] != ')') {
      ++pos;
    }
    if (start == pos) throw ParseError("expected a symbol", pos);
    return text.substr(start, pos - start);
  }

  Term terminal() {
    skip();
    if (pos + 1 < text.size() && text[pos] == '#' && text[pos + 1] == '(') {
      std::size_t start = pos, depth = 0;
      ++pos;
      do {
        if (pos >= text.size()) throw ParseError("unbalanced parentheses", pos);
        if (text[pos] == '(') ++depth;
        if (text[pos] == ')') --depth;
        ++pos;
      } while (depth > 0);
      return parse_program(text.substr(start, pos - start), known);
    }
    std::size_t at = pos;
    std::string_view a = atom();
    if (a.front() == '#') {
      int v = 0;
      for (char c : a.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad pattern variable", at);
        v = v * 10 + (c - '0');
      }
      if (a.size() < 2 || v > 255) throw ParseError("bad pattern variable", at);
      return Term::hole(BaseType::Str, static_cast<std::uint8_t>(v));  // type fixed by the caller
    }
    return parse_program(a, known);
  }

  Term node(std::optional<BaseType> expected) {
    skip();
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      Term head = terminal();
      std::vector<BaseType> types = arg_types(head);
      std::vector<Term> args;
      skip();
      while (pos < text.size() && text[pos] != ')') {
        if (args.size() >= types.size()) throw ParseError("too many arguments", pos);
        args.push_back(node(types[args.size()]));
        skip();
      }
      if (pos >= text.size()) throw ParseError("unbalanced parentheses", pos);
      ++pos;
      return Term::apply(head, args);
    }
    Term t = terminal();
    if (t.kind() == Term::Kind::Hole) return Term::hole(expected.value_or(BaseType::Str), t.hole_context());
    return t;
  }
};

}  // namespace

Pattern make_pattern(Term skeleton) {
  Pattern p;
  bool concrete = false;
  check_pattern(skeleton, true, std::nullopt, p, concrete);
  if (!concrete) throw ValidationError("pattern needs a primitive or abstraction node");
  p.skeleton = std::move(skeleton);
  return p;
}

Pattern parse_pattern(std::string_view text, std::span<const AbstractionPtr> known) {
  PatternReader r{text, known};
  Term t = r.node(std::nullopt);
  r.skip();
  if (r.pos != text.size()) throw ParseError("trailing input", r.pos);
  return make_pattern(std::move(t));
}

std::string render(const Pattern& p) {
  std::string out;
  write_pattern(p.skeleton, out);
  return out;
}

namespace {

Term to_body(const Term& t, int arity) {
  switch (t.kind()) {
    case Term::Kind::Hole: return Term::var(static_cast<std::uint32_t>(arity - 1 - t.hole_context()));
    case Term::Kind::Apply: return Term::apply(to_body(t.fn(), arity), to_body(t.arg(), arity));
    default: return t;
  }
}

}  // namespace

AbstractionPtr to_abstraction(const Pattern& p, std::string name, int origin_iteration) {
  if (p.arity == 0) throw ValidationError("abstractions need at least one variable");
  Term body = to_body(p.skeleton, p.arity);
  for (int i = 0; i < p.arity; ++i) body = Term::lambda(std::move(body));
  return make_abstraction(std::move(name), std::move(body), origin_iteration);
}

std::size_t terminal_count(const Term& t) noexcept {
  switch (t.kind()) {
    case Term::Kind::Lambda: return terminal_count(t.body());
    case Term::Kind::Apply: return terminal_count(t.fn()) + terminal_count(t.arg());
    default: return 1;
  }
}

std::int64_t abstraction_cost(const Pattern& p) noexcept { return p.skeleton.cost() + p.arity; }

std::optional<std::vector<Term>> match_pattern(const Pattern& p, const Term& t) {
  std::vector<Term> fillers(p.arity, Term::integer(0));
  if (!match_into(p.skeleton, t, fillers)) return std::nullopt;
  return fillers;
}

std::int64_t utility(const Pattern& p, std::span<const CorpusEntry> corpus) {
  std::int64_t total = -abstraction_cost(p);
  Flat flat(corpus);
  std::vector<std::int64_t> best(corpus.size(), 0);
  for (int id : flat.locations) {
    const Node& n = flat.nodes[id];
    auto fillers = match_pattern(p, n.term);
    if (!fillers) continue;
    std::int64_t rewritten = 100;
    for (const Term& f : *fillers) rewritten += 1 + f.cost();
    best[n.program] = std::max(best[n.program], n.term.cost() - rewritten);
  }
  for (auto b : best) total += b;
  return total;
}

Term rewrite_program(const Term& program, const Pattern& p, const AbstractionPtr& a) {
  return rewrite_term(program, p, a);
}

std::vector<CorpusEntry> rewrite_with_abstraction(const Pattern& p, const AbstractionPtr& a,
                                                  std::span<const CorpusEntry> corpus) {
  std::vector<CorpusEntry> out;
  out.reserve(corpus.size());
  for (const auto& e : corpus) out.push_back({e.task_id, rewrite_term(e.program, p, a)});
  return out;
}

std::int64_t corpus_cost(std::span<const CorpusEntry> corpus) noexcept {
  std::int64_t c = 0;
  for (const auto& e : corpus) c += e.program.cost();
  return c;
}

std::optional<PatternChoice> best_pattern(std::span<const CorpusEntry> corpus, const CompressOptions& options,
                                          CompressResult* stats) {
  Flat flat(corpus);
  Search s{flat, options, stats, kNegInf, {}, std::nullopt};
  for (BaseType root : {BaseType::Str, BaseType::Int}) {
    std::vector<std::vector<int>> matches;
    for (int id : flat.locations) {
      if (flat.nodes[id].type == root) matches.push_back({id});
    }
    if (matches.empty()) continue;
    std::vector<PNode> nodes{PNode{PNode::Kind::Open, root, Term::integer(0), 0, 0}};
    s.dfs(nodes, 0, 100, 0, matches);
  }
  if (!s.best_pattern) return std::nullopt;
  return PatternChoice{*s.best_pattern, s.best};
}

CompressResult compress(std::span<const CorpusEntry> corpus, const CompressOptions& options) {
  if (options.rounds < 1) throw ValidationError("compress needs at least one round");
  if (options.max_arity < 0) throw ValidationError("max_arity must be non-negative");
  CompressResult result;
  result.corpus.assign(corpus.begin(), corpus.end());
  for (int round = 0; round < options.rounds; ++round) {
    auto choice = best_pattern(result.corpus, options, &result);
    if (!choice || choice->utility <= 0) break;
    std::string name = "f" + std::to_string(options.first_name_index + result.steps.size());
    AbstractionPtr a = to_abstraction(choice->pattern, name, options.iteration);
    std::int64_t before = corpus_cost(result.corpus);
    result.corpus = rewrite_with_abstraction(choice->pattern, a, result.corpus);
    result.steps.push_back({choice->pattern, a, choice->utility, before - corpus_cost(result.corpus)});
  }
  return result;
}

namespace {

// All top prefixes of the subtree at `id`, with cut children as variables
// numbered later by make_pattern order. Holes get a placeholder number that is
// fixed after assembly.
void prefixes(const Flat& flat, int id, bool root, std::size_t max_nodes, int max_arity,
              std::vector<std::pair<Term, std::pair<std::size_t, int>>>& out) {
  const Node& n = flat.nodes[id];
  std::vector<std::pair<Term, std::pair<std::size_t, int>>> acc;
  if (!root && n.type) acc.push_back({Term::hole(*n.type, 0), {1, 1}});
  if (n.head.kind() == Term::Kind::Var || !n.type) {
    out = std::move(acc);
    return;
  }
  std::vector<std::pair<Term, std::pair<std::size_t, int>>> partial{{n.head, {1, 0}}};
  for (int kid : n.kids) {
    std::vector<std::pair<Term, std::pair<std::size_t, int>>> options;
    prefixes(flat, kid, false, max_nodes, max_arity, options);
    std::vector<std::pair<Term, std::pair<std::size_t, int>>> grown;
    for (const auto& [pt, pc] : partial) {
      for (const auto& [ot, oc] : options) {
        std::size_t nodes = pc.first + oc.first;
        int arity = pc.second + oc.second;
        if (nodes > max_nodes || arity > max_arity) continue;
        grown.push_back({Term::apply(pt, ot), {nodes, arity}});
      }
    }
    partial = std::move(grown);
  }
  for (auto& p : partial) acc.push_back(std::move(p));
  out = std::move(acc);
}

Term renumber(const Term& t, int& next) {
  switch (t.kind()) {
    case Term::Kind::Hole: return Term::hole(t.hole_type(), static_cast<std::uint8_t>(next++));
    case Term::Kind::Apply: {
      Term f = renumber(t.fn(), next);
      return Term::apply(std::move(f), renumber(t.arg(), next));
    }
    default: return t;
  }
}

}  // namespace

OracleResult exhaustive_oracle(std::span<const CorpusEntry> corpus, int max_arity, std::size_t max_pattern_nodes) {
  if (corpus.empty()) throw ValidationError("oracle needs a non-empty corpus");
  if (corpus.size() > 5) throw ValidationError("oracle corpus limited to 5 programs");
  if (max_pattern_nodes > 7) throw ValidationError("oracle patterns limited to 7 nodes");
  for (const auto& e : corpus) {
    if (terminal_count(e.program) > 15) throw ValidationError("oracle programs limited to 15 nodes");
  }
  Flat flat(corpus);
  std::unordered_set<Term, TermHash> seen;
  OracleResult best;
  bool found = false;
  std::string best_render;
  for (int id : flat.locations) {
    std::vector<std::pair<Term, std::pair<std::size_t, int>>> all;
    prefixes(flat, id, true, max_pattern_nodes, max_arity, all);
    for (const auto& [raw, counts] : all) {
      int next = 0;
      Term skeleton = renumber(raw, next);
      if (next == 0 || !seen.insert(skeleton).second) continue;
      ++best.candidates;
      Pattern p = make_pattern(skeleton);
      std::int64_t u = utility(p, corpus);
      std::string r = render(p);
      if (!found || u > best.utility || (u == best.utility && r < best_render)) {
        found = true;
        best.pattern = std::move(p);
        best.utility = u;
        best_render = std::move(r);
      }
    }
  }
  if (!found) throw ValidationError("corpus has no location to abstract");
  return best;
}

}  // namespace mathsynth
