// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mathsynth/error.hpp"

namespace mathsynth {

using nlohmann::json;

const std::vector<Shape>& builtin_shapes() {
  static const std::vector<Shape> shapes = {
      {"x_plus_b", "(= (+ x B) C)", " kk "},
      {"x_minus_b", "(= (- x B) C)", " kk "},
      {"ax", "(= (* A x) C)", "c k "},
      {"x_over_a", "(= (/ x A) C)", "c k "},
      {"ax_plus_b", "(= (+ (* A x) B) C)", "ckk "},
      {"ax_minus_b", "(= (- (* A x) B) C)", "ckk "},
      {"b_plus_ax", "(= (+ B (* A x)) C)", "ckk "},
      {"c_eq_ax_plus_b", "(= C (+ (* A x) B))", "ckk "},
      {"ax_plus_bx", "(= (+ (* A x) (* B x)) C)", "cck "},
      {"a_eq_bx_minus_cx", "(= A (- (* B x) (* C x)))", "kcc "},
      {"a_over_x_plus_b", "(= (+ (/ A x) B) C)", "kkk "},
      {"a_times_x_plus_b", "(= (* A (+ x B)) C)", "ckk "},
      {"a_plus_bx_plus_cx", "(= (+ (+ A (* B x)) (* C x)) D)", "kcck"},
      {"ax_plus_1max_eq_c_plus_d", "(= (+ (* A x) (* B x)) (+ C D))", "c1kk"},
      {"b_plus_c_eq_x", "(= (+ B C) x)", " kk "},
      {"a_plus_b_over_c_eq_x", "(= (/ (+ A B) C) x)", "kkc "},
  };
  return shapes;
}

const Shape& shape_by_id(std::string_view id) {
  for (const Shape& s : builtin_shapes()) {
    if (s.id == id) return s;
  }
  throw ValidationError("unknown shape: " + std::string(id));
}

std::string_view shape_of_template(std::string_view template_id) {
  return template_id.substr(0, template_id.find('#'));
}

// ---- goal oracle -------------------------------------------------------------------

namespace {

// Polynomial in x, coefficient i for x^i, no trailing zeros.
using Poly = std::vector<Rational>;

void trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Poly padd(const Poly& a, const Poly& b, bool negate_b) {
  Poly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    Rational x = i < a.size() ? a[i] : Rational(0);
    Rational y = i < b.size() ? b[i] : Rational(0);
    r[i] = negate_b ? x - y : x + y;
  }
  trim(r);
  return r;
}

Poly pmul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  }
  trim(r);
  return r;
}

Rational peval(const Poly& p, const Rational& x) {
  Rational v(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

struct Fraction {
  Poly num, den;
};

std::optional<Fraction> to_fraction(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: {
      Poly p{Rational(e.value())};
      trim(p);
      return Fraction{p, {Rational(1)}};
    }
    case Expr::Kind::Var: return Fraction{{Rational(0), Rational(1)}, {Rational(1)}};
    case Expr::Kind::Node: break;
  }
  auto l = to_fraction(e.left());
  auto r = to_fraction(e.right());
  if (!l || !r) return std::nullopt;
  switch (e.op()) {
    case Op::Add: return Fraction{padd(pmul(l->num, r->den), pmul(r->num, l->den), false), pmul(l->den, r->den)};
    case Op::Sub: return Fraction{padd(pmul(l->num, r->den), pmul(r->num, l->den), true), pmul(l->den, r->den)};
    case Op::Mul: return Fraction{pmul(l->num, r->num), pmul(l->den, r->den)};
    case Op::Div:
      if (r->num.empty()) return std::nullopt;
      return Fraction{pmul(l->num, r->den), pmul(l->den, r->num)};
    case Op::Eq: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Rational> oracle_goal(const Equation& e) noexcept {
  try {
    auto l = to_fraction(e.lhs());
    auto r = to_fraction(e.rhs());
    if (!l || !r) return std::nullopt;
    Poly p = padd(pmul(l->num, r->den), pmul(r->num, l->den), true);
    if (p.size() != 2) return std::nullopt;
    Rational x = -p[0] / p[1];
    if (peval(l->den, x).is_zero() || peval(r->den, x).is_zero()) return std::nullopt;
    return x;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ---- generation ----------------------------------------------------------------------

Equation instantiate(const Shape& shape, std::array<std::int64_t, 4> constants) {
  std::string text;
  for (char c : shape.text) {
    if (c >= 'A' && c <= 'D') {
      text += std::to_string(constants[c - 'A']);
    } else {
      text += c;
    }
  }
  Equation e = parse_prefix(text);
  if (!oracle_goal(e)) throw ValidationError("no unique solution: " + text);
  return e;
}

namespace {

std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

Task random_instance(const Shape& shape, std::mt19937_64& rng, std::string id, std::string template_id) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::array<std::int64_t, 4> k{};
    for (std::size_t i = 0; i < 4; ++i) {
      char s = shape.slots[i];
      if (s == 'c') k[i] = draw(rng, 2, 10);
      if (s == 'k') k[i] = draw(rng, 1, 10);
      if (s == '1') k[i] = 1 - k[0];
    }
    std::vector<std::int64_t> used;
    for (std::size_t i = 0; i < 4; ++i) {
      if (shape.slots[i] != ' ') used.push_back(k[i]);
    }
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end()) continue;
    std::optional<Equation> e;
    try {
      e = instantiate(shape, k);
    } catch (const ValidationError&) {
      continue;
    }
    return Task{std::move(id), std::move(template_id), *e, *oracle_goal(*e)};
  }
  throw ValidationError("could not instantiate shape " + std::string(shape.id));
}

GeneratedCorpus generate_corpus(std::uint64_t seed, std::size_t n_templates, std::vector<std::string> shapes,
                                double train_fraction) {
  if (train_fraction < 0.0 || train_fraction > 1.0) throw ValidationError("train fraction must be in [0, 1]");
  if (shapes.empty()) {
    for (const Shape& s : builtin_shapes()) shapes.emplace_back(s.id);
  }
  std::mt19937_64 rng(seed);
  std::vector<Task> all;
  for (std::size_t i = 0; i < n_templates; ++i) {
    const Shape& shape = shape_by_id(shapes[i % shapes.size()]);
    char id[32];
    std::snprintf(id, sizeof id, "t%03zu", i);
    char tid[32];
    std::snprintf(tid, sizeof tid, "#%03zu", i);
    all.push_back(random_instance(shape, rng, id, std::string(shape.id) + tid));
  }
  std::vector<std::size_t> order(n_templates);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n_templates; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  auto n_train = static_cast<std::size_t>(static_cast<double>(n_templates) * train_fraction + 0.5);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  GeneratedCorpus out;
  for (auto i : train_idx) out.train.push_back(all[i]);
  for (auto i : test_idx) out.test.push_back(all[i]);
  return out;
}

// ---- files -----------------------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tasks_to_jsonl(const std::vector<Task>& tasks) {
  std::string out;
  for (const Task& t : tasks) {
    json j{{"id", t.id}, {"template_id", t.template_id}, {"input", to_prefix(t.input)}, {"goal", t.goal.str()}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Task> tasks_from_jsonl(std::string_view text) {
  std::vector<Task> tasks;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::string where = "task line " + std::to_string(line_no);
    try {
      json j = json::parse(line);
      Task t{j.at("id").get<std::string>(), j.at("template_id").get<std::string>(),
             parse_equation(j.at("input").get<std::string>()), Rational::parse(j.at("goal").get<std::string>())};
      auto g = oracle_goal(t.input);
      if (!g) throw ValidationError(where + ": equation has no unique solution");
      if (*g != t.goal) {
        throw ValidationError(where + ": declared goal " + t.goal.str() + " but the equation gives " + g->str());
      }
      tasks.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const ParseError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return tasks;
}

void save_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks) {
  write_file_atomic(path, tasks_to_jsonl(tasks));
}

std::vector<Task> load_tasks(const std::filesystem::path& path) { return tasks_from_jsonl(read_file(path)); }

SolutionMap solutions_from_json(std::string_view text, Solution::Source source) {
  SolutionMap out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("solution file: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("solution file must map task ids to step lists");
  for (const auto& [id, steps] : j.items()) {
    if (!steps.is_array()) throw ValidationError("task " + id + ": steps must be a list");
    Solution s{id, {}, source};
    std::size_t k = 0;
    for (const auto& step : steps) {
      ++k;
      try {
        s.states.push_back(parse_equation(step.get<std::string>()));
      } catch (const Error& e) {
        throw ValidationError("task " + id + ", step " + std::to_string(k) + ": " + e.what());
      } catch (const json::exception& e) {
        throw ValidationError("task " + id + ", step " + std::to_string(k) + ": " + e.what());
      }
    }
    if (s.states.empty()) throw ValidationError("task " + id + ": no steps");
    out.emplace(id, std::move(s));
  }
  return out;
}

std::string solutions_to_json(const SolutionMap& solutions) {
  json j = json::object();
  for (const auto& [id, s] : solutions) {
    json steps = json::array();
    for (const Equation& e : s.states) steps.push_back(to_infix(e));
    j[id] = std::move(steps);
  }
  return j.dump(2) + "\n";
}

SolutionMap load_solutions(const std::filesystem::path& path, Solution::Source source) {
  return solutions_from_json(read_file(path), source);
}

std::string checkpoint_to_json(const Checkpoint& c) {
  json abstractions = json::array();
  for (const auto& a : c.library.abstractions()) {
    abstractions.push_back({{"name", a->name},
                            {"body", render(Term::abs(a))},
                            {"type", a->type.str()},
                            {"origin_iteration", a->origin_iteration}});
  }
  json productions = json::array();
  for (const auto& p : c.library.productions()) {
    productions.push_back({{"name", p.name()}, {"log_weight", p.log_weight}});
  }
  json j{{"iteration", c.iteration},
         {"abstractions", abstractions},
         {"productions", productions},
         {"variable_log_weight", c.library.variable_log_weight()},
         {"solved", c.solved}};
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    Checkpoint c;
    c.iteration = j.at("iteration").get<int>();
    Library lib = Library::initial();
    for (const auto& a : j.at("abstractions")) {
      auto known = lib.abstractions();
      Term ref = parse_program(a.at("body").get<std::string>(), known);
      if (ref.kind() != Term::Kind::Abs) throw ValidationError("abstraction body must be #(lambda ...)");
      lib.add_abstraction(make_abstraction(a.at("name").get<std::string>(), ref.abstraction()->body,
                                           a.at("origin_iteration").get<int>()));
    }
    const auto& prods = j.at("productions");
    if (prods.size() != lib.productions().size()) throw ValidationError("checkpoint production count mismatch");
    std::vector<double> weights;
    for (std::size_t i = 0; i < prods.size(); ++i) {
      if (prods[i].at("name").get<std::string>() != lib.productions()[i].name()) {
        throw ValidationError("checkpoint production " + std::to_string(i) + " does not match the library");
      }
      weights.push_back(prods[i].at("log_weight").get<double>());
    }
    lib.set_weights(weights, j.at("variable_log_weight").get<double>());
    lib.set_iteration(c.iteration);
    c.library = std::move(lib);
    c.solved = j.at("solved").get<std::map<std::string, std::string>>();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_file_atomic(path, checkpoint_to_json(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_file(path)); }

}  // namespace mathsynth
