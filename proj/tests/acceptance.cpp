// Acceptance run: one PASS/FAIL line per criterion, thresholds pinned below.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include <spdlog/spdlog.h>

#include "mathsynth/compression.hpp"
#include "mathsynth/enumerator.hpp"
#include "mathsynth/interpreter.hpp"
#include "mathsynth/metric.hpp"
#include "mathsynth/primitives.hpp"
#include "mathsynth/training.hpp"
#include "worked_example.hpp"
#include "support.hpp"

using namespace mathsynth;
namespace fs = std::filesystem;

namespace {

// 1: primitive soundness
constexpr int kSoundApplications = 1000;
constexpr int kSamplePoints = 5;
constexpr double kSoundSeconds = 10.0;
// 2: laws
constexpr int kLawEquations = 200;
// 3: metric
constexpr std::int64_t kWorkedShortF = 8;
const Rational kWorkedC{2, 3};
constexpr int kSelfScoreSolutions = 50;
// 4: compression
constexpr int kOracleCorpora = 25;
constexpr std::size_t kOracleNodes = 7;
constexpr double kCompressSeconds = 120.0;
// 5: enumeration
constexpr std::size_t kEnumerated = 10000;
// 6: end to end
constexpr std::uint64_t kCorpusSeed = 1;
constexpr std::size_t kTemplates = 30;
constexpr double kTrainFraction = 0.7;
constexpr int kIterations = 5;
constexpr std::size_t kBudget = 1000000;
constexpr double kMinTrainAccuracy = 0.80;
constexpr double kMinTestAccuracy = 0.70;
constexpr std::size_t kMinReuse = 2;
// 7: template generalization
constexpr int kReinstantiations = 20;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const char* id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %-2s %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Rational random_point(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> p(-20, 20), q(1, 7);
  return Rational(p(rng), q(rng));
}

std::optional<Rational> combine(Prim p, const Rational& a, const Rational& b) {
  switch (p) {
    case Prim::Add: return Rational::try_add(a, b);
    case Prim::Sub: return Rational::try_sub(a, b);
    case Prim::Mult: return Rational::try_mul(a, b);
    case Prim::Div: return Rational::try_div(a, b);
    default: return std::nullopt;
  }
}

bool arithmetic(Prim p) { return p == Prim::Add || p == Prim::Sub || p == Prim::Mult || p == Prim::Div; }

// 0 = checked and sound, 1 = unsound, 2 = no usable sample points.
int check_application(Prim p, const Equation& before, std::size_t index, const Equation& after,
                      const Rational& goal, std::mt19937_64& rng) {
  Expr operand = arithmetic(p) ? subtree_at(before, {index}) : Expr::constant(0);
  auto holds_at_goal = [&] {
    auto l = try_eval_at(after.lhs(), goal), r = try_eval_at(after.rhs(), goal);
    return !l || !r || *l == *r;
  };
  if (!holds_at_goal()) return 1;
  int used = 0;
  for (int attempt = 0; attempt < 200 && used < kSamplePoints; ++attempt) {
    Rational x = random_point(rng);
    auto l = try_eval_at(before.lhs(), x), r = try_eval_at(before.rhs(), x);
    auto l2 = try_eval_at(after.lhs(), x), r2 = try_eval_at(after.rhs(), x);
    if (!l || !r || !l2 || !r2) continue;
    if (arithmetic(p)) {
      auto y = try_eval_at(operand, x);
      if (!y || y->is_zero()) continue;
      auto el = combine(p, *l, *y), er = combine(p, *r, *y);
      if (!el || !er) continue;
      if (*el != *l2 || *er != *r2) return 1;
    } else if (!((*l == *l2 && *r == *r2) || (*l == *r2 && *r == *l2))) {
      return 1;
    }
    ++used;
  }
  return used == kSamplePoints ? 0 : 2;
}

void criterion_soundness() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  const auto& shapes = builtin_shapes();
  std::uniform_int_distribution<std::size_t> shape_pick(0, shapes.size() - 1), prim_pick(0, kEquationPrims.size() - 1);
  std::uniform_int_distribution<int> walk(0, 3);
  int checked = 0, unsound = 0, degenerate = 0;
  std::set<Prim> covered;
  for (int guard = 0; checked < kSoundApplications && guard < 1000000; ++guard) {
    Task t = random_instance(shapes[shape_pick(rng)], rng, "s", "s");
    Equation e = t.input;
    for (int k = walk(rng); k > 0; --k) {
      std::size_t i = std::uniform_int_distribution<std::size_t>(0, e.size() - 1)(rng);
      auto next = try_apply_primitive(kEquationPrims[prim_pick(rng)], e, i);
      if (next && next->size() <= 40) e = *next;
    }
    Prim p = kEquationPrims[prim_pick(rng)];
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, e.size() - 1)(rng);
    auto out = try_apply_primitive(p, e, i);
    if (!out) continue;
    switch (check_application(p, e, i, *out, t.goal, rng)) {
      case 0: ++checked; covered.insert(p); break;
      case 1: ++checked; ++unsound; break;
      default: ++degenerate;
    }
  }
  double secs = seconds_since(t0);
  bool pass = checked == kSoundApplications && unsound == 0 && secs < kSoundSeconds &&
              covered.size() == kEquationPrims.size();
  report("1", "primitive soundness", pass,
         fmt("%d applications, %d unsound, %zu/%zu primitives, %d skipped as degenerate, %.2fs", checked, unsound,
             covered.size(), kEquationPrims.size(), degenerate, secs));
}

Expr strip_unit_factor(const Expr& e) {
  if (!e.is_node()) return e;
  Expr l = strip_unit_factor(e.left()), r = strip_unit_factor(e.right());
  if (e.op() == Op::Mul) {
    if (l.kind() == Expr::Kind::Const && l.value() == 1) return r;
    if (r.kind() == Expr::Kind::Const && r.value() == 1) return l;
  }
  return Expr::node(e.op(), l, r);
}

void criterion_laws() {
  std::mt19937_64 rng(12);
  const auto& shapes = builtin_shapes();
  std::vector<Equation> pool;
  for (int k = 0; k < kLawEquations / 2; ++k) {
    pool.push_back(random_instance(shapes[k % shapes.size()], rng, "l", "l").input);
  }
  while (pool.size() < static_cast<std::size_t>(kLawEquations)) pool.push_back(testing::random_equation(rng, 3));
  std::size_t checks = 0, broken = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++broken;
  };
  for (const Equation& e : pool) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (auto s = try_apply_primitive(Prim::Swap, e, i)) {
        auto back = try_apply_primitive(Prim::Swap, *s, i);
        expect(back && *back == e);
      }
      if (auto r = try_apply_primitive(Prim::RRotate, e, i)) {
        auto back = try_apply_primitive(Prim::LRotate, *r, i);
        expect(back && *back == e);
      }
      if (auto l = try_apply_primitive(Prim::LRotate, e, i)) {
        auto back = try_apply_primitive(Prim::RRotate, *l, i);
        expect(back && *back == e);
      }
      if (auto d = try_apply_primitive(Prim::Dist, e, i)) {
        auto back = try_apply_primitive(Prim::RevDist, *d, i);
        expect(back && strip_unit_factor(back->tree()) == strip_unit_factor(e.tree()));
      }
      if (auto s = try_apply_primitive(Prim::Simplify, e, i)) {
        auto again = try_apply_primitive(Prim::Simplify, *s, i);
        expect(again && *again == *s);
      }
    }
  }
  report("2", "algebraic laws", broken == 0 && checks > 0,
         fmt("%zu equations, %zu law instances, %zu broken", pool.size(), checks, broken));
}

template <std::size_t N>
Solution parse_solution(const std::array<const char*, N>& lines) {
  Solution s;
  s.task_id = "worked";
  s.source = Solution::Source::IngestedBaseline;
  for (const char* l : lines) s.states.push_back(parse_infix(l));
  return s;
}

void criterion_metric() {
  Solution shorter = parse_solution(testing::kWorkedShort);
  Solution longer = parse_solution(testing::kWorkedLong);
  std::int64_t f = solution_cost_f(shorter);
  auto c = c_score_exact(shorter, longer);
  std::mt19937_64 rng(13);
  int zero = 0;
  for (int k = 0; k < kSelfScoreSolutions; ++k) {
    Task t = random_instance(builtin_shapes()[k % builtin_shapes().size()], rng, "m", "m");
    Solution s;
    s.task_id = "m";
    s.states.push_back(t.input);
    Equation e = t.input;
    for (int step = 0; step < 4; ++step) {
      std::size_t i = std::uniform_int_distribution<std::size_t>(0, e.size() - 1)(rng);
      if (auto next = try_apply_primitive(kEquationPrims[step * 3 % kEquationPrims.size()], e, i)) {
        e = *next;
        s.states.push_back(e);
      }
    }
    auto self = c_score_exact(s, s);
    if (s.states.size() == 1 ? !self.has_value() : (self && self->is_zero())) ++zero;
  }
  bool pass = f == kWorkedShortF && c && *c == kWorkedC && zero == kSelfScoreSolutions;
  report("3", "metric oracle", pass,
         fmt("f=%lld, C=%s, self-score zero on %d/%d", static_cast<long long>(f),
             c ? (std::to_string(c->num()) + "/" + std::to_string(c->den())).c_str() : "undefined", zero,
             kSelfScoreSolutions));
}

void criterion_compression() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(14);
  std::vector<Equation> inputs;
  for (int k = 0; k < 3; ++k) inputs.push_back(random_instance(builtin_shapes()[k], rng, "c", "c").input);
  int agree = 0, monotone = 0, preserved = 0, rewrites = 0;
  std::size_t violations = 0;
  for (int k = 0; k < kOracleCorpora; ++k) {
    std::vector<CorpusEntry> corpus;
    int programs = std::uniform_int_distribution<int>(3, 5)(rng);
    for (int j = 0; j < programs; ++j) {
      int steps = std::uniform_int_distribution<int>(2, 6)(rng);
      corpus.push_back({"p" + std::to_string(j), testing::random_chain(rng, steps)});
    }
    CompressOptions opt;
    opt.max_pattern_nodes = kOracleNodes;
    opt.check_bounds = true;
    CompressResult stats;
    auto fast = best_pattern(corpus, opt, &stats);
    auto slow = exhaustive_oracle(corpus, opt.max_arity, kOracleNodes);
    violations += stats.bound_violations;
    std::int64_t fast_u = fast ? std::max<std::int64_t>(fast->utility, 0) : 0;
    if (fast_u == std::max<std::int64_t>(slow.utility, 0)) ++agree;

    opt.check_bounds = false;
    auto result = compress(corpus, opt);
    std::vector<CorpusEntry> current = corpus;
    bool down = true, same = true;
    for (const auto& step : result.steps) {
      auto next = rewrite_with_abstraction(step.pattern, step.abstraction, current);
      if (corpus_cost(next) >= corpus_cost(current)) down = false;
      for (std::size_t j = 0; j < next.size(); ++j) {
        for (const Equation& in : inputs) {
          auto a = try_evaluate(corpus[j].program, in);
          auto b = try_evaluate(next[j].program, in);
          if (a.ok() != b.ok() || (a.ok() && *a != *b)) same = false;
        }
      }
      current = std::move(next);
      ++rewrites;
    }
    if (down) ++monotone;
    if (same) ++preserved;
  }
  double secs = seconds_since(t0);
  bool pass = agree == kOracleCorpora && monotone == kOracleCorpora && preserved == kOracleCorpora &&
              violations == 0 && secs < kCompressSeconds;
  report("4", "compression oracle", pass,
         fmt("oracle agreement %d/%d, %d rewrites, cost decreasing %d/%d, semantics kept %d/%d, %zu bound "
             "violations, %.1fs",
             agree, kOracleCorpora, rewrites, monotone, kOracleCorpora, preserved, kOracleCorpora, violations, secs));
}

void criterion_enumeration() {
  const Type request{{BaseType::Str}, BaseType::Str};
  std::mt19937_64 rng(15);
  std::vector<Term> sample;
  for (int k = 0; k < 20; ++k) sample.push_back(testing::random_chain(rng, 3));
  Library fitted = fit_grammar(Library::initial(), sample);
  Library learned = Library::initial();
  learned.add_abstraction(to_abstraction(parse_pattern("(simplify (rrotate #0 1) 0)"), "f0", 1));
  learned.add_abstraction(to_abstraction(parse_pattern("(sub (swap #0 #1) 2)"), "f1", 1));
  learned = fit_grammar(learned, sample);
  SearchBudget budget;
  budget.max_expansions = 5000000;
  budget.timeout_secs = 600;
  int good = 0;
  Library uniform = Library::initial();
  std::vector<const Library*> grammars = {&uniform, &fitted, &learned};
  std::string detail;
  for (const Library* lib : grammars) {
    auto a = enumerate(*lib, request, budget, kEnumerated);
    auto b = enumerate(*lib, request, budget, kEnumerated);
    bool ordered = a.size() == kEnumerated;
    for (std::size_t i = 1; ordered && i < a.size(); ++i) ordered = a[i].log_prior <= a[i - 1].log_prior;
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].program == b[i].program;
    if (ordered && same) ++good;
    detail += fmt("%zu%s ", a.size(), ordered && same ? "" : "!");
  }
  report("5", "enumeration order", good == 3, fmt("3 grammars, %d ordered and reproducible, counts %s", good,
                                                  detail.c_str()));
}

struct Run {
  TrainResult result;
  fs::path dir;
};

Run train_once(const GeneratedCorpus& corpus, const fs::path& dir, int jobs) {
  fs::remove_all(dir);
  TrainConfig config;
  config.iterations = kIterations;
  config.solve.budget.max_expansions = kBudget;
  config.solve.budget.timeout_secs = 600;
  config.seed = kCorpusSeed;
  config.jobs = jobs;
  config.out = dir;
  return {run_training_loop(corpus.train, corpus.test, config), dir};
}

double mean_f(const std::vector<TaskOutcome>& wake, const std::set<std::string>& ids) {
  double sum = 0;
  for (const auto& o : wake) {
    if (ids.count(o.task_id)) sum += static_cast<double>(o.f_dedup);
  }
  return ids.empty() ? 0.0 : sum / static_cast<double>(ids.size());
}

std::set<std::string> solved_ids(const std::vector<TaskOutcome>& wake) {
  std::set<std::string> out;
  for (const auto& o : wake) {
    if (o.solved) out.insert(o.task_id);
  }
  return out;
}

void criterion_end_to_end(const GeneratedCorpus& corpus, const Run& run) {
  const auto& its = run.result.iterations;
  if (its.size() != static_cast<std::size_t>(kIterations)) {
    report("6", "end to end", false, "training stopped early");
    return;
  }
  const auto& last = its.back();
  double train_acc = static_cast<double>(last.train_solved) / static_cast<double>(corpus.train.size());
  double test_acc = static_cast<double>(last.test_solved) / static_cast<double>(corpus.test.size());
  std::size_t reuse = 0;
  std::string top;
  for (const auto& [name, n] : abstraction_usage(run.result)) {
    if (n > reuse) {
      reuse = n;
      top = name;
    }
  }
  std::set<std::string> both;
  auto first = solved_ids(its.front().wake);
  for (const auto& id : solved_ids(last.wake)) {
    if (first.count(id)) both.insert(id);
  }
  double f1 = mean_f(its.front().wake, both), f5 = mean_f(last.wake, both);
  report("6a", "train accuracy", train_acc >= kMinTrainAccuracy,
         fmt("%zu/%zu = %.3f (need %.2f)", last.train_solved, corpus.train.size(), train_acc, kMinTrainAccuracy));
  report("6b", "held-out accuracy", test_acc >= kMinTestAccuracy,
         fmt("%zu/%zu = %.3f (need %.2f)", last.test_solved, corpus.test.size(), test_acc, kMinTestAccuracy));
  report("6c", "abstraction reuse", reuse >= kMinReuse,
         fmt("%s used by %zu programs, %zu abstractions learned", top.c_str(), reuse,
             run.result.library.abstractions().size()));
  report("6d", "trace length", !both.empty() && f5 <= f1,
         fmt("mean de-duplicated f over %zu tasks: %.3f at iteration 1, %.3f at iteration %d", both.size(), f1, f5,
             kIterations));
}

void criterion_generalization(const GeneratedCorpus& corpus, const Run& run) {
  std::mt19937_64 rng(17);
  int tried = 0, solved = 0;
  std::size_t programs = 0;
  for (const Task& t : corpus.train) {
    auto it = run.result.frontier.find(t.id);
    if (it == run.result.frontier.end()) continue;
    ++programs;
    const Shape& shape = shape_by_id(shape_of_template(t.template_id));
    for (int k = 0; k < kReinstantiations; ++k) {
      Task fresh = random_instance(shape, rng, "g", t.template_id);
      ++tried;
      auto out = try_evaluate(it->second, fresh.input);
      if (out && check_solved(*out) == fresh.goal) ++solved;
    }
  }
  report("7", "template generalization", programs > 0 && solved == tried,
         fmt("%zu programs x %d instances: %d/%d solved", programs, kReinstantiations, solved, tried));
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) out[entry.path().filename().string()] = read_file(entry.path());
  }
  return out;
}

void criterion_determinism(const GeneratedCorpus& corpus, const Run& first) {
  Run second = train_once(corpus, fs::temp_directory_path() / "mathsynth_acceptance_b", 2);
  auto a = snapshot(first.dir), b = snapshot(second.dir);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) ++differing;
  }
  report("8", "determinism", a.size() == b.size() && !a.empty() && differing == 0,
         fmt("%zu files compared across 1 and 2 workers, %zu differ", a.size(), differing));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  auto t0 = Clock::now();
  criterion_soundness();
  criterion_laws();
  criterion_metric();
  criterion_compression();
  criterion_enumeration();
  GeneratedCorpus corpus = generate_corpus(kCorpusSeed, kTemplates, {}, kTrainFraction);
  Run run = train_once(corpus, fs::temp_directory_path() / "mathsynth_acceptance_a", 1);
  criterion_end_to_end(corpus, run);
  criterion_generalization(corpus, run);
  criterion_determinism(corpus, run);
  std::printf("%s (%d failing, %.0fs)\n", failures == 0 ? "ALL PASS" : "SOME FAIL", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
