#include <random>

#include <benchmark/benchmark.h>

#include "mathsynth/compression.hpp"
#include "mathsynth/enumerator.hpp"
#include "mathsynth/primitives.hpp"
#include "mathsynth/solver.hpp"
#include "support.hpp"

using namespace mathsynth;

static void BM_ApplyPrimitive(benchmark::State& state) {
  Equation e = parse_prefix("(= (+ (+ 2 (* 3 x)) (* 5 x)) 17)");
  for (auto _ : state) {
    for (Prim p : kEquationPrims) {
      for (std::size_t i = 0; i < e.size(); ++i) benchmark::DoNotOptimize(try_apply_primitive(p, e, i));
    }
  }
}
BENCHMARK(BM_ApplyPrimitive);

static void BM_Simplify(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<Equation> pool;
  for (int k = 0; k < 64; ++k) pool.push_back(testing::random_equation(rng, 4));
  for (auto _ : state) {
    for (const Equation& e : pool) benchmark::DoNotOptimize(try_apply_primitive(Prim::Simplify, e, 0));
  }
}
BENCHMARK(BM_Simplify);

static void BM_Enumerate(benchmark::State& state) {
  const Type request{{BaseType::Str}, BaseType::Str};
  Library lib = Library::initial();
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(lib, request, {}, state.range(0)));
}
BENCHMARK(BM_Enumerate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SolveLinear(benchmark::State& state) {
  Task t{"t", "ax", parse_prefix("(= (* 5 x) 3)"), Rational(3, 5)};
  Library lib = Library::initial();
  SolveOptions opt;
  opt.budget.max_expansions = 600000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_task(t, lib, opt));
}
BENCHMARK(BM_SolveLinear)->Unit(benchmark::kMillisecond);

static void BM_Compress(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<CorpusEntry> corpus;
  for (int k = 0; k < state.range(0); ++k) corpus.push_back({"p" + std::to_string(k), testing::random_chain(rng, 6)});
  CompressOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(compress(corpus, opt));
}
BENCHMARK(BM_Compress)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
