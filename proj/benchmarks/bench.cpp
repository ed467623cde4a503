#include <benchmark/benchmark.h>

#include "andor/analysis.hpp"
#include "andor/aosearch.hpp"
#include "andor/elimination.hpp"
#include "andor/gen.hpp"

using namespace andor;

namespace {

Model bundled(const std::string& name, int n = 0) {
  GenSpec spec;
  spec.name = name;
  spec.n = n;
  spec.uniform = true;
  return parse_model(gen_model_text(spec));
}

Ordering recommended(const std::string& name, const Model& m) {
  return Ordering::of(gen_recommended_ordering(name, m.var_count()));
}

}  // namespace

static void BM_VeFig4(benchmark::State& state) {
  Model m = bundled("fig4");
  Ordering d = recommended("fig4", m);
  for (auto _ : state) {
    RunReport rep = run_ve(m, d, Task::SumProduct);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(BM_VeFig4);

static void BM_AoDfFig4(benchmark::State& state) {
  Model m = bundled("fig4");
  Ordering d = recommended("fig4", m);
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, d));
  for (auto _ : state) {
    RunReport rep = ao_df(m, t, Task::SumProduct);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(BM_AoDfFig4);

static void BM_VeEx33(benchmark::State& state) {
  Model m = bundled("ex33", int(state.range(0)));
  Ordering d = Ordering::identity(m.var_count());
  for (auto _ : state) {
    RunReport rep = run_ve(m, d, Task::SumProduct);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(BM_VeEx33)->Arg(9)->Arg(12);

static void BM_AoDfEx33(benchmark::State& state) {
  Model m = bundled("ex33", int(state.range(0)));
  Ordering d = Ordering::identity(m.var_count());
  PseudoTree t = pseudo_tree_of(build_bucket_tree(m, d));
  for (auto _ : state) {
    RunReport rep = ao_df(m, t, Task::SumProduct);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(BM_AoDfEx33)->Arg(9)->Arg(12);

static void BM_BruteForceEx34(benchmark::State& state) {
  Model m = bundled("ex34");
  for (auto _ : state) {
    double v = brute_force_value(m, Task::Count);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_BruteForceEx34);

BENCHMARK_MAIN();
