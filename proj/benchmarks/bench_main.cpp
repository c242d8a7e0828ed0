#include <benchmark/benchmark.h>

#include <cmath>

#include "csbp/analytics.hpp"
#include "csbp/conditioning.hpp"
#include "csbp/decorate.hpp"
#include "csbp/metric.hpp"
#include "csbp/samplers.hpp"
#include "csbp/skeleton.hpp"
#include "csbp/tree.hpp"

using namespace csbp;

static void BM_Transition(benchmark::State& st) {
  ModelParams p{1, 0.5, 0};
  RandomStream rs(1);
  for (auto _ : st) benchmark::DoNotOptimize(samplers::sample_transition(p, 2.0, 1.0, rs));
}
BENCHMARK(BM_Transition);

static void BM_ZalphaExact(benchmark::State& st) {
  ModelParams p{1, 0.5, static_cast<double>(st.range(0))};
  RandomStream rs(2);
  for (auto _ : st) benchmark::DoNotOptimize(samplers::sample_Zalpha_exact(p, 1.0, rs).value);
}
BENCHMARK(BM_ZalphaExact)->Arg(1)->Arg(5);

static void BM_ZalphaEuler(benchmark::State& st) {
  ModelParams p{1, 0, 1};
  RandomStream rs(3);
  for (auto _ : st) benchmark::DoNotOptimize(samplers::sample_Zalpha_euler(p, 1.0, 1e-3, rs).value);
}
BENCHMARK(BM_ZalphaEuler);

static void BM_Kesten(benchmark::State& st) {
  ModelParams p{1, 0.3, 0};
  RandomStream rs(4);
  for (auto _ : st) benchmark::DoNotOptimize(decorate::sample_kesten_Zs(p, 1.0, rs));
}
BENCHMARK(BM_Kesten);

static void BM_BiasedLaplaceQuadrature(benchmark::State& st) {
  ModelParams p{1, 0.5, 2};
  for (auto _ : st) {
    double v = quad::integrate_halfline_log([&](double z) {
      return analytics::log_martingale_M(p, 1.0, z) - 1.0 * z +
             std::log(analytics::c_t(p, 1.0) * analytics::c_tilde_t(p, 1.0)) - analytics::c_tilde_t(p, 1.0) * z;
    });
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_BiasedLaplaceQuadrature);

static void BM_ConditionalAt(benchmark::State& st) {
  ModelParams p{1, 0, 0};
  double t = static_cast<double>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(conditioning::conditional_laplace_At(p, 1.0, 1.0, t - 1.0, t * t));
}
BENCHMARK(BM_ConditionalAt)->Arg(10)->Arg(200);

static void BM_SampleTn(benchmark::State& st) {
  HeightDensity d = HeightDensity::uniform(1.0);
  RandomStream rs(5);
  for (auto _ : st) benchmark::DoNotOptimize(skeleton::sample_Tn(static_cast<int>(st.range(0)), d, 1.0, rs).size());
}
BENCHMARK(BM_SampleTn)->Arg(2)->Arg(5);

static PointedTree bench_tree(std::uint64_t seed, int n, int maxv) {
  tree::RandomTreeSpec s;
  s.n_pointed = n;
  s.max_vertices = maxv;
  RandomStream rs(seed);
  return tree::random_tree(s, rs);
}

static void BM_SplitGraft(benchmark::State& st) {
  PointedTree t = bench_tree(6, 4, 40);
  for (auto _ : st) {
    auto comps = tree::split_n(t);
    for (std::size_t i = 1; i < comps.size(); ++i) comps[i] = tree::spine_marked(comps[i]);
    benchmark::DoNotOptimize(tree::graft_n(tree::code_L(t), comps).size());
  }
}
BENCHMARK(BM_SplitGraft);

static void BM_Canonical(benchmark::State& st) {
  PointedTree t = bench_tree(7, 4, 40);
  for (auto _ : st) benchmark::DoNotOptimize(tree::canonical_string(t));
}
BENCHMARK(BM_Canonical);

static void BM_GhBounds(benchmark::State& st) {
  PointedTree a = bench_tree(8, 3, 12), b = bench_tree(9, 3, 12);
  for (auto _ : st) {
    benchmark::DoNotOptimize(metric::gh_lower(a, b));
    benchmark::DoNotOptimize(metric::gh_upper(a, b));
  }
}
BENCHMARK(BM_GhBounds);

static void BM_GhExactSmall(benchmark::State& st) {
  PointedTree a = PointedTree::segment(1.0), b = PointedTree::segment(1.4);
  a.set_pointed({0, 1});
  b.set_pointed({0, 1});
  a.add_child(0, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(metric::gh_exact_small(a, b, 0.35).upper);
}
BENCHMARK(BM_GhExactSmall);
BENCHMARK_MAIN();
