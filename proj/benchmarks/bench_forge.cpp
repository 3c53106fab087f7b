#include <benchmark/benchmark.h>

#include "forge/blowup.hpp"
#include "forge/embed.hpp"
#include "forge/expansion.hpp"
#include "forge/generator.hpp"
#include "forge/power_embed.hpp"
#include "forge/pseudorandom.hpp"
#include "forge/ramsey.hpp"
#include "forge/rng.hpp"
#include "forge/tree.hpp"

using namespace forge;

namespace {

void BM_SampleGnp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_gnp(n, 3.0 / n, seed++));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SampleGnp)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_StripShortCycles(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Graph g = sample_gnp(n, 9.0 / n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(strip_short_cycles(g, 6));
  state.SetComplexityN(n);
}
BENCHMARK(BM_StripShortCycles)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);

void BM_GeneratePn(benchmark::State& state) {
  const PnParams p{Rational(3), Rational(12), Rational(3), Rational(2), Rational(2), static_cast<int>(state.range(0))};
  GenOptions go;
  go.desk = true;
  go.jumbled = CheckMode::sampled(100, 0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_pn(p, seed++, go));
}
BENCHMARK(BM_GeneratePn)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BijumbledExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Graph g = sample_gnp(n, 0.4, 7);
  for (auto _ : state) benchmark::DoNotOptimize(is_bijumbled(g, Rational(2, 5), Rational(2), CheckMode::exact(16)));
}
BENCHMARK(BM_BijumbledExact)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);

void BM_BijumbledSampled(benchmark::State& state) {
  const Graph g = sample_gnp(3000, 0.003, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(is_bijumbled(g, Rational(3, 1000), Rational(30), CheckMode::sampled(state.range(0), 1)));
}
BENCHMARK(BM_BijumbledSampled)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const DecompParams params{Rational(1), Rational(1), 2, Rational(1, 2), 3};
  const Graph g = sample_gnp(static_cast<int>(state.range(0)), 0.3, 3);
  DecompOptions opt;
  opt.mode = ExpansionMode::exact();
  for (auto _ : state) benchmark::DoNotOptimize(decompose_alternatives(g, params, opt));
}
BENCHMARK(BM_Decompose)->DenseRange(12, 16, 2)->Unit(benchmark::kMillisecond);

void BM_LrBlowup(benchmark::State& state) {
  const Graph base = sample_gnp(500, 0.01, 5);
  const int ell = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lr_blowup(base, ell, 2, Placement::seeded(9)));
}
BENCHMARK(BM_LrBlowup)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EmbedTree(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Graph host = sample_gnp(20 * n, 10.0 / (2 * n), 11);
  const RootedTree tree = random_bounded_degree_tree(n, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(embed_tree(tree, host));
}
BENCHMARK(BM_EmbedTree)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_PowerViaBlowup(benchmark::State& state) {
  const RootedTree tree = random_bounded_degree_tree(static_cast<int>(state.range(0)), 2, 2);
  const AuxTree a = auxiliary_tree(tree, 2);
  const int r0 = static_cast<int>(power_embed_r0(a.delta(), 2));
  const Graph j = a.aux.as_graph();
  Embedding id;
  for (int i = 0; i < j.order(); ++i) id.map.push_back(i);
  const BlowUp b = lr_blowup(j, r0, r0, Placement::seeded(3));
  for (auto _ : state) benchmark::DoNotOptimize(embed_power_via_blowup(a, j, id, b.graph, b.map));
}
BENCHMARK(BM_PowerViaBlowup)->Arg(30)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_PipelineDesk(benchmark::State& state) {
  ConstantOverrides o;
  o[1] = {{"ell", Rational(3)}, {"a", Rational(3)}, {"c", Rational(3)}, {"theta", Rational(2)}, {"b", Rational(12)}};
  o[2] = {{"t", Rational(8)}, {"r0", Rational(4)}, {"ell", Rational(16)}, {"a", Rational(8)},
          {"c", Rational(3)}, {"theta", Rational(3)}, {"b", Rational(20)}, {"r", Rational(3)}};
  const ConstantSet cs = derive_constants(1, 2, 2, o);
  const RootedTree tree = random_bounded_degree_tree(4, 2, 1);
  const PnParams p{Rational(8), Rational(20), Rational(3), Rational(16), Rational(3), 4};
  GenOptions go;
  go.desk = true;
  const Graph g = generate_pn(p, 1, go).graph;
  EngineOptions eo;
  eo.desk = true;
  const BlowUp host = level_host(g, 3, 16);
  const Coloring chi = adversary_coloring(Adversary::kAllOneColor, host, 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(tree, 1, cs, g, chi, 5, eo));
}
BENCHMARK(BM_PipelineDesk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
