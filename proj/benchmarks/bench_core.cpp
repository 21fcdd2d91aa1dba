#include <benchmark/benchmark.h>

#include "semlife/bench.hpp"
#include "semlife/discovery.hpp"
#include "semlife/simulator.hpp"

using namespace semlife;

namespace {

Mask random_mask(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, rng.uniform() < 0.3);
  return m;
}

void BM_DistanceField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mask m = random_mask(n, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(distance_field(m));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_DistanceField)->Arg(64)->Arg(128)->Arg(256);

void BM_LabelComponents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mask m = random_mask(n, n, 11);
  for (auto _ : state) benchmark::DoNotOptimize(label_components(m, Connectivity::Four));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_LabelComponents)->Arg(64)->Arg(256);

void BM_OverlapAreas(benchmark::State& state) {
  const GridFrame frame{64, 64, 1.0, {0.0, 0.0}};
  const Polygon a{{{3.5, 4.0}, {50.0, 6.5}, {44.0, 55.0}, {8.0, 40.0}}};
  const Polygon b{{{10.0, 10.0}, {60.0, 12.0}, {58.0, 60.0}, {12.0, 58.0}}};
  for (auto _ : state) benchmark::DoNotOptimize(overlap_areas(a, b, frame));
}
BENCHMARK(BM_OverlapAreas);

void scenario_bench(benchmark::State& state, Scenario (*make)(std::uint64_t), Arm arm) {
  const Scenario sc = make(1);
  const SimResult sim = simulate_mission(sc.home, sc.script);
  const Config cfg;
  for (auto _ : state) {
    Resolved r = resolve_conflicts(sc.prev, sim.grid, sim.motion, cfg, arm);
    benchmark::DoNotOptimize(discover(sc.prev, r.candidate, cfg, &r.trace.tracked));
  }
}
BENCHMARK_CAPTURE(scenario_bench, jitter_full, scenario_jitter, Arm::Full)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(scenario_bench, gap_meta_occ, [](std::uint64_t s) { return scenario_wall_gap(s, 4); },
                  Arm::MetaOccupancy)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(scenario_bench, passage_full, scenario_new_passage, Arm::Full)->Unit(benchmark::kMillisecond);

void BM_SmallCorpus(benchmark::State& state) {
  CorpusSpec spec;
  spec.homes = 2;
  spec.missions_per_home = 5;
  const Corpus corpus = build_corpus(spec);
  for (auto _ : state) benchmark::DoNotOptimize(run_benchmark(corpus, {Arm::Full}, Config{}));
}
BENCHMARK(BM_SmallCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
