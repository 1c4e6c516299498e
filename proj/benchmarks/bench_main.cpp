#include "kubo/bloch.hpp"
#include "kubo/ed.hpp"
#include "kubo/linear_response.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace kubo;

static void BM_HaldaneEvaluation(benchmark::State& state) {
  const BlochHamiltonian h = haldane_bloch(1.0, 0.1, std::numbers::pi / 2, 0.0);
  Vec2 k(0.1, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(h(k));
    k.x() += 1e-3;
  }
}
BENCHMARK(BM_HaldaneEvaluation);

static void BM_CurrentVertex(benchmark::State& state) {
  const BlochHamiltonian h = graphene_bloch(1.0);
  const Vec2 k(0.4, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(h.current_vertex(k, 1));
}
BENCHMARK(BM_CurrentVertex);

static void BM_KuboMesh(benchmark::State& state) {
  const BlochHamiltonian h = haldane_bloch(1.0, 0.1, std::numbers::pi / 2, 0.0);
  const BZMesh mesh = bz_mesh(build_honeycomb(1), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kubo_correlator_free(h, 0.0, kInfiniteBeta, mesh, {1e-2}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(mesh.size()));
}
BENCHMARK(BM_KuboMesh)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_FhsChern(benchmark::State& state) {
  const BlochHamiltonian h = haldane_bloch(1.0, 0.1, std::numbers::pi / 2, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(fhs_chern(h, 0.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FhsChern)->Arg(24)->Arg(48);

static void BM_HaldaneED(benchmark::State& state) {
  const BlochHamiltonian h = haldane_bloch(1.0, 0.1, std::numbers::pi / 2, 0.0);
  const LatticeModel m = build_gapped_ed(h, honeycomb_bond_kernel(), 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize(m));
}
BENCHMARK(BM_HaldaneED)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
