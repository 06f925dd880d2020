#include <benchmark/benchmark.h>

#include "ptbranch/perturbation.hpp"
#include "ptbranch/spectral.hpp"

namespace {

ptbranch::CouplerGeometry geometry(double delta_alpha) {
  ptbranch::CouplerGeometry g;
  g.delta_alpha = delta_alpha;
  return g;
}

void BM_Assemble(benchmark::State& state) {
  const ptbranch::SineBasis basis{90.0, static_cast<int>(state.range(0))};
  const auto g = geometry(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(ptbranch::coupler_hamiltonian(g, basis));
}
BENCHMARK(BM_Assemble)->Arg(150)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_Eigenvalues(benchmark::State& state) {
  const ptbranch::SineBasis basis{90.0, static_cast<int>(state.range(0))};
  const auto h = ptbranch::coupler_hamiltonian(geometry(4.0), basis);
  for (auto _ : state) benchmark::DoNotOptimize(ptbranch::eigenvalues_complex_symmetric(h));
}
BENCHMARK(BM_Eigenvalues)->Arg(150)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_EigenvaluesAndVectors(benchmark::State& state) {
  const ptbranch::SineBasis basis{90.0, static_cast<int>(state.range(0))};
  const auto h = ptbranch::coupler_hamiltonian(geometry(4.0), basis);
  for (auto _ : state) benchmark::DoNotOptimize(ptbranch::eig_complex_symmetric(h));
}
BENCHMARK(BM_EigenvaluesAndVectors)->Arg(150)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_RsExpand(benchmark::State& state) {
  const ptbranch::SineBasis basis{90.0, static_cast<int>(state.range(0))};
  const auto split = ptbranch::split_coupler_hamiltonian(geometry(0.0), basis);
  for (auto _ : state) benchmark::DoNotOptimize(ptbranch::rs_expand(split, 1, 60));
}
BENCHMARK(BM_RsExpand)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
