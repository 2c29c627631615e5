#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "reldiff/green.hpp"
#include "reldiff/hermite.hpp"
#include "reldiff/solver.hpp"
#include "reldiff/spectrum.hpp"
#include "reldiff/synth.hpp"

using namespace reldiff;

namespace {

GridSpec grid_for(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(1));
  return GridSpec{dim, static_cast<std::size_t>(state.range(0)), 256.0};
}

void BM_GreenHat(benchmark::State& state) {
  const ModelParams p(1, 0.7, 1.5);
  double l = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_hat(p, 1.0, l));
    l += 1e-3;
  }
}
BENCHMARK(BM_GreenHat);

void BM_Synthesize(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const auto sd = SpectralDensity::normalized(g.dim, 0.5, BFamily::exponential);
  const auto spec = lattice_spectrum(sd, g);
  std::uint32_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_gaussian_field(spec, g, {1, r++, 0}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.total()));
}
BENCHMARK(BM_Synthesize)->Args({1 << 12, 1})->Args({1 << 16, 1})->Args({256, 2})->Unit(benchmark::kMicrosecond);

void BM_Subordinate(benchmark::State& state) {
  const GridSpec g{1, std::size_t{1} << 16, 256.0};
  const auto sd = SpectralDensity::normalized(1, 1.0, BFamily::exponential);
  const auto zeta = sample_gaussian_field(sd, g, {1, 0, 0});
  const auto sub = Subordinator::build(SubordinatorFamily::exp_clipped(1.0, 3.0));
  const int n0 = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(subordinate_truncated(sub.coeffs(), sub.rank(), n0, zeta.values));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.total()));
}
BENCHMARK(BM_Subordinate)->Arg(2)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_Solve(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const auto sd = SpectralDensity::normalized(g.dim, 1.0, BFamily::exponential);
  const auto u0 = sample_gaussian_field(sd, g, {1, 0, 0});
  const ModelParams p(g.dim, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve(u0, p, 1.0));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.total()));
}
BENCHMARK(BM_Solve)->Args({1 << 12, 1})->Args({1 << 16, 1})->Args({256, 2})->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
