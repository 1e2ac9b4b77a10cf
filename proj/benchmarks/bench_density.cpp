#include "mdens/density.hpp"
#include "mdens/montecarlo.hpp"

#include <benchmark/benchmark.h>

using namespace mdens;

namespace {

FilterOutput garch_filter(std::size_t n) {
    const auto m = setup_model(SetupId::GarchT5);
    RngStream r(kShippedSeed, 0);
    return filter(m.spec, m.theta, simulate(m.spec, m.theta, n, 1000, r).x);
}

void BM_ResidualNaive(benchmark::State& state) {
    const auto f = garch_filter(static_cast<std::size_t>(state.range(0)));
    const DensityQuery q{default_grid(), {}, 0.3};
    for (auto _ : state) benchmark::DoNotOptimize(residual_density(f, q));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResidualNaive)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_ResidualFast(benchmark::State& state) {
    const auto f = garch_filter(static_cast<std::size_t>(state.range(0)));
    const DensityQuery q{default_grid(), {}, 0.3};
    for (auto _ : state) benchmark::DoNotOptimize(residual_density_fast(f, q));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResidualFast)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_ParzenRosenblatt(benchmark::State& state) {
    const auto f = garch_filter(static_cast<std::size_t>(state.range(0)));
    const DensityQuery q{default_grid(), {}, 0.3};
    for (auto _ : state) benchmark::DoNotOptimize(parzen_rosenblatt(f.resid, q));
}
BENCHMARK(BM_ParzenRosenblatt)->Arg(2048);

}  // namespace
