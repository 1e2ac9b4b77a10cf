#include "mdens/fit.hpp"
#include "mdens/montecarlo.hpp"

#include <benchmark/benchmark.h>

using namespace mdens;

namespace {

std::vector<double> series(SetupId id, std::size_t n) {
    const auto m = setup_model(id);
    RngStream r(kShippedSeed, 1);
    return simulate(m.spec, m.theta, n, 1000, r).x;
}

void BM_Filter(benchmark::State& state) {
    const auto m = setup_model(SetupId::ArGarchGauss);
    const auto x = series(SetupId::ArGarchGauss, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(filter(m.spec, m.theta, x));
}
BENCHMARK(BM_Filter)->Arg(200)->Arg(2000);

void BM_FitArma(benchmark::State& state) {
    const auto x = series(SetupId::ArT5, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_arma(x, 1, 0));
}
BENCHMARK(BM_FitArma)->Arg(100)->Arg(2000);

void BM_FitGarch(benchmark::State& state) {
    const auto x = series(SetupId::GarchT5, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_garch(x, 1, 1));
}
BENCHMARK(BM_FitGarch)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FitArmaGarch(benchmark::State& state) {
    const auto x = series(SetupId::ArGarchGauss, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_arma_garch(x, 1, 0, 1, 1));
}
BENCHMARK(BM_FitArmaGarch)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
