#include <benchmark/benchmark.h>

#include "hrrpnet/numerics.hpp"

using namespace hrrpnet;

static void BM_Fft(benchmark::State& state) {
    numerics::Prng prng(1, 0);
    const auto x = numerics::gaussian_complex(prng, static_cast<std::size_t>(state.range(0)), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(numerics::fft(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(64, 4096);

static void BM_Periodogram(benchmark::State& state) {
    numerics::Prng prng(2, 0);
    std::vector<numerics::ComplexVec> segs;
    for (int i = 0; i < state.range(0); ++i) segs.push_back(numerics::gaussian_complex(prng, 1024, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(numerics::periodogram_psd(segs, 781.25e3));
}
BENCHMARK(BM_Periodogram)->Arg(32)->Arg(256);
