#include <benchmark/benchmark.h>

#include "hrrpnet/pipeline/config.hpp"
#include "hrrpnet/pipeline/dataset.hpp"

using namespace hrrpnet;

// One sample: target echoes, jamming, motion compensation and stitching at
// every configured SJR level.
static void BM_GenerateSample(benchmark::State& state) {
    auto cfg = pipeline::default_config();
    cfg.dataset.sjr_db.clear();
    for (long i = 0; i < state.range(0); ++i) cfg.dataset.sjr_db.push_back(-30.0 - 10.0 * static_cast<double>(i));
    std::size_t index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pipeline::generate_sample(cfg, 1, index % 6, index));
        ++index;
    }
}
BENCHMARK(BM_GenerateSample)->Arg(1)->Arg(4);

static void BM_SimulateCpi(benchmark::State& state) {
    const radar_sim::RadarParams p;
    numerics::Prng prng(1, 0);
    const auto target = scene::sample_instance(scene::builtin_classes()[5], prng);
    const auto sched = radar_sim::make_schedule(p, prng, radar_sim::HopMode::Random);
    for (auto _ : state) benchmark::DoNotOptimize(radar_sim::simulate_cpi(target, p, sched, {3000.0, 120.0}, prng));
}
BENCHMARK(BM_SimulateCpi);
