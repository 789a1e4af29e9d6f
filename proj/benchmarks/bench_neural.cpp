#include <benchmark/benchmark.h>

#include "hrrpnet/neural/layers.hpp"
#include "hrrpnet/neural/models.hpp"
#include "hrrpnet/pipeline/train.hpp"

using namespace hrrpnet;
using neural::Tensor;

namespace {

Tensor<float> noise(const neural::Shape& s, std::uint64_t seed) {
    numerics::Prng prng(seed, 0);
    Tensor<float> t(s);
    for (auto& v : t.data) v = static_cast<float>(prng.normal());
    return t;
}

}  // namespace

// Shapes of the classifier's second stage: 32 channels over 256 samples.
static void BM_ConvForward(benchmark::State& state) {
    neural::Conv1d<float> conv(32, 32, 3, 1, 1, false);
    numerics::Prng prng(1, 0);
    conv.init(prng);
    const auto x = noise({static_cast<std::size_t>(state.range(0)), 32, 256}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_ConvForward)->Arg(1)->Arg(64);

static void BM_ConvBackward(benchmark::State& state) {
    neural::Conv1d<float> conv(32, 32, 3, 1, 1, false);
    numerics::Prng prng(1, 0);
    conv.init(prng);
    const auto x = noise({static_cast<std::size_t>(state.range(0)), 32, 256}, 3);
    const auto y = conv.forward(x);
    const auto g = noise(y.shape, 4);
    for (auto _ : state) benchmark::DoNotOptimize(conv.backward(g));
}
BENCHMARK(BM_ConvBackward)->Arg(1)->Arg(64);

static void BM_NetworkStep(benchmark::State& state) {
    const bool cfa = state.range(0) != 0;
    neural::Network<float> net(
        pipeline::network_config_for(cfa ? pipeline::Mode::Cfa : pipeline::Mode::None, 6, radar_sim::RadarParams{}));
    net.init(1);
    net.set_training(true);
    const std::size_t batch = 64;
    const auto x = noise({batch, 2, 1024}, 5);
    std::vector<int> labels(batch);
    for (std::size_t i = 0; i < batch; ++i) labels[i] = static_cast<int>(i % 6);
    for (auto _ : state) {
        net.zero_grad();
        Tensor<float> d;
        const auto logits = net.forward(x);
        benchmark::DoNotOptimize(neural::softmax_cross_entropy(logits, labels, &d));
        benchmark::DoNotOptimize(net.backward(d));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(batch));
}
BENCHMARK(BM_NetworkStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
