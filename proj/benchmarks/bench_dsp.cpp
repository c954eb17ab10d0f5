#include "scald/aecsim.hpp"
#include "scald/analysis.hpp"
#include "scald/decorrelators.hpp"
#include "scald/fft.hpp"
#include "scald/psynoise.hpp"
#include "scald/signals.hpp"
#include "scald/wola.hpp"

#include <benchmark/benchmark.h>

using namespace scald;

namespace {

void BM_ScalProcess(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = white_noise(n, 1, 0.5f);
    ScalConfig cfg;
    cfg.seed = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(scal_process(cfg, x));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ScalProcess)->Arg(44100)->Arg(441000)->Unit(benchmark::kMillisecond);

void BM_WolaIdentity(benchmark::State& state) {
    const auto x = white_noise(44032, 3, 0.5f);
    WindowSpec spec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wola_identity(spec, x));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_WolaIdentity)->Unit(benchmark::kMillisecond);

void BM_FirstOrderAllpass(benchmark::State& state) {
    const auto x = white_noise(441000, 4, 0.5f);
    AllpassBaselineConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(first_order_allpass_process(cfg, x));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_FirstOrderAllpass)->Unit(benchmark::kMillisecond);

void BM_NoiseInjection(benchmark::State& state) {
    const auto x = pink_noise(44032, 5, 0.25f);
    NoiseInjectorConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(inject_noise(cfg, x, 44100));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_NoiseInjection)->Unit(benchmark::kMillisecond);

void BM_Coherence(benchmark::State& state) {
    const auto a = white_noise(44100 * 4, 6, 0.5f);
    const auto b = white_noise(44100 * 4, 7, 0.5f);
    for (auto _ : state) {
        benchmark::DoNotOptimize(coherence(a, b, 4096, 80, 44100));
    }
}
BENCHMARK(BM_Coherence)->Unit(benchmark::kMillisecond);

void BM_MdfBlock(benchmark::State& state) {
    MdfConfig cfg;
    cfg.filter_length = static_cast<int>(state.range(0));
    cfg.block_size = 256;
    StereoMdf mdf(cfg, 2);
    const auto far_l = white_noise(256, 8, 0.25f);
    const auto far_r = white_noise(256, 9, 0.25f);
    const auto mic = white_noise(256, 10, 0.25f);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mdf.step({far_l, far_r}, mic));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 256);
}
BENCHMARK(BM_MdfBlock)->Arg(1024)->Arg(8192)->Unit(benchmark::kMicrosecond);

void BM_Fft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<std::complex<double>> buf(n);
    Rng rng(11);
    for (auto& v : buf) v = {rng.uniform(-1.0, 1.0), 0.0};
    for (auto _ : state) {
        fft(buf);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_Fft)->Arg(512)->Arg(4096)->Arg(16384)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
