#include <benchmark/benchmark.h>

#include <sdi/fmcw.hpp>

#include <vector>

using namespace sdi;

static void BM_Dft(benchmark::State& state)
{
    std::vector<Complex> x(static_cast<std::size_t>(state.range(0)));
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::polar(1.0, 0.3 * static_cast<double>(n));
    for (auto _ : state) benchmark::DoNotOptimize(dft(x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dft)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void BM_ExtractGamma(benchmark::State& state)
{
    const auto cfg = ChirpConfig::wideband();
    const std::vector<EchoComponent> mut{{Complex(-0.24, 0.05), 2.0 * 0.25 / 299792458.0}};
    const std::vector<EchoComponent> metal{{Complex(-1.0, 0.0), 2.0 * 0.25 / 299792458.0}};
    const auto a = synth_if_trace(cfg, mut);
    const auto b = synth_if_trace(cfg, metal);
    for (auto _ : state) benchmark::DoNotOptimize(extract_gamma(a, b));
}
BENCHMARK(BM_ExtractGamma);

BENCHMARK_MAIN();
