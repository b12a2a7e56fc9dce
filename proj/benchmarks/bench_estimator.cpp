#include <benchmark/benchmark.h>

#include <sdi/estimator.hpp>
#include <sdi/synth.hpp>

using namespace sdi;

static void BM_FitPermittivity(benchmark::State& state)
{
    NoiseModel noise;
    noise.seed = 3;
    const auto data = generate_dataset(ComplexPermittivity(2.6, 0.1), 0.4, 40, 1e-4, 79e9, noise);
    for (auto _ : state) benchmark::DoNotOptimize(fit_permittivity(data));
}
BENCHMARK(BM_FitPermittivity)->Unit(benchmark::kMillisecond);

static void BM_Sweep(benchmark::State& state)
{
    NoiseModel noise;
    noise.seed = 79;
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep({{2.6, 0.1}}, noise, 20));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
