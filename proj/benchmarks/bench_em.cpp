#include <benchmark/benchmark.h>

#include <sdi/em.hpp>

using namespace sdi;

static void BM_EffectiveReflection(benchmark::State& state)
{
    const ComplexPermittivity eps(2.6, 0.1);
    const SlabGeometry geom(0.02, 0.25, MetalBacking{});
    for (auto _ : state) benchmark::DoNotOptimize(effective_reflection(eps, geom, 79e9));
}
BENCHMARK(BM_EffectiveReflection);

static void BM_TruncatedSeries(benchmark::State& state)
{
    const ComplexPermittivity eps(2.6, 0.1);
    const SlabGeometry geom(0.02, 0.25, MetalBacking{});
    const auto q = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(effective_reflection_truncated(eps, geom, 79e9, q));
}
BENCHMARK(BM_TruncatedSeries)->Arg(2)->Arg(64);

BENCHMARK_MAIN();
