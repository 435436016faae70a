#include <splitkit/engine.hpp>
#include <splitkit/operators.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace splitkit;

namespace {

Vec gaussian(Index n, std::mt19937_64& g) {
    std::normal_distribution<double> d;
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = d(g);
    return v;
}

}  // namespace

static void BM_HaugazeauCombine(benchmark::State& state) {
    std::mt19937_64 g(1);
    const Index n = state.range(0);
    Vec x = gaussian(n, g), y = gaussian(n, g), z = gaussian(n, g);
    y += 2.0 * (y - x);
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(haugazeau_combine(x, y, z));
        } catch (const EmptyIntersectionError&) {
        }
    }
}
BENCHMARK(BM_HaugazeauCombine)->Arg(8)->Arg(64)->Arg(1024);

static void BM_HalfspaceProjection(benchmark::State& state) {
    std::mt19937_64 g(2);
    const Index n = state.range(0);
    HalfSpace H{gaussian(n, g), 0.5};
    Vec x = gaussian(n, g);
    for (auto _ : state) benchmark::DoNotOptimize(project_onto_halfspace(x, H));
}
BENCHMARK(BM_HalfspaceProjection)->Arg(8)->Arg(1024);

static void BM_L1Prox(benchmark::State& state) {
    std::mt19937_64 g(3);
    const Index n = state.range(0);
    ProxAtom f = ProxAtom::l1(0.3, n);
    Vec x = gaussian(n, g);
    for (auto _ : state) benchmark::DoNotOptimize(f.prox(1.0, x));
}
BENCHMARK(BM_L1Prox)->Arg(64)->Arg(4096);
