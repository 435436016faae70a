#include <splitkit/problems.hpp>
#include <splitkit/projective.hpp>

#include <benchmark/benchmark.h>

using namespace splitkit;

namespace {

LoopConfig fixed_iterations(int n) {
    LoopConfig c;
    c.max_iter = n;
    c.tol = 0.0;
    c.timing = false;
    return c;
}

}  // namespace

static void BM_ForwardBackwardLasso(benchmark::State& state) {
    ProblemInstance P = gen_problem("lasso", {{"n", 8}}, 1);
    TwoOperatorView w = two_operator_view(P);
    const double a = *w.B.cocoercivity();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            run_forward_backward(w.A, w.B, Schedule::constant(a), fixed_iterations(200), Vec::Zero(8)));
}
BENCHMARK(BM_ForwardBackwardLasso);

static void BM_DouglasRachfordLasso(benchmark::State& state) {
    ProblemInstance P = gen_problem("lasso", {{"n", 8}}, 1);
    TwoOperatorView w = two_operator_view(P);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_douglas_rachford(w.A, w.B, 1.0, fixed_iterations(200), Vec::Zero(8)));
}
BENCHMARK(BM_DouglasRachfordLasso);

static void BM_BlockKT(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    ProblemInstance P = gen_problem("composite", {{"m", m}, {"p", m}, {"n", 3}, {"g", 2}}, 2);
    KTProblem K = kt_view(P);
    BlockSchedule s = make_block_schedule(BlockScheduleKind::RandomWithCover, m, m, m, 2, 3, 400);
    KTParams par{std::vector<Schedule>(m, Schedule::constant(1.0)), std::vector<Schedule>(m, Schedule::constant(1.0))};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            run_block_kt_projective(K, s, par, fixed_iterations(200), Vec::Zero(3 * m), Vec::Zero(2 * m)));
}
BENCHMARK(BM_BlockKT)->Arg(1)->Arg(2)->Arg(4);
