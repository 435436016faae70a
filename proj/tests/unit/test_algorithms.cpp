#include "support.hpp"

#include <doctest.h>

using namespace splitkit;
using splitkit::testing::Rng;

namespace {

LoopConfig quiet(int max_iter = 5000, double tol = 1e-10) {
    LoopConfig c;
    c.max_iter = max_iter;
    c.tol = tol;
    c.timing = false;
    return c;
}

Vec cat(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

}  // namespace

TEST_CASE("interval instance: 0 ∈ N_[0,1]x + (x − 2) gives x = 1") {
    ProblemInstance P = gen_problem("interval_1d", {{"c", 2.0}});
    TwoOperatorView w = two_operator_view(P);
    CHECK(oracle_solve(P).primal(0) == doctest::Approx(1.0));
    // A = N_[0,1], B + C = x − 2 as a single cocoercive term through FB
    RunResult r = run_forward_backward(w.A, w.C, Schedule::constant(1.0), quiet(), Vec::Constant(1, -4.0));
    CHECK(r.trace.status == RunStatus::Converged);
    CHECK(r.pd.x(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("driver parameter bands") {
    ProblemInstance P = gen_problem("lasso", {{"n", 6}}, 3);
    TwoOperatorView w = two_operator_view(P);
    const double a = *w.B.cocoercivity();
    Vec x0 = Vec::Zero(6);
    CHECK_THROWS_AS(run_forward_backward(w.A, w.B, Schedule::constant(2.0 * a), quiet(), x0), ParameterError);
    CHECK_THROWS_AS(run_euler(w.B, Schedule::constant(2.0 * a), quiet(), x0), ParameterError);
    CHECK_THROWS_AS(run_davis_yin(w.A, w.A, w.B, 2.0 * a, quiet(), x0), ParameterError);
    CHECK_THROWS_AS(run_tseng_fbf(w.B, w.A, Schedule::constant(0.1), quiet(), x0), ParameterError);
    CHECK_THROWS_AS(run_tseng_fbf(w.A, w.B.with_lipschitz(1.0 / a), Schedule::constant(1.0 / a), quiet(), x0),
                    ParameterError);
    CHECK_THROWS_AS(run_averaged_iteration([](const Vec& x) { return x; }, 1.0, quiet(), x0), ParameterError);
    CHECK_THROWS_AS(run_douglas_rachford(w.A, w.A, 1.0, quiet(), Vec::Zero(5)), DimensionError);

    LoopConfig strong = quiet();
    strong.mode = EngineMode::Haugazeau;
    CHECK_THROWS_AS(run_douglas_rachford(w.A, w.A, 1.0, strong, x0, true), ParameterError);
    strong.relaxation = Schedule::constant(1.5);
    CHECK_THROWS_AS(run_proximal_point(w.A, Schedule::constant(1.0), strong, Vec::Ones(6)), ParameterError);
}

TEST_CASE("davis-yin relaxation band is (0, 2 − γ/(2τ))") {
    ProblemInstance P = gen_problem("lasso", {{"n", 6}}, 4);
    TwoOperatorView w = two_operator_view(P);
    const double tau = *w.B.cocoercivity();
    LoopConfig c = quiet();
    c.relaxation = Schedule::constant(1.6);  // 2 − γ/(2τ) = 1.5 for γ = τ
    OperatorSpec Id0 = OperatorSpec::zero(6);
    CHECK_THROWS_AS(run_davis_yin(w.A, Id0, w.B, tau, c, Vec::Zero(6)), ParameterError);
    c.relaxation = Schedule::constant(1.4);
    RunResult r = run_davis_yin(w.A, Id0, w.B, tau, c, Vec::Zero(6));
    CHECK((r.pd.x - oracle_solve(P).primal).norm() < 1e-7);
}

TEST_CASE("lasso through several drivers agrees with sign enumeration") {
    ProblemInstance P = gen_problem("lasso", {{"n", 6}}, 5);
    TwoOperatorView w = two_operator_view(P);
    Vec xs = oracle_solve(P).primal;
    const double a = *w.B.cocoercivity();
    Vec x0 = Vec::Zero(6);
    CHECK((run_forward_backward(w.A, w.B, Schedule::constant(a), quiet(), x0).pd.x - xs).norm() < 1e-7);
    CHECK((run_tseng_fbf(w.A, w.B.with_lipschitz(1.0 / a), Schedule::constant(0.5 * a), quiet(), x0).pd.x - xs)
              .norm() < 1e-7);
    CHECK((run_douglas_rachford(w.A, w.B, 1.0, quiet(), x0).pd.x - xs).norm() < 1e-7);
    CHECK((run_fbhf(w.A, w.B, OperatorSpec(), Schedule::constant(a), quiet(), x0).pd.x - xs).norm() < 1e-7);
    const LinOp L(P.mat("L"));
    OperatorSpec proj = OperatorSpec::prox(ProxAtom::zero(6));
    RunResult lw = run_projected_landweber(proj, L, P.vec("y"), Schedule::constant(a), quiet(20000, 1e-12), x0);
    // without the l1 term the limit is a least-squares solution
    CHECK((P.mat("L").transpose() * (P.mat("L") * lw.pd.x - P.vec("y"))).norm() < 1e-8);
}

TEST_CASE("peaceman-rachford on a strongly monotone pair") {
    Rng R(14);
    Mat S1 = R.monotone(3, 1.0, 0), S2 = R.monotone(3, 1.0, 0);
    Vec b1 = R.vec(3), b2 = R.vec(3);
    OperatorSpec A = OperatorSpec::affine(S1, b1), B = OperatorSpec::affine(S2, b2);
    Vec xs = (S1 + S2).partialPivLu().solve(-(b1 + b2));
    RunResult r = run_douglas_rachford(A, B, 1.0, quiet(), Vec::Zero(3), true);
    CHECK((r.pd.x - xs).norm() < 1e-7);
}

TEST_CASE("embeddings vanish at primal-dual solutions") {
    ProblemInstance P = gen_problem("composite", {{"n", 3}, {"g", 2}}, 6);
    TwoOperatorView w = two_operator_view(P);
    OracleSolution o = oracle_solve(P);
    Embedding kt = build_embedding(Embedding::Kind::KuhnTucker, {w.A}, {w.B}, {w.L});
    CHECK(kt.layout.total_dim() == 5);
    CHECK(embedding_residual(kt, cat(o.primal, o.dual)) < 1e-9);
    CHECK(embedding_residual(kt, cat(Vec(o.primal + Vec::Constant(3, 0.1)), o.dual)) > 1e-3);
    CHECK(kt.recover(cat(o.primal, o.dual)) == o.primal);

    Embedding sd = build_embedding(Embedding::Kind::Saddle, {w.A}, {w.B}, {w.L});
    Vec z(7);
    z << o.primal, w.L.apply(o.primal), o.dual;
    CHECK(embedding_residual(sd, z) < 1e-9);

    CHECK(parse_embedding_kind("product_dual") == Embedding::Kind::ProductDual);
    CHECK_THROWS_AS(parse_embedding_kind("other"), ParameterError);
    CHECK_THROWS_AS(build_embedding(Embedding::Kind::KuhnTucker, {w.A}, {w.B}, {}), DimensionError);
    Embedding pd = build_embedding(Embedding::Kind::ProductDual, {w.A}, {w.B}, {w.L});
    CHECK_THROWS_AS(embedding_residual(pd, Vec::Zero(5)), ParameterError);
}

TEST_CASE("spingarn product-space partial inverse solves a sum") {
    // 0 ∈ A x + B₁ x + B₂ x with three affine monotone terms
    Rng R(15);
    std::vector<Mat> S{R.monotone(3, 0.2), R.monotone(3, 0.2), R.monotone(3, 0.2)};
    std::vector<Vec> b{R.vec(3), R.vec(3), R.vec(3)};
    Vec xs = (S[0] + S[1] + S[2]).partialPivLu().solve(-(b[0] + b[1] + b[2]));
    OperatorSpec A = OperatorSpec::affine(S[0], b[0]);
    std::vector<OperatorSpec> Bs{OperatorSpec::affine(S[1], b[1]), OperatorSpec::affine(S[2], b[2])};
    RunResult r = run_partial_inverse_composite(A, Bs, {LinOp::identity(3), LinOp::identity(3)}, quiet(20000, 1e-11),
                                                Vec::Zero(3));
    CHECK((r.pd.x - xs).norm() < 1e-7);
}

TEST_CASE("chambolle-pock and condat-vu reject steps outside their bands") {
    ProblemInstance P = gen_problem("composite", {{"n", 3}, {"g", 2}}, 7);
    TwoOperatorView w = two_operator_view(P);
    const double nl = spectral_norm(w.L);
    CHECK_THROWS_AS(chambolle_pock_problem(w.A, w.B, w.L, 1.0 / nl, 1.0 / nl), ParameterError);
    CHECK_NOTHROW(chambolle_pock_problem(w.A, w.B, w.L, 0.9 / nl, 0.9 / nl));
    OperatorSpec C = OperatorSpec::affine(P.mat("P1")).with_cocoercivity(1e-3);
    CHECK_THROWS_AS(condat_vu_problem(w.A, C, {CondatVuTerm{w.B, OperatorSpec(), w.L, 0.5 / nl}}, 0.5 / nl),
                    ParameterError);
}

TEST_CASE("primal-dual presets reach the KKT point of the composite instance") {
    ProblemInstance P = gen_problem("composite", {{"n", 3}, {"g", 2}}, 8);
    TwoOperatorView w = two_operator_view(P);
    OracleSolution o = oracle_solve(P);
    const double nl = spectral_norm(w.L);
    Vec x0 = Vec::Zero(3), y0 = Vec::Zero(2);
    LoopConfig c = quiet(20000, 1e-11);

    RunResult cp = run_chambolle_pock(w.A, w.B, w.L, 0.9 / nl, 0.9 / nl, c, x0, y0);
    CHECK((cp.pd.x - o.primal).norm() < 1e-7);
    CHECK((cp.pd.y_star - o.dual).norm() < 1e-7);

    RunResult fs = run_fbf_monotone_skew(w.A, w.B, w.L, Schedule::constant(0.5 / nl), c, x0, y0);
    CHECK((fs.pd.x - o.primal).norm() < 1e-7);

    // z = x + L*Q(Lx) with A = 0, ρ = 1
    Vec z = Vec::Ones(3);
    OperatorSpec Q = OperatorSpec::affine(P.mat("Q1"));
    RunResult df = run_dual_fb(OperatorSpec::prox(ProxAtom::zero(3)), 1.0, z, {DualFBTerm{Q, OperatorSpec(), w.L}},
                               Schedule::constant(1.0 / (nl * nl)), c, y0);
    Mat Lm = w.L.matrix();
    Vec xd = (Mat::Identity(3, 3) + Lm.transpose() * P.mat("Q1") * Lm).partialPivLu().solve(z);
    CHECK((df.pd.x - xd).norm() < 1e-7);

    RunResult ps = run_fbf_parallel_sum(w.A, OperatorSpec(), {ParallelSumTerm{w.B, OperatorSpec(), w.L}},
                                        Schedule::constant(0.5 / nl), c, x0, y0);
    CHECK((ps.pd.x - o.primal).norm() < 1e-7);
}

TEST_CASE("backward-backward solves the Yosida-regularized inclusion") {
    Rng R(17);
    OperatorSpec A = OperatorSpec::affine(R.monotone(3, 0.5), R.vec(3));
    OperatorSpec B = OperatorSpec::affine(R.monotone(3, 0.1), R.vec(3));
    RunResult r = run_backward_backward(A, B, 1.0, Schedule::constant(1.0), quiet(20000, 1e-12), Vec::Zero(3));
    CHECK((A.forward(r.pd.x) + yosida_eval(B, 1.0, r.pd.x)).norm() < 1e-7);
}

TEST_CASE("barycentric dykstra projects onto an intersection of half-spaces") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ProblemInstance P = gen_problem("halfspaces", {{"n", 3}, {"m", 3}}, seed);
        RunResult r = run_barycentric_dykstra(halfspace_view(P), P.vec("z"), quiet(50000, 1e-11));
        CHECK((r.pd.x - oracle_solve(P).primal).norm() < 1e-6);
    }
}

TEST_CASE("resolvent composition keeps the iterates in V") {
    Rng R(16);
    Mat Lm = R.mat(2, 3);
    Lm /= 1.05 * spectral_norm(LinOp(Lm));
    Subspace V = Subspace::span(R.mat(3, 2));
    OperatorSpec B = OperatorSpec::affine(R.monotone(2, 0.1), R.vec(2));
    LoopConfig c = quiet(200, 0.0);
    c.record_iterates = true;
    RunResult r = run_resolvent_composition(B, LinOp(Lm), V, 1.0, c, V.proj(R.vec(3)));
    for (const Vec& x : r.trace.iterates) CHECK(V.proj_perp(x).norm() < 1e-12);
    CHECK_THROWS_AS(run_resolvent_composition(B, LinOp(Mat(3.0 * Lm)), V, 1.0, c, V.proj(R.vec(3))), ParameterError);
    CHECK_THROWS_AS(run_resolvent_composition(B, LinOp(Lm), V, 1.0, c, Vec::Ones(3)), ParameterError);
}
