// Acceptance suite: one PASS/FAIL line per criterion. Usage: splitkit_acceptance [criterion...]
#include "support.hpp"

#include <splitkit/problems.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef SPLITKIT_CLI_PATH
#error "SPLITKIT_CLI_PATH must name the splitkit executable"
#endif

using namespace splitkit;
using splitkit::testing::Rng;
using splitkit::testing::fejer_drift;
using splitkit::testing::max_step_gap;
using splitkit::testing::range_projector;

namespace {

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "" : "FAILED ") + what);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LoopConfig quiet(int max_iter, double tol, bool record = false) {
    LoopConfig c;
    c.max_iter = max_iter;
    c.tol = tol;
    c.record_iterates = record;
    c.timing = false;
    return c;
}

Vec cat(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

double lambda_max_sym(const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
    return es.eigenvalues().maxCoeff();
}

// ---------------------------------------------------------------- 1. resolvent identities

// An atom together with an independent closed form of prox_{f*/γ}.
struct AtomCase {
    ProxAtom f;
    std::function<Vec(double, const Vec&)> conj;
};

Vec clip(const Vec& u, const Vec& lo, const Vec& hi) { return u.cwiseMax(lo).cwiseMin(hi); }

AtomCase random_atom(int kind, Rng& R) {
    const Index n = R.integer(1, 5);
    switch (kind) {
        case 0: {
            Vec a = R.vec(n);
            if (a.norm() < 0.2) a(0) += 1.0;
            double b = R.gauss();
            return {ProxAtom::halfspace(a, b), [a, b](double g, const Vec& u) {
                        double t = std::max(0.0, (a.dot(u) - b / g) / a.squaredNorm());
                        return Vec(t * a);
                    }};
        }
        case 1: {
            Vec lo(n), hi(n);
            for (Index j = 0; j < n; ++j) {
                lo(j) = R.gauss();
                hi(j) = lo(j) + R.unif(0.0, 2.0);
                if (R.unif(0, 1) < 0.2) lo(j) = -std::numeric_limits<double>::infinity();
                if (R.unif(0, 1) < 0.2) hi(j) = std::numeric_limits<double>::infinity();
            }
            return {ProxAtom::box(lo, hi), [lo, hi](double g, const Vec& u) {
                        Vec y = Vec::Zero(u.size());
                        for (Index j = 0; j < u.size(); ++j) {
                            if (u(j) > hi(j) / g) y(j) = u(j) - hi(j) / g;
                            else if (u(j) < lo(j) / g) y(j) = u(j) - lo(j) / g;
                        }
                        return y;
                    }};
        }
        case 2: {
            const Index nn = std::max<Index>(n, 2);
            const Index k = R.integer(1, static_cast<int>(nn) - 1);
            Mat A = R.mat(k, nn);
            Vec b = A * R.vec(nn);
            Vec xp = Eigen::CompleteOrthogonalDecomposition<Mat>(A).solve(b);
            Mat PR = range_projector(Mat(A.transpose()));
            return {ProxAtom::affine(A, b), [xp, PR](double g, const Vec& u) { return Vec(PR * (u - xp / g)); }};
        }
        case 3: {
            Vec c = R.vec(n);
            double r = R.unif(0.1, 2.0);
            return {ProxAtom::ball(c, r), [c, r](double g, const Vec& u) {
                        Vec v = u - c / g;
                        double nv = v.norm();
                        return nv <= r / g ? Vec(Vec::Zero(u.size())) : Vec((1.0 - (r / g) / nv) * v);
                    }};
        }
        case 4: {
            double w = R.unif(0.05, 2.0);
            return {ProxAtom::l1(w, n), [w, n](double, const Vec& u) {
                        return clip(u, Vec::Constant(n, -w), Vec::Constant(n, w));
                    }};
        }
        case 5: {
            Mat Q = R.spd(n);
            Vec b = R.vec(n);
            return {ProxAtom::quadratic(Q, b), [Q, b, n](double g, const Vec& u) {
                        Mat K = g * Q + Mat::Identity(n, n);
                        return Vec(K.partialPivLu().solve(g * Q * u - b));
                    }};
        }
        case 6: {
            Vec lo = R.vec(n), hi = lo + Vec::Constant(n, 0.0);
            for (Index j = 0; j < n; ++j) hi(j) += R.unif(0.0, 2.0);
            return {ProxAtom::support_of_box(lo, hi), [lo, hi](double, const Vec& u) { return clip(u, lo, hi); }};
        }
        case 7:
            return {ProxAtom::zero(n), [n](double, const Vec&) { return Vec(Vec::Zero(n)); }};
        default: {
            Vec c = R.vec(n);
            return {ProxAtom::linear(c), [c](double, const Vec&) { return c; }};
        }
    }
}

// A spec with an independent J_{gM⁻¹} and an independent graph-membership test.
struct SpecCase {
    std::string name;
    OperatorSpec M;
    std::function<Vec(double, const Vec&)> inv_res;                 // J_{gM⁻¹}
    std::function<double(const Vec&, const Vec&)> graph_gap;        // dist of (a, a*) from gra M
};

SpecCase affine_case(const std::string& name, const Mat& S, const Vec& b, OperatorSpec M) {
    const Index n = S.rows();
    SpecCase c{name, std::move(M), nullptr, nullptr};
    c.inv_res = [S, b, n](double g, const Vec& u) {
        Vec w = (S + g * Mat::Identity(n, n)).partialPivLu().solve(u - b);
        return Vec(S * w + b);
    };
    c.graph_gap = [S, b](const Vec& a, const Vec& as) { return (as - (S * a + b)).cwiseAbs().maxCoeff(); };
    return c;
}

SpecCase atom_case(const std::string& name, const AtomCase& a) {
    SpecCase c{name, OperatorSpec::prox(a.f), nullptr, nullptr};
    auto conj = a.conj;
    c.inv_res = [conj](double g, const Vec& u) { return conj(1.0 / g, u); };
    // a* ∈ ∂f(a) ⇔ a* = prox_{f*}(a + a*).
    c.graph_gap = [conj](const Vec& v, const Vec& vs) { return (vs - conj(1.0, Vec(v + vs))).cwiseAbs().maxCoeff(); };
    return c;
}

SpecCase random_spec(int kind, Rng& R) {
    static const char* atom_names[] = {"halfspace", "box", "affine", "ball", "l1",
                                       "quadratic", "support_of_box", "zero", "linear"};
    if (kind < 9) return atom_case(atom_names[kind], random_atom(kind, R));
    const Index n = R.integer(1, 5);
    if (kind == 9) {
        Mat S = R.monotone(n, R.unif(0, 1) < 0.5 ? 0.0 : 0.1, R.integer(0, static_cast<int>(n)));
        Vec b = R.vec(n);
        return affine_case("affine", S, b, OperatorSpec::affine(S, b));
    }
    if (kind == 10) {
        Mat K = R.mat(n, n);
        Mat S = K - K.transpose();
        return affine_case("skew", S, Vec::Zero(n), OperatorSpec::skew(S));
    }
    if (kind == 11) {
        Mat S = R.monotone(n, 0.1);
        Vec b = R.vec(n);
        double c = R.scale(0.2, 5.0);
        return affine_case("scaled", c * S, c * b, OperatorSpec::scaled(c, OperatorSpec::affine(S, b)));
    }
    // product of an affine factor and an atom
    Mat S = R.monotone(n, 0.1);
    Vec b = R.vec(n);
    AtomCase at = random_atom(R.integer(0, 8), R);
    SpecCase f1 = affine_case("", S, b, OperatorSpec::affine(S, b));
    SpecCase f2 = atom_case("", at);
    const Index n2 = at.f.dim();
    SpecCase c{"product", OperatorSpec::product({f1.M, f2.M}), nullptr, nullptr};
    c.inv_res = [f1, f2, n, n2](double g, const Vec& u) {
        return cat(f1.inv_res(g, u.head(n)), f2.inv_res(g, u.tail(n2)));
    };
    c.graph_gap = [f1, f2, n, n2](const Vec& a, const Vec& as) {
        return std::max(f1.graph_gap(a.head(n), as.head(n)), f2.graph_gap(a.tail(n2), as.tail(n2)));
    };
    return c;
}

Verdict criterion_resolvent_identities() {
    Verdict v;
    const int probes = 1000;
    const double tol = 1e-10;
    auto t0 = std::chrono::steady_clock::now();
    Rng R(1001);

    double moreau = 0.0;
    for (int kind = 0; kind < 9; ++kind)
        for (int t = 0; t < probes; ++t) {
            AtomCase a = random_atom(kind, R);
            double g = R.scale(0.1, 10.0);
            Vec x = R.vec(a.f.dim(), 3.0);
            Vec lhs = a.f.prox(g, x) + g * a.conj(g, Vec(x / g));
            moreau = std::max(moreau, (x - lhs).cwiseAbs().maxCoeff());
            moreau = std::max(moreau, (moreau_conjugate_prox(a.f, g, x) - a.conj(g, Vec(x / g))).cwiseAbs().maxCoeff());
        }
    v.check(moreau <= tol, "Moreau decomposition max error " + num(moreau) + " over 9 atoms x 1000 probes");

    double inv = 0.0, yos = 0.0, yos_eval = 0.0, pinv = 0.0, pinv_graph = 0.0;
    for (int kind = 0; kind < 13; ++kind)
        for (int t = 0; t < probes; ++t) {
            SpecCase c = random_spec(kind, R);
            const Index n = c.M.dim();
            double g = R.scale(0.1, 10.0);
            Vec x = R.vec(n, 3.0), y = R.vec(n, 3.0);

            // x − J_{γM}x = γ J_{γ⁻¹M⁻¹}(x/γ)
            Vec ref = c.inv_res(1.0 / g, Vec(x / g));
            inv = std::max(inv, (x - resolvent_eval(c.M, g, x) - g * ref).cwiseAbs().maxCoeff());
            inv = std::max(inv, (inverse_resolvent_eval(c.M, 1.0 / g, Vec(x / g)) - ref).cwiseAbs().maxCoeff());
            inv = std::max(inv, (OperatorSpec::inverse(c.M).resolvent(1.0 / g, Vec(x / g)) - ref).cwiseAbs().maxCoeff());

            // ^γM is γ-cocoercive
            Vec yx = yosida_eval(c.M, g, x), yy = yosida_eval(c.M, g, y);
            yos = std::max(yos, g * (yx - yy).squaredNorm() - (x - y).dot(yx - yy));
            OperatorSpec Y = OperatorSpec::yosida(c.M, g);
            yos_eval = std::max(yos_eval, (Y.forward(x) - yx).cwiseAbs().maxCoeff());

            // J_{M_V}x = P_V J_M x + P_{V⊥}(x − J_M x), and the result lies in gra M_V
            const int k = R.integer(0, static_cast<int>(n));
            Mat B = R.mat(n, k);
            Mat PV = k == 0 ? Mat(Mat::Zero(n, n)) : range_projector(B);
            Mat Pp = Mat::Identity(n, n) - PV;
            Subspace V = k == 0 ? Subspace::trivial(n) : Subspace::span(B);
            Vec j = resolvent_eval(c.M, 1.0, x);
            Vec expect = PV * j + Pp * (x - j);
            Vec u1 = partial_inverse_resolvent(c.M, V, x);
            Vec u2 = OperatorSpec::partial_inverse(c.M, V).resolvent(1.0, x);
            pinv = std::max({pinv, (u1 - expect).cwiseAbs().maxCoeff(), (u2 - expect).cwiseAbs().maxCoeff()});
            Vec us = x - u1;
            pinv_graph = std::max(pinv_graph, c.graph_gap(Vec(PV * u1 + Pp * us), Vec(PV * us + Pp * u1)));
        }
    v.check(inv <= tol, "inverse-resolvent identity max error " + num(inv) + " over 13 specs x 1000 probes");
    v.check(yos <= tol, "Yosida cocoercivity max violation " + num(std::max(yos, 0.0)));
    v.check(yos_eval <= tol, "Yosida spec vs yosida_eval max error " + num(yos_eval));
    v.check(pinv <= tol, "partial-inverse identity max error " + num(pinv));
    v.check(pinv_graph <= tol, "partial-inverse graph membership max error " + num(pinv_graph));
    double secs = seconds_since(t0);
    v.check(secs < 10.0, "runtime " + num(secs) + " s");
    return v;
}

// ---------------------------------------------------------------- 2. geometry

Verdict criterion_geometry() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    Rng R(2002);
    double worst = 0.0;
    int cases = 0;
    for (Index d : {Index(2), Index(5)})
        for (int t = 0; t < 1000; ++t) {
            Vec x = R.vec(d, 2.0), y = R.vec(d, 2.0), z = R.vec(d, 2.0);
            if (t % 50 == 0) y = x;        // H(x,y) is the whole space
            else if (t % 50 == 1) z = y;   // H(y,z) is the whole space
            Mat G(2, d);
            G.row(0) = (x - y).transpose();
            G.row(1) = (y - z).transpose();
            Vec h(2);
            h << y.dot(x - y), z.dot(y - z);
            Vec want = polyhedral_projection(G, h, x);
            Vec got = haugazeau_combine(x, y, z);
            worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
            ++cases;
        }
    v.check(worst <= 1e-9, "max deviation from the active-set oracle " + num(worst) + " over " + std::to_string(cases) +
                               " triples (2-D and 5-D)");

    int empty_hits = 0, empty_cases = 0;
    for (Index d : {Index(2), Index(5)})
        for (int s = 1; s <= 5; ++s) {
            // x − y = −e, y − z = s·e: ρ = 0 and χ = −s‖e‖² < 0
            Vec e = Vec::Zero(d);
            e(0) = 1.0;
            e(d - 1) += s;
            Vec x = Vec::Constant(d, static_cast<double>(s));
            Vec y = x + e;
            Vec z = y - s * e;
            ++empty_cases;
            try {
                haugazeau_combine(x, y, z);
            } catch (const EmptyIntersectionError&) {
                ++empty_hits;
            }
        }
    v.check(empty_hits == empty_cases,
            "empty intersection reported on " + std::to_string(empty_hits) + "/" + std::to_string(empty_cases) +
                " constructed triples");
    double secs = seconds_since(t0);
    v.check(secs < 10.0, "runtime " + num(secs) + " s");
    return v;
}

// ---------------------------------------------------------------- 3. Fejér invariants

struct FejerCase {
    std::string name;
    std::vector<Vec> iterates;
    Vec z;
};

Verdict criterion_fejer() {
    Verdict v;
    const LoopConfig cfg = quiet(500, 0.0, true);
    Rng R(3003);
    std::vector<FejerCase> cases;

    {
        ProblemInstance P = gen_problem("affine_zero", {{"n", 4}, {"r", 4}}, 11);
        OperatorSpec M = two_operator_view(P).A;
        Vec z = oracle_solve(P).primal;
        Vec x0 = R.vec(4, 3.0);
        cases.push_back({"PPA", run_proximal_point(M, Schedule::constant(1.0), cfg, x0).trace.iterates, z});
        auto T = [M](const Vec& x) { return M.resolvent(1.0, x); };
        cases.push_back({"KM", run_averaged_iteration(T, 0.5, cfg, x0).trace.iterates, z});
    }
    {
        ProblemInstance P = gen_problem("affine_zero", {{"n", 4}, {"r", 4}, {"skew", 0}}, 12);
        const Mat& S = P.mat("S");
        double a = 1.0 / lambda_max_sym(S);
        OperatorSpec B = OperatorSpec::affine(S, P.vec("b")).with_cocoercivity(a);
        cases.push_back({"Euler", run_euler(B, Schedule::constant(a), cfg, R.vec(4, 3.0)).trace.iterates,
                         oracle_solve(P).primal});
    }
    {
        // x ∈ V, x* ∈ V⊥, x* = Sx + b; engine state x + x*
        Mat S = R.monotone(4, 0.1);
        Vec b = R.vec(4);
        Mat Bv = R.mat(4, 2);
        Mat Bq = Eigen::HouseholderQR<Mat>(Bv).householderQ() * Mat::Identity(4, 2);
        Vec w = (Bq.transpose() * S * Bq).partialPivLu().solve(-Bq.transpose() * b);
        Vec x = Bq * w;
        Vec xs = S * x + b;
        Subspace V = Subspace::span(Bv);
        Vec r0 = R.vec(4, 3.0);
        cases.push_back({"partial inverse",
                         run_partial_inverse(OperatorSpec::affine(S, b), V, cfg, V.proj(r0), V.proj_perp(r0))
                             .trace.iterates,
                         Vec(x + xs)});
    }
    {
        ProblemInstance P = gen_problem("two_lines", {}, 13);
        TwoOperatorView w = two_operator_view(P);
        cases.push_back({"DR", run_douglas_rachford(w.A, w.B, 1.0, cfg, R.vec(2, 3.0)).trace.iterates,
                         oracle_solve(P).primal});
    }
    {
        // x̄ = 0.2 and y* = x̄ + γ·b* with b* = 1 − 0.2
        ProblemInstance P = gen_problem("interval_1d", {{"u", 0.2}, {"c", 1.0}}, 0);
        TwoOperatorView w = two_operator_view(P);
        const double g = 1.0;
        cases.push_back({"Davis-Yin", run_davis_yin(w.A, w.B, w.C, g, cfg, Vec::Constant(1, -2.0)).trace.iterates,
                         Vec::Constant(1, 0.2 + g * 0.8)});
    }
    {
        ProblemInstance P = gen_problem("lasso", {{"n", 6}}, 1);
        TwoOperatorView w = two_operator_view(P);
        Vec z = oracle_solve(P).primal;
        double beta = 1.0 / *w.B.cocoercivity();
        Vec x0 = R.vec(6, 2.0);
        cases.push_back({"FBF",
                         run_tseng_fbf(w.A, w.B.with_lipschitz(beta), Schedule::constant(0.5 / beta), cfg, x0)
                             .trace.iterates,
                         z});
        cases.push_back({"FB", run_forward_backward(w.A, w.B, Schedule::constant(1.0), cfg, x0).trace.iterates, z});
    }
    {
        ProblemInstance P = gen_problem("bilinear_minimax", {}, 1);
        SaddleProblem S = saddle_view(P);
        Vec z = oracle_solve(P).primal;
        double chi = *S.R.lipschitz();
        OperatorSpec A = OperatorSpec::product({S.primal[0].A, S.primal[1].A});
        Vec x0 = R.vec(z.size(), 2.0);
        cases.push_back({"FBHF",
                         run_fbhf(A, OperatorSpec(), S.R, Schedule::constant(0.5 / chi), cfg, x0).trace.iterates, z});
        SaddleParams par;
        par.sigma = 1.0;
        par.gamma.assign(S.m(), Schedule::constant(0.9 / (chi + par.sigma)));
        BlockSchedule full = make_block_schedule(BlockScheduleKind::Full, S.m(), S.p(), 1, 0);
        cases.push_back({"saddle-projective",
                         run_saddle_projective(S, full, par, cfg, x0, Vec(0), Vec(0), Vec(0)).trace.iterates, z});
    }
    {
        ProblemInstance P = gen_problem("composite", {{"n", 2}, {"g", 2}}, 1);
        TwoOperatorView w = two_operator_view(P);
        OracleSolution o = oracle_solve(P);
        cases.push_back({"KT-projective",
                         run_kt_projective(w.A, w.B, w.L, Schedule::constant(1.0), Schedule::constant(1.0), cfg,
                                           R.vec(2, 2.0), R.vec(2, 2.0))
                             .trace.iterates,
                         cat(o.primal, o.dual)});
    }

    for (const auto& c : cases) {
        double drift = fejer_drift(c.iterates, c.z);
        bool ok = drift <= 1e-9 && c.iterates.size() >= 2;
        v.check(ok, c.name + ": drift " + num(std::max(drift, 0.0)) + " over " + std::to_string(c.iterates.size() - 1) +
                        " steps, final distance " + num((c.iterates.back() - c.z).norm()));
    }
    return v;
}

// ---------------------------------------------------------------- 4. oracle convergence

Verdict criterion_oracle_convergence() {
    Verdict v;
    const LoopConfig cfg = quiet(10000, 1e-9);
    auto report = [&](const std::string& name, const RunResult& r, double problem_res, double dist, double secs) {
        bool ok = r.trace.final_residual() <= 1e-6 && problem_res <= 1e-6 && dist <= 1e-5 && secs < 5.0 &&
                  r.trace.iterations <= 10000;
        v.check(ok, name + ": " + std::to_string(r.trace.iterations) + " it, residual " +
                        num(r.trace.final_residual()) + ", problem residual " + num(problem_res) + ", distance " +
                        num(dist) + ", " + num(secs) + " s");
    };
    auto timed = [](const std::function<RunResult()>& f, double& secs) {
        auto t0 = std::chrono::steady_clock::now();
        RunResult r = f();
        secs = seconds_since(t0);
        return r;
    };
    double secs = 0.0;

    {
        ProblemInstance P = gen_problem("two_lines", {}, 1);
        TwoOperatorView w = two_operator_view(P);
        RunResult r = timed([&] { return run_douglas_rachford(w.A, w.B, 1.0, cfg, Vec::Zero(2)); }, secs);
        report("DR on two lines", r, residual_eval(P, r.pd), (r.pd.x - oracle_solve(P).primal).norm(), secs);
    }
    {
        ProblemInstance P = gen_problem("lasso", {{"n", 6}}, 1);
        TwoOperatorView w = two_operator_view(P);
        RunResult r =
            timed([&] { return run_forward_backward(w.A, w.B, Schedule::constant(1.0), cfg, Vec::Zero(6)); }, secs);
        report("FB on LASSO n=6", r, residual_eval(P, r.pd), (r.pd.x - oracle_solve(P).primal).norm(), secs);
    }
    {
        ProblemInstance P = gen_problem("interval_1d", {{"u", 0.2}, {"c", 1.0}}, 0);
        TwoOperatorView w = two_operator_view(P);
        Vec want = oracle_solve(P).primal;
        RunResult r = timed([&] { return run_davis_yin(w.A, w.B, w.C, 1.0, cfg, Vec::Constant(1, -3.0)); }, secs);
        v.check(std::abs(want(0) - 0.2) <= 1e-12, "interval oracle limit " + num(want(0)));
        report("Davis-Yin on the interval instance", r, residual_eval(P, r.pd), (r.pd.x - want).norm(), secs);
    }
    {
        ProblemInstance P = gen_problem("composite", {{"n", 2}, {"g", 2}}, 1);
        TwoOperatorView w = two_operator_view(P);
        OracleSolution o = oracle_solve(P);
        double nl = estimate_operator_norm(w.L);
        RunResult r = timed(
            [&] {
                return run_fbf_monotone_skew(w.A, w.B, w.L, Schedule::constant(0.5 / nl), cfg, Vec::Zero(2),
                                             Vec::Zero(2));
            },
            secs);
        report("FBF monotone+skew on the 2-D quadratic composite", r, residual_eval(P, r.pd),
               (cat(r.pd.x, r.pd.y_star) - cat(o.primal, o.dual)).norm(), secs);
    }
    {
        // first seed whose z violates both constraints
        ProblemInstance P;
        for (std::uint64_t seed = 1;; ++seed) {
            P = gen_problem("halfspaces", {{"n", 2}, {"m", 2}}, seed);
            if (((P.mat("G") * P.vec("z") - P.vec("h")).array() > 0.0).all()) break;
        }
        RunResult r = timed([&] { return run_barycentric_dykstra(halfspace_view(P), P.vec("z"), cfg); }, secs);
        report("barycentric Dykstra on two half-spaces", r, residual_eval(P, r.pd),
               (r.pd.x - oracle_solve(P).primal).norm(), secs);
    }
    {
        ProblemInstance P = gen_problem("dual_strong", {}, 1);
        const Mat& L = P.mat("L");
        OperatorSpec A = OperatorSpec::affine(P.mat("S_A"), P.vec("a"));
        OperatorSpec B = OperatorSpec::affine(P.mat("S_B"), P.vec("b"));
        double rho = P.param("rho"), nl = spectral_norm(LinOp(L));
        RunResult r = timed(
            [&] {
                return run_dual_fb(A, rho, P.vec("z"), {DualFBTerm{B, OperatorSpec(), LinOp(L)}},
                                   Schedule::constant(rho / (nl * nl)), cfg, Vec::Zero(L.rows()));
            },
            secs);
        report("dual FB on the strongly monotone instance", r, residual_eval(P, r.pd),
               (r.pd.x - oracle_solve(P).primal).norm(), secs);
    }
    {
        ProblemInstance P = gen_problem("composite", {{"n", 2}, {"g", 2}}, 1);
        TwoOperatorView w = two_operator_view(P);
        OracleSolution o = oracle_solve(P);
        RunResult r = timed(
            [&] {
                return run_kt_projective(w.A, w.B, w.L, Schedule::constant(10.0), Schedule::constant(0.1), cfg,
                                         Vec::Zero(2), Vec::Zero(2));
            },
            secs);
        report("KT-projective with γ=10, σ=0.1", r, residual_eval(P, r.pd),
               (cat(r.pd.x, r.pd.y_star) - cat(o.primal, o.dual)).norm(), secs);
    }
    return v;
}

// ---------------------------------------------------------------- 5. strong-mode targets

Verdict criterion_strong_mode() {
    Verdict v;
    Rng R(5005);
    // Haugazeau steps on an affine Z shrink slowly; no iteration budget is pinned here.
    LoopConfig strong = quiet(400000, 1e-13);
    strong.mode = EngineMode::Haugazeau;
    const LoopConfig weak = quiet(10000, 1e-11);

    auto report = [&](const std::string& name, const RunResult& hs, const RunResult& fj, const Vec& proj) {
        double d = (hs.z - proj).norm(), dw = (fj.z - proj).norm();
        v.check(d <= 1e-5 && hs.trace.status != RunStatus::Failed,
                name + ": |x_haugazeau - proj_Z x0| = " + num(d) + " (" + to_string(hs.trace.status) +
                    "), fejer limit at " + num(dw));
    };

    {
        // rank-deficient affine M: Z = {Sx + b = 0}
        ProblemInstance P = gen_problem("affine_zero", {{"n", 5}, {"r", 3}}, 51);
        OperatorSpec M = two_operator_view(P).A;
        Vec x0 = R.vec(5, 2.0);
        Vec proj = affine_projection(P.mat("S"), P.vec("b"), x0);
        report("PPA", run_proximal_point(M, Schedule::constant(10.0), strong, x0),
               run_proximal_point(M, Schedule::constant(10.0), weak, x0), proj);
    }
    {
        // two planes in R³: Fix T_DR = V1 ∩ V2
        Mat E = R.mat(2, 3);
        Vec e = E * R.vec(3);
        OperatorSpec A = OperatorSpec::prox(ProxAtom::affine(E.row(0), e.head(1)));
        OperatorSpec B = OperatorSpec::prox(ProxAtom::affine(E.row(1), e.tail(1)));
        Vec y0 = R.vec(3, 2.0);
        Vec proj = affine_projection(E, -e, y0);
        report("DR", run_douglas_rachford(A, B, 1.0, strong, y0), run_douglas_rachford(A, B, 1.0, weak, y0), proj);
    }
    {
        ProblemInstance P = gen_problem("affine_zero", {{"n", 5}, {"r", 3}}, 52);
        const Mat& S = P.mat("S");
        double beta = spectral_norm(LinOp(S));
        OperatorSpec B = OperatorSpec::affine(S, P.vec("b")).with_lipschitz(beta);
        OperatorSpec A = OperatorSpec::zero(5);
        Vec x0 = R.vec(5, 2.0);
        Vec proj = affine_projection(S, P.vec("b"), x0);
        report("FBF", run_tseng_fbf(A, B, Schedule::constant(0.5 / beta), strong, x0),
               run_tseng_fbf(A, B, Schedule::constant(0.5 / beta), weak, x0), proj);
    }
    {
        // A = N_{Ex=e}, B = ∇ of a rank-deficient quadratic: Z = {Ex = e, N*(Sx + b) = 0}, N a basis of ker E
        const Index n = 5;
        Mat E = R.mat(2, n);
        Mat G = R.mat(2, n);
        Mat S = G.transpose() * G;
        Vec xbar = R.vec(n);
        Vec e = E * xbar;
        Vec b = -S * xbar + E.transpose() * R.vec(2);
        Mat N = Eigen::FullPivLU<Mat>(E).kernel();
        Mat Mz(E.rows() + N.cols(), n);
        Mz << E, N.transpose() * S;
        Vec cz(E.rows() + N.cols());
        cz << -e, N.transpose() * b;
        OperatorSpec A = OperatorSpec::prox(ProxAtom::affine(E, e));
        OperatorSpec Bc = OperatorSpec::affine(S, b).with_cocoercivity(1.0 / lambda_max_sym(S));
        double a = *Bc.cocoercivity();
        Vec x0 = R.vec(n, 2.0);
        Vec proj = affine_projection(Mz, cz, x0);
        // strong mode admits μ ≤ (4α − γ)/(4α)
        LoopConfig s2 = strong, w2 = weak;
        s2.relaxation = w2.relaxation = Schedule::constant(0.5);
        report("FB", run_forward_backward(A, Bc, Schedule::constant(a), s2, x0),
               run_forward_backward(A, Bc, Schedule::constant(a), w2, x0), proj);
    }
    {
        // singular P and Q: the Kuhn–Tucker set is an affine line
        const Index n = 3, g = 2;
        Mat Gp = R.mat(1, n), Gq = R.mat(1, g), L = R.mat(g, n);
        Mat P = Gp.transpose() * Gp, Q = Gq.transpose() * Gq;
        Vec xbar = R.vec(n), ybar = R.vec(g);
        Vec p = P * xbar + L.transpose() * ybar, q = Q * L * xbar - ybar;
        Mat Mz(n + g, n + g);
        Mz << P, L.transpose(), Q * L, -Mat::Identity(g, g);
        Vec cz = -cat(p, q);
        OperatorSpec A = OperatorSpec::affine(P, -p), B = OperatorSpec::affine(Q, -q);
        Vec x0 = R.vec(n, 2.0), ys0 = R.vec(g, 2.0);
        Vec proj = affine_projection(Mz, cz, cat(x0, ys0));
        auto run = [&](const LoopConfig& c) {
            return run_kt_projective(A, B, LinOp(L), Schedule::constant(1.0), Schedule::constant(1.0), c, x0, ys0);
        };
        report("KT-projective", run(strong), run(weak), proj);
    }
    {
        // With affine Z every cut normal is orthogonal to the direction space of Z, so both modes
        // share the limit above. On Z = {x₂ = 1, x₁ + x₂ ≤ 3} the modes separate.
        Vec a(2);
        a << 1.0, 1.0;
        OperatorSpec A = OperatorSpec::prox(ProxAtom::halfspace(a, 3.0));
        Mat S = Mat::Zero(2, 2);
        S(1, 1) = 1.0;
        Vec b(2);
        b << 0.0, -1.0;
        OperatorSpec B = OperatorSpec::affine(S, b).with_cocoercivity(1.0);
        Vec x0(2);
        x0 << 1.5, 6.0;
        Mat G(3, 2);
        G << 0, 1, 0, -1, 1, 1;
        Vec h(3);
        h << 1, -1, 3;
        Vec proj = polyhedral_projection(G, h, x0);
        LoopConfig s2 = strong, w2 = weak;
        s2.relaxation = w2.relaxation = Schedule::constant(0.5);
        RunResult hs = run_forward_backward(A, B, Schedule::constant(0.5), s2, x0);
        RunResult fj = run_forward_backward(A, B, Schedule::constant(0.5), w2, x0);
        double d = (hs.z - proj).norm(), dw = (fj.z - proj).norm();
        v.check(d <= 1e-5 && dw > 1e-3, "FB on a half-line Z: haugazeau at " + num(d) + " from proj_Z x0, fejer limit " +
                                            num(dw) + " away");
        Vec x1(2);
        x1 << 3.0, 6.0;
        Vec proj1 = polyhedral_projection(G, h, x1);
        OperatorSpec Bl = OperatorSpec::affine(S, b).with_lipschitz(1.0);
        RunResult hs1 = run_tseng_fbf(A, Bl, Schedule::constant(0.5), strong, x1);
        RunResult fj1 = run_tseng_fbf(A, Bl, Schedule::constant(0.5), weak, x1);
        double d1 = (hs1.z - proj1).norm(), dw1 = (fj1.z - proj1).norm();
        v.check(d1 <= 1e-5 && dw1 > 1e-3, "FBF on a half-line Z: haugazeau at " + num(d1) +
                                              " from proj_Z x0, fejer limit " + num(dw1) + " away");
    }
    return v;
}

// ---------------------------------------------------------------- 6. equivalences

Vec hand_fbf_step(const OperatorSpec& A, const OperatorSpec& B, double g, const Vec& x) {
    Vec Bx = B.forward(x);
    Vec p = A.resolvent(g, x - g * Bx);
    return p - g * (B.forward(p) - Bx);
}

// Two-operator Kuhn–Tucker projective step written out directly, with
// θ = λ(γ⁻¹‖x − a‖² + σ⁻¹‖Lx − b‖²)/τ.
struct HandKT {
    OperatorSpec A, B;
    Mat L;
    double gamma, sigma, lambda;

    Vec step(const Vec& X) const {
        const Index n = L.cols(), m = L.rows();
        Vec x = X.head(n), ys = X.tail(m);
        Vec a = A.resolvent(gamma, x - gamma * L.transpose() * ys);
        Vec l = L * x;
        Vec b = B.resolvent(sigma, l + sigma * ys);
        Vec ts = (x - a) / gamma + L.transpose() * (l - b) / sigma;
        Vec t = b - L * a;
        double tau = ts.squaredNorm() + t.squaredNorm();
        if (!(tau > 0.0)) return X;
        double theta = lambda * ((x - a).squaredNorm() / gamma + (l - b).squaredNorm() / sigma) / tau;
        return cat(Vec(x - theta * ts), Vec(ys - theta * t));
    }
};

std::vector<Vec> iterate(const std::function<Vec(const Vec&)>& f, const Vec& x0, int steps) {
    std::vector<Vec> out{x0};
    for (int i = 0; i < steps; ++i) out.push_back(f(out.back()));
    return out;
}

Verdict criterion_equivalences() {
    Verdict v;
    const int N = 50;
    const double tol = 1e-10;
    const LoopConfig cfg = quiet(N, 0.0, true);
    Rng R(6006);
    // A run that stops early has reached an exact fixed point; it is held there for the comparison.
    auto pad = [N](std::vector<Vec> xs) {
        while (!xs.empty() && xs.size() < static_cast<std::size_t>(N + 1)) xs.push_back(xs.back());
        return xs;
    };
    auto report = [&](const std::string& name, const std::vector<Vec>& a, const std::vector<Vec>& b, Index head = -1) {
        double gap = max_step_gap(pad(a), pad(b), head);
        bool ok = gap <= tol && a.size() >= 2 && b.size() >= 2;
        std::string steps = std::to_string(a.size() - 1) + "/" + std::to_string(b.size() - 1);
        v.check(ok, name + ": max per-step gap " + num(gap) + " over " + std::to_string(N) + " steps (" + steps +
                        " computed)");
    };

    ProblemInstance comp = gen_problem("composite", {{"n", 3}, {"g", 2}}, 21);
    TwoOperatorView cw = two_operator_view(comp);
    const Mat& Pm = comp.mat("P1");
    const double nl = spectral_norm(cw.L);
    Vec x0 = R.vec(3, 2.0), ys0 = R.vec(2, 2.0), X0 = cat(x0, ys0);

    {
        double tau = 0.9 / nl, sigma = 0.9 / nl;
        KernelProblem kp = chambolle_pock_problem(cw.A, cw.B, cw.L, tau, sigma);
        RunResult a = run_chambolle_pock(cw.A, cw.B, cw.L, tau, sigma, cfg, x0, ys0);
        RunResult b = run_proximal_point(kp.M, Schedule::constant(1.0), cfg, X0, KernelResolvent{kp.kernel.U, {}});
        report("Chambolle-Pock preset = kernel PPA (dense warped resolvent)", a.trace.iterates, b.trace.iterates);
    }
    {
        OperatorSpec A = OperatorSpec::affine(Mat(0.5 * Pm), -comp.vec("p1"));
        double aleph = 2.0 / lambda_max_sym(Pm);
        OperatorSpec C = OperatorSpec::affine(Mat(0.5 * Pm)).with_cocoercivity(aleph);
        double s = 0.5 / (nl + 1.0 / (2.0 * aleph));
        std::vector<CondatVuTerm> terms{CondatVuTerm{cw.B, OperatorSpec(), cw.L, s}};
        KernelProblem kp = condat_vu_problem(A, C, terms, s);
        RunResult a = run_condat_vu(A, C, terms, s, cfg, x0, ys0);
        RunResult b =
            run_forward_backward(kp.M, kp.C, Schedule::constant(1.0), cfg, X0, KernelResolvent{kp.kernel.U, {}});
        report("Condat-Vu preset = kernel FB (dense warped resolvent)", a.trace.iterates, b.trace.iterates);
    }

    ProblemInstance las = gen_problem("lasso", {{"n", 6}}, 22);
    TwoOperatorView lw = two_operator_view(las);
    const Vec y0 = R.vec(6, 2.0);
    {
        LoopConfig c = cfg;
        c.relaxation = Schedule::constant(1.5);
        const double g = 1.0;
        OperatorSpec A = lw.A, B = lw.B;
        auto T = [A, B, g](const Vec& y) {
            Vec x = B.resolvent(g, y);
            return Vec(y + A.resolvent(g, 2.0 * x - y) - x);
        };
        RunResult a = run_douglas_rachford(A, B, g, c, y0);
        RunResult b = run_proximal_point(OperatorSpec::from_resolvent(T, 6), Schedule::constant(1.0), c, y0);
        report("DR = PPA on ((R_A R_B + Id)/2)^-1 - Id", a.trace.iterates, b.trace.iterates);
    }
    {
        Mat Bv = R.mat(6, 3);
        Subspace V = Subspace::span(Bv);
        Vec r0 = R.vec(6, 2.0);
        RunResult a = run_partial_inverse(lw.A, V, cfg, V.proj(r0), V.proj_perp(r0));
        RunResult b = run_douglas_rachford(OperatorSpec::normal_cone(V), lw.A, 1.0, cfg, r0);
        report("partial inverse = DR(N_V, A) under y = x + x*", a.trace.iterates, b.trace.iterates);
    }
    {
        OperatorSpec C0 = OperatorSpec::zero(6).with_cocoercivity(1e6);
        RunResult a = run_davis_yin(lw.A, lw.B, C0, 1.0, cfg, y0);
        RunResult b = run_douglas_rachford(lw.A, lw.B, 1.0, cfg, y0);
        report("Davis-Yin with C = 0 = DR", a.trace.iterates, b.trace.iterates);
    }
    const double alpha = *lw.B.cocoercivity();
    const double beta = 1.0 / alpha;
    {
        OperatorSpec Q = lw.B.with_lipschitz(beta);
        const double g = 0.5 / beta;
        RunResult a = run_fbhf(lw.A, OperatorSpec(), Q, Schedule::constant(g), cfg, y0);
        RunResult b = run_tseng_fbf(lw.A, Q, Schedule::constant(g), cfg, y0);
        report("FBHF with C = 0 = FBF", a.trace.iterates, b.trace.iterates);
        OperatorSpec A = lw.A;
        report("FBHF with C = 0 = hand-coded Tseng recursion", a.trace.iterates,
               iterate([&](const Vec& x) { return hand_fbf_step(A, Q, g, x); }, y0, N));
    }
    {
        const double g = alpha;
        RunResult a = run_fbhf(lw.A, lw.B, OperatorSpec(), Schedule::constant(g), cfg, y0);
        RunResult b = run_forward_backward(lw.A, lw.B, Schedule::constant(g), cfg, y0);
        report("FBHF with Q = 0 = unrelaxed FB", a.trace.iterates, b.trace.iterates);
        OperatorSpec A = lw.A, B = lw.B;
        report("FBHF with Q = 0 = hand-coded x+ = J(x - γBx)", a.trace.iterates,
               iterate([&](const Vec& x) { return Vec(A.resolvent(g, x - g * B.forward(x))); }, y0, N));
    }
    {
        // I = K = {1}, R = 0, L = 0, trivial dual block
        Mat K = R.mat(6, 6);
        Mat Sk = K - K.transpose();
        Sk /= spectral_norm(LinOp(Sk));
        OperatorSpec Q = OperatorSpec::skew(Sk).with_lipschitz(1.0);
        const double g = 0.5;
        SaddleProblem S;
        S.primal = {SaddlePrimalBlock{lw.A, lw.B, Q}};
        S.dual = {SaddleDualBlock{}};
        S.dual[0].Bm = OperatorSpec::zero(2);
        S.L = {{LinOp::zero(2, 6)}};
        SaddleParams par;
        par.sigma = 0.3;
        par.gamma = {Schedule::constant(g)};
        par.mu = {Schedule::constant(1.0)};
        par.rho = {Schedule::constant(1.0)};
        par.sigma_k = {Schedule::constant(1.0)};
        par.fbhf_relaxation = true;
        BlockSchedule full = make_block_schedule(BlockScheduleKind::Full, 1, 1, 1, 0);
        RunResult a = run_saddle_projective(S, full, par, cfg, y0, Vec::Zero(2), Vec::Zero(2), Vec::Zero(2));
        RunResult b = run_fbhf(lw.A, lw.B, Q, Schedule::constant(g), cfg, y0);
        report("saddle projective (degenerate) = FBHF", a.trace.iterates, b.trace.iterates, 6);
    }
    {
        HandKT h{cw.A, cw.B, cw.L.matrix(), 2.0, 0.5, 1.3};
        LoopConfig c = cfg;
        c.relaxation = Schedule::constant(h.lambda);
        KTProblem P{{cw.A}, {cw.B}, {{cw.L}}};
        BlockSchedule full = make_block_schedule(BlockScheduleKind::Full, 1, 1, 1, 0);
        RunResult a = run_block_kt_projective(P, full, KTParams{{Schedule::constant(2.0)}, {Schedule::constant(0.5)}},
                                              c, x0, ys0);
        auto hh = iterate([&](const Vec& X) { return h.step(X); }, X0, N);
        report("block KT (full schedule) = two-operator KT recursion", a.trace.iterates, hh);
    }
    return v;
}

// ---------------------------------------------------------------- 7. asynchrony

BlockSchedule valid_base() {
    BlockSchedule s;
    s.m = 2;
    s.p = 2;
    s.R = 2;
    s.T = 1;
    s.steps.push_back(BlockStep{{0, 1}, {0, 1}, {0, 0}, {0, 0}});
    s.steps.push_back(BlockStep{{0}, {1}, {0}, {1}});
    s.steps.push_back(BlockStep{{1}, {0}, {2}, {1}});
    s.steps.push_back(BlockStep{{0}, {1}, {3}, {2}});
    return s;
}

Verdict criterion_asynchrony() {
    Verdict v;
    ProblemInstance P = gen_problem("composite", {{"m", 2}, {"p", 2}, {"n", 2}, {"g", 2}}, 7);
    const LoopConfig cfg = quiet(20000, 1e-10);

    KTProblem K = kt_view(P);
    KTParams kp{std::vector<Schedule>(K.m(), Schedule::constant(1.0)),
                std::vector<Schedule>(K.p(), Schedule::constant(1.0))};
    const Vec kx0 = Vec::Zero(K.primal_layout().total_dim()), ky0 = Vec::Zero(K.dual_layout().total_dim());
    RunResult kref = run_block_kt_projective(K, make_block_schedule(BlockScheduleKind::Full, K.m(), K.p(), 1, 0), kp,
                                             cfg, kx0, ky0);

    SaddleProblem S = saddle_view(P);
    SaddleParams sp;
    sp.sigma = 1.0;
    sp.gamma.assign(S.m(), Schedule::constant(0.9));
    sp.mu.assign(S.p(), Schedule::constant(0.9));
    sp.rho.assign(S.p(), Schedule::constant(0.9));
    sp.sigma_k.assign(S.p(), Schedule::constant(1.0));
    const Vec sx0 = Vec::Zero(S.primal_layout().total_dim()), sy0 = Vec::Zero(S.dual_layout().total_dim());
    RunResult sref = run_saddle_projective(S, make_block_schedule(BlockScheduleKind::Full, S.m(), S.p(), 1, 0), sp,
                                           cfg, sx0, sy0, sy0, sy0);

    OracleSolution o = oracle_solve(P);
    v.check((kref.pd.x - o.primal).norm() <= 1e-6 && (sref.pd.x - o.primal).norm() <= 1e-6,
            "synchronous limits agree with the KKT oracle (" + num((kref.pd.x - o.primal).norm()) + ", " +
                num((sref.pd.x - o.primal).norm()) + ")");

    double kt_worst = 0.0, sd_worst = 0.0;
    int runs = 0;
    for (int R : {1, 2, 5})
        for (int T : {0, 2, 5})
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                BlockSchedule bs = make_block_schedule(BlockScheduleKind::RandomWithCover, K.m(), K.p(), R, T, seed);
                bool valid = validate_block_schedule(bs).empty();
                RunResult rk = run_block_kt_projective(K, bs, kp, cfg, kx0, ky0);
                RunResult rs = run_saddle_projective(S, bs, sp, cfg, sx0, sy0, sy0, sy0);
                double dk = (rk.z - kref.z).norm(), ds = (rs.z - sref.z).norm();
                kt_worst = std::max(kt_worst, dk);
                sd_worst = std::max(sd_worst, ds);
                ++runs;
                if (!valid || dk > 1e-5 || ds > 1e-5)
                    v.check(false, "R=" + std::to_string(R) + " T=" + std::to_string(T) + " seed=" +
                                       std::to_string(seed) + ": block KT " + num(dk) + " (" +
                                       to_string(rk.trace.status) + "), saddle " + num(ds) + " (" +
                                       to_string(rs.trace.status) + ")" + (valid ? "" : ", schedule invalid"));
            }
    v.check(kt_worst <= 1e-5, "block KT: max distance to the synchronous limit " + num(kt_worst) + " over " +
                                  std::to_string(runs) + " schedules");
    v.check(sd_worst <= 1e-5, "saddle projective: max distance to the synchronous limit " + num(sd_worst) + " over " +
                                  std::to_string(runs) + " schedules");

    v.check(validate_block_schedule(valid_base()).empty(), "hand-built base schedule is accepted");
    std::vector<std::pair<std::string, std::function<void(BlockSchedule&)>>> bad = {
        {"I_0 misses an operator", [](BlockSchedule& s) { s.steps[0].I = {0}; s.steps[0].pi = {0}; }},
        {"K_0 misses an operator", [](BlockSchedule& s) { s.steps[0].K = {1}; s.steps[0].omega = {0}; }},
        {"index out of range", [](BlockSchedule& s) { s.steps[1].I = {5}; }},
        {"duplicate index", [](BlockSchedule& s) { s.steps[1].I = {0, 0}; s.steps[1].pi = {1, 1}; }},
        {"π_i(n) > n", [](BlockSchedule& s) { s.steps[1].pi = {2}; }},
        {"π_i(n) < n − T", [](BlockSchedule& s) { s.steps[3].pi = {1}; }},
        {"ω_k(n) > n", [](BlockSchedule& s) { s.steps[2].omega = {3}; }},
        {"ω_k(n) < n − T", [](BlockSchedule& s) { s.steps[3].omega = {0}; }},
        {"primal coverage window", [](BlockSchedule& s) { s.steps[2].I = {0}; s.steps[1].I = {0}; }},
        {"dual coverage window", [](BlockSchedule& s) { s.steps[2].K = {1}; s.steps[2].omega = {2}; }},
    };
    int rejected = 0;
    for (auto& [name, mutate] : bad) {
        BlockSchedule s = valid_base();
        mutate(s);
        auto issues = validate_block_schedule(s);
        if (!issues.empty()) ++rejected;
        else v.check(false, "validator accepted: " + name);
    }
    v.check(rejected == static_cast<int>(bad.size()),
            "validator rejects " + std::to_string(rejected) + "/" + std::to_string(bad.size()) +
                " assumption-violating schedules");
    return v;
}

// ---------------------------------------------------------------- 8. inertial perturbation

Verdict criterion_inertial() {
    Verdict v;
    LoopConfig cfg = quiet(400, 1e-12);
    const double user_alpha = 0.8;
    cfg.inertia = Schedule::constant(user_alpha);
    std::vector<double> gaps, caps;
    cfg.observer = [&](const IterationView& it) {
        gaps.push_back((it.x_tilde - it.x).norm());
        caps.push_back(std::min(user_alpha, 1.0 / (it.n + 1.0)));
    };
    OperatorSpec M = OperatorSpec::affine(Mat::Identity(1, 1));
    RunResult r = run_proximal_point(M, Schedule::constant(1.0), cfg, Vec::Constant(1, 5.0));

    bool below = true, cap_monotone = true;
    double tail = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (gaps[i] > caps[i] * (1.0 + 1e-12)) below = false;
        if (i > 0 && caps[i] > caps[i - 1]) cap_monotone = false;
        if (i + 5 >= gaps.size()) tail = std::max(tail, gaps[i]);
    }
    v.check(r.trace.status == RunStatus::Converged && r.z.norm() <= 1e-10,
            "x_n -> 0: |x_final| = " + num(r.z.norm()) + " after " + std::to_string(r.trace.iterations) + " it (" +
                to_string(r.trace.status) + ")");
    v.check(below, "|x~_n - x_n| <= min(alpha_n, 1/(n+1)) at every step");
    v.check(cap_monotone && !caps.empty() && caps.back() <= 1.0 / gaps.size() + 1e-15,
            "the cap min(alpha_n, 1/(n+1)) is nonincreasing and vanishing (last " + num(caps.empty() ? -1 : caps.back()) +
                ")");
    v.check(!gaps.empty() && tail <= 1e-9, "|x~_n - x_n| -> 0 (max over the last 5 steps " + num(tail) + ")");
    return v;
}

// ---------------------------------------------------------------- 9. determinism

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Verdict criterion_determinism() {
    Verdict v;
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("splitkit_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"fb", "--problem lasso:n=6,seed=1 --gamma 1.0 --mu 1.0 --tol 1e-8"},
        {"douglas_rachford", "--problem two_lines:seed=3 --tol 1e-10"},
        {"block_kt_projective",
         "--problem composite:m=2,p=2,n=2,g=2,seed=4 --schedule-kind random_with_cover --R 2 --T 3 --seed 5 "
         "--tol 1e-7"},
    };
    for (const auto& [algo, args] : runs) {
        std::string first;
        bool same = true, ok = true;
        std::size_t lines = 0;
        for (int k = 0; k < 5; ++k) {
            fs::path trace = dir / (algo + "_" + std::to_string(k) + ".csv");
            std::string cmd = std::string("\"") + SPLITKIT_CLI_PATH + "\" run --algo " + algo + " " + args +
                              " --trace \"" + trace.string() + "\" > /dev/null 2>&1";
            int rc = std::system(cmd.c_str());
            if (rc == -1 || !WIFEXITED(rc) || WEXITSTATUS(rc) != 0) ok = false;
            std::string body = slurp(trace);
            if (k == 0) {
                first = body;
                lines = static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));
            } else if (body != first) {
                same = false;
            }
        }
        v.check(ok && same && lines > 1, algo + ": 5 runs, " + std::to_string(lines) + " trace lines, " +
                                             (same ? "byte-identical" : "traces differ") +
                                             (ok ? "" : ", nonzero exit status"));
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"resolvent identities", criterion_resolvent_identities},
        {"geometry", criterion_geometry},
        {"Fejer invariants", criterion_fejer},
        {"oracle convergence", criterion_oracle_convergence},
        {"strong-mode targets", criterion_strong_mode},
        {"equivalences", criterion_equivalences},
        {"asynchrony", criterion_asynchrony},
        {"inertial engine", criterion_inertial},
        {"determinism", criterion_determinism},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);

    int failed = 0;
    for (int id : which) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::cerr << "no criterion " << id << "\n";
            return 2;
        }
        const auto& [name, run] = criteria[id - 1];
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << id << " (" << name << "): " << (v.pass ? "PASS" : "FAIL") << "\n";
        for (const auto& n : v.notes) std::cout << "    " << n << "\n";
        if (!v.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
