#include "splitkit/algorithms.hpp"

#include "detail.hpp"

#include <cmath>
#include <sstream>

namespace splitkit {

namespace detail {

double ip(const Vec& a, const Vec& b, const MetricKernel* U) { return U ? U->inner(a, b) : a.dot(b); }

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void band_error(const std::string& who, const std::string& inequality, int n, const std::string& values) {
    throw ParameterError(who + ": " + inequality + " violated at n = " + std::to_string(n) + " (" + values + ")");
}

CutReport direction_cut(const CutContext& c, const Vec& w, const MetricKernel* U) {
    // H = {z : ⟨z − w, x̃ − w⟩ ≤ 0}; without perturbation δ = ‖x − w‖² and the step is exactly λ(x − w).
    CutReport r;
    r.w = w;
    r.t_star = c.x_tilde - w;
    r.q = c.x_tilde;
    r.delta = ip(r.t_star, r.t_star, U);
    if (c.perturbed) r.delta += ip(c.x - c.x_tilde, r.t_star, U);
    return r;
}

}  // namespace detail

using detail::band_error;
using detail::ip;
using detail::num;

namespace {

constexpr double kGammaCap = 1e6;

LoopConfig with_metric(const LoopConfig& cfg, const std::optional<KernelResolvent>& k) {
    LoopConfig c = cfg;
    if (k) c.metric = k->U;
    return c;
}

RunResult finish(EngineResult&& e) {
    RunResult r;
    r.z = std::move(e.x);
    r.trace = std::move(e.trace);
    r.pd.primal_residual = r.trace.final_residual();
    return r;
}

double required_coco(const OperatorSpec& B, const char* who) {
    if (B.empty() || !B.cocoercivity()) throw ParameterError(std::string(who) + ": B must carry a cocoercivity constant α");
    return *B.cocoercivity();
}

}  // namespace

// ---------------------------------------------------------------- PPA

RunResult run_proximal_point(const OperatorSpec& M, const Schedule& gamma, const LoopConfig& cfg, const Vec& x0,
                             const std::optional<KernelResolvent>& kernel) {
    LoopConfig c = with_metric(cfg, kernel);
    const MetricKernel* U = c.metric ? &*c.metric : nullptr;
    std::function<Vec(double, const Vec&)> J;
    if (kernel && kernel->warped) {
        J = kernel->warped;
    } else if (kernel) {
        if (M.empty() || !M.affine_matrix()) throw ParameterError("kernel PPA without a warped resolvent needs an affine M");
        const Mat S = *M.affine_matrix();
        const Vec b = *M.affine_offset();
        const Mat Uk = kernel->U.matrix();
        J = [S, b, Uk](double g, const Vec& x) -> Vec {
            Mat K = Uk / g + S;
            return K.partialPivLu().solve(Uk * x / g - b);
        };
    } else {
        if (M.empty()) throw ParameterError("run_proximal_point: empty operator");
        J = [&M](double g, const Vec& x) { return M.resolvent(g, x); };
    }
    if (!M.empty() && M.dim() != x0.size()) throw DimensionError("run_proximal_point: x0 dimension mismatch");

    auto step = [&gamma](int n) {
        double g = gamma(n);
        require_step(g, "proximal point");
        return std::min(g, kGammaCap);
    };
    step(0);
    CutOracle oracle = [&](const CutContext& ctx) {
        double g = step(ctx.n);
        Vec p = J(g, ctx.x_tilde);
        CutReport r = detail::direction_cut(ctx, p, U);
        double tn = std::sqrt(ip(r.t_star, r.t_star, U));
        r.residual = tn / g + tn;
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, x0, c));
    res.pd.x = res.z;
    return res;
}

// ---------------------------------------------------------------- Euler

RunResult run_euler(const OperatorSpec& B, const Schedule& gamma, const LoopConfig& cfg, const Vec& x0) {
    double alpha = required_coco(B, "run_euler");
    double eps = cfg.epsilon;
    auto check = [&](int n) {
        double g = gamma(n);
        double hi = cfg.mode == EngineMode::Fejer ? (2.0 - eps) * alpha : alpha;
        if (!(g >= eps && g <= hi))
            band_error("run_euler", cfg.mode == EngineMode::Fejer ? "ε ≤ γ_n ≤ (2−ε)α" : "ε ≤ γ_n ≤ α", n,
                       "γ_n = " + num(g) + ", α = " + num(alpha) + ", ε = " + num(eps));
        return g;
    };
    check(0);
    // J = Id − αB is the resolvent of an operator whose zeros are those of B; λ_n = γ_n/α.
    CutOracle oracle = [&](const CutContext& ctx) {
        double g = check(ctx.n);
        Vec bx = B.forward(ctx.x_tilde);
        Vec w = ctx.x_tilde - alpha * bx;
        CutReport r = detail::direction_cut(ctx, w, nullptr);
        r.relaxation = g / alpha;
        r.residual = bx.norm();
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, x0, cfg));
    res.pd.x = res.z;
    return res;
}

// ---------------------------------------------------------------- KM

RunResult run_averaged_iteration(const OperatorSpec::Map& T, double alpha, const LoopConfig& cfg, const Vec& x0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("run_averaged_iteration: averagedness α must lie in (0,1)");
    auto check = [&](int n) {
        double l = cfg.relaxation(n);
        double hi = cfg.mode == EngineMode::Fejer ? 1.0 / alpha : 1.0 / (2.0 * alpha);
        bool ok = cfg.mode == EngineMode::Fejer ? (l > 0.0 && l < hi) : (l > 0.0 && l <= hi);
        if (!ok)
            band_error("run_averaged_iteration", cfg.mode == EngineMode::Fejer ? "0 < λ_n < 1/α" : "0 < λ_n ≤ 1/(2α)", n,
                       "λ_n = " + num(l) + ", α = " + num(alpha));
        return l;
    };
    check(0);
    // J_M = Id + (2α)⁻¹(T − Id), μ_n = 2αλ_n.
    CutOracle oracle = [&](const CutContext& ctx) {
        double l = check(ctx.n);
        Vec tx = T(ctx.x_tilde);
        Vec w = ctx.x_tilde + (tx - ctx.x_tilde) / (2.0 * alpha);
        CutReport r = detail::direction_cut(ctx, w, nullptr);
        r.relaxation = 2.0 * alpha * l;
        r.residual = (tx - ctx.x_tilde).norm();
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, x0, cfg));
    res.pd.x = res.z;
    return res;
}

// ---------------------------------------------------------------- resolvent composition

RunResult run_resolvent_composition(const OperatorSpec& B, const LinOp& L, const Subspace& V, double gamma,
                                    const LoopConfig& cfg, const Vec& x0) {
    require_step(gamma, "run_resolvent_composition");
    double nrm = spectral_norm(L);
    if (!(nrm > 0.0 && nrm <= 1.0 + 1e-12))
        throw ParameterError("run_resolvent_composition: 0 < ‖L‖ ≤ 1 violated (‖L‖ = " + num(nrm) + ")");
    if (V.dim() != L.cols() || B.dim() != L.rows()) throw DimensionError("run_resolvent_composition: shape mismatch");
    if (V.proj_perp(x0).norm() > 1e-10 * std::max(1.0, x0.norm()))
        throw ParameterError("run_resolvent_composition: x0 ∈ V violated");
    CutOracle oracle = [&](const CutContext& ctx) {
        Vec y = L.apply(ctx.x_tilde);
        Vec q = B.resolvent(gamma, y) - y;
        Vec pz = V.proj(L.adjoint_apply(q));
        Vec w = ctx.x_tilde + pz;
        CutReport r = detail::direction_cut(ctx, w, nullptr);
        r.residual = pz.norm();
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, x0, cfg));
    res.pd.x = res.z;
    return res;
}

// ---------------------------------------------------------------- partial inverse

RunResult run_partial_inverse(const OperatorSpec& A, const Subspace& V, const LoopConfig& cfg, const Vec& x0,
                              const Vec& xs0) {
    if (x0.size() != A.dim() || xs0.size() != A.dim() || V.dim() != A.dim())
        throw DimensionError("run_partial_inverse: dimension mismatch");
    OperatorSpec AV = OperatorSpec::partial_inverse(A, V);
    RunResult res = run_proximal_point(AV, Schedule::constant(1.0), cfg, x0 + xs0);
    res.pd.x = V.proj(res.z);
    res.pd.y_star = V.proj_perp(res.z);
    return res;
}

// ---------------------------------------------------------------- DR / Davis–Yin

namespace {

// Shared by DR (C empty) and Davis–Yin. T y = y + z − x is 1/δ-averaged with δ = 2 − γ/(2τ)
// (δ = 2 without C); the engine runs PPA on J = Id + (δ/2)(T − Id) with μ_n = 2λ_n/δ.
RunResult three_operator(const OperatorSpec& A, const OperatorSpec& B, const OperatorSpec* C, double gamma,
                         const LoopConfig& cfg, const Vec& y0, bool peaceman, const char* who) {
    require_step(gamma, who);
    if (A.dim() != B.dim() || y0.size() != A.dim()) throw DimensionError(std::string(who) + ": dimension mismatch");
    double dY = 2.0;
    if (C) {
        double tau = required_coco(*C, who);
        if (!(gamma < 2.0 * tau))
            throw ParameterError(std::string(who) + ": γ < 2τ violated (γ = " + num(gamma) + ", τ = " + num(tau) + ")");
        dY = 2.0 - gamma / (2.0 * tau);
    }
    const double half = dY / 2.0;
    auto check = [&](int n) {
        if (peaceman) return 2.0;
        double l = cfg.relaxation(n);
        if (!(l > 0.0 && l < dY))
            band_error(who, C ? "0 < λ_n < δ = 2 − γ/(2τ)" : "0 < λ_n < 2", n, "λ_n = " + num(l) + ", δ = " + num(dY));
        return l;
    };
    check(0);
    CutOracle oracle = [&](const CutContext& ctx) {
        double l = check(ctx.n);
        const Vec& y = ctx.x_tilde;
        Vec x = B.resolvent(gamma, y);
        Vec z = C ? A.resolvent(gamma, 2.0 * x - (y + gamma * C->forward(x))) : A.resolvent(gamma, 2.0 * x - y);
        CutReport r;
        r.t_star = half * (x - z);
        r.w = y - r.t_star;
        r.q = y;
        r.delta = ip(r.t_star, r.t_star, nullptr);
        if (ctx.perturbed) r.delta += (ctx.x - y).dot(r.t_star);
        r.relaxation = 2.0 * l / dY;
        r.band_exempt = peaceman;
        r.residual = 2.0 * r.t_star.norm();
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, y0, cfg));
    res.pd.x = B.resolvent(gamma, res.z);
    res.pd.y_star = (res.z - res.pd.x) / gamma;
    return res;
}

}  // namespace

RunResult run_douglas_rachford(const OperatorSpec& A, const OperatorSpec& B, double gamma, const LoopConfig& cfg,
                               const Vec& y0, bool peaceman) {
    if (peaceman && cfg.mode == EngineMode::Haugazeau)
        throw ParameterError("run_douglas_rachford: Peaceman–Rachford (λ ≡ 2) has no strongly convergent variant");
    return three_operator(A, B, nullptr, gamma, cfg, y0, peaceman, "run_douglas_rachford");
}

RunResult run_davis_yin(const OperatorSpec& A, const OperatorSpec& B, const OperatorSpec& C, double gamma,
                        const LoopConfig& cfg, const Vec& y0) {
    if (C.empty()) return three_operator(A, B, nullptr, gamma, cfg, y0, false, "run_davis_yin");
    return three_operator(A, B, &C, gamma, cfg, y0, false, "run_davis_yin");
}

// ---------------------------------------------------------------- FBHF / FBF

namespace {

RunResult fbhf_core(const OperatorSpec& A, const OperatorSpec& C, const OperatorSpec& Q, const Schedule& gamma,
                    const LoopConfig& cfg, const Vec& x0, const char* who) {
    CocoConstant alpha;
    if (!C.empty()) alpha = required_coco(C, who);
    double beta = 0.0;
    if (!Q.empty()) {
        if (!Q.lipschitz()) throw ParameterError(std::string(who) + ": Q must carry a Lipschitz constant β");
        beta = *Q.lipschitz();
    }
    const double eps = cfg.epsilon;
    double chi;
    std::string ineq;
    if (alpha && beta > 0.0) {
        chi = 4.0 * *alpha / (1.0 + std::sqrt(1.0 + 16.0 * *alpha * *alpha * beta * beta));
        ineq = "ε ≤ γ_n ≤ (1−ε)χ, χ = 4α/(1+√(1+16α²β²))";
    } else if (alpha) {
        chi = 2.0 * *alpha;
        ineq = "ε ≤ γ_n ≤ (1−ε)χ, χ = 2α";
    } else if (beta > 0.0) {
        chi = 1.0 / beta;
        ineq = "ε ≤ γ_n ≤ (1−ε)/β";
    } else {
        chi = 1.0 / (eps * (1.0 - eps));
        ineq = "ε ≤ γ_n ≤ 1/ε";
    }
    auto check = [&](int n) {
        double g = gamma(n);
        if (!(g >= eps && g <= (1.0 - eps) * chi))
            band_error(who, ineq, n,
                       "γ_n = " + num(g) + (alpha ? ", α = " + num(*alpha) : std::string()) + ", β = " + num(beta) +
                           ", ε = " + num(eps));
        return g;
    };
    check(0);
    const bool strong = cfg.mode == EngineMode::Haugazeau;
    CutOracle oracle = [&, alpha](const CutContext& ctx) {
        double g = check(ctx.n);
        const Vec& x = ctx.x_tilde;
        Vec qx = Q.empty() ? Vec(Vec::Zero(x.size())) : Q.forward(x);
        Vec arg = C.empty() ? Vec(x - g * qx) : Vec(x - g * (C.forward(x) + qx));
        Vec w = A.resolvent(g, arg);
        Vec qw = Q.empty() ? Vec(Vec::Zero(x.size())) : Q.forward(w);
        Vec ts = (x - w) / g - qx + qw;
        CutReport r = graph_cut_halfspace(ctx.x, w, ts, x, alpha);
        // λ_n chosen so that x_{n+1} = x_n − γ_n t*_n (halved in the strong variant).
        if (r.delta > 0.0) r.relaxation = g * ts.squaredNorm() / ((strong ? 2.0 : 1.0) * r.delta);
        else r.relaxation = eps;
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, x0, cfg));
    res.pd.x = res.z;
    return res;
}

}  // namespace

RunResult run_tseng_fbf(const OperatorSpec& A, const OperatorSpec& B, const Schedule& gamma, const LoopConfig& cfg,
                        const Vec& x0) {
    if (B.empty() || !B.has_forward()) throw ParameterError("run_tseng_fbf: B must be single-valued");
    return fbhf_core(A, OperatorSpec(), B, gamma, cfg, x0, "run_tseng_fbf");
}

RunResult run_fbhf(const OperatorSpec& A, const OperatorSpec& C, const OperatorSpec& Q, const Schedule& gamma,
                   const LoopConfig& cfg, const Vec& x0) {
    return fbhf_core(A, C, Q, gamma, cfg, x0, "run_fbhf");
}

// ---------------------------------------------------------------- FB

RunResult run_forward_backward(const OperatorSpec& A, const OperatorSpec& B, const Schedule& gamma,
                               const LoopConfig& cfg, const Vec& x0, const std::optional<KernelResolvent>& kernel) {
    CocoConstant a;
    if (!B.empty()) a = required_coco(B, "run_forward_backward");
    if (a && kernel) *a *= kernel->U.beta();
    const double eps = cfg.epsilon;
    const bool strong = cfg.mode == EngineMode::Haugazeau;
    const std::string aname = kernel ? "αβ" : "α";

    auto check = [&](int n) {
        double g = gamma(n), mu = cfg.relaxation(n);
        std::string vals = "γ_n = " + num(g) + ", μ_n = " + num(mu) + (a ? ", " + aname + " = " + num(*a) : std::string()) +
                           ", ε = " + num(eps);
        std::string bad;
        if (a) {
            if (!(g >= eps && g <= (2.0 - eps) * *a)) bad += "ε ≤ γ_n ≤ (2−ε)" + aname + "; ";
            double hi;
            std::string hs;
            if (kernel && !strong) {
                hi = 1.0;
                hs = "ε ≤ μ_n ≤ 1";
            } else if (strong) {
                hi = (4.0 * *a - g) / (4.0 * *a);
                hs = "ε ≤ μ_n ≤ (4" + aname + "−γ_n)/(4" + aname + ")";
            } else {
                hi = (1.0 - eps) * (4.0 * *a - g) / (2.0 * *a);
                hs = "ε ≤ μ_n ≤ (1−ε)(4α−γ_n)/(2α)";
            }
            if (!(mu >= eps && mu <= hi)) bad += hs + "; ";
        } else {
            if (!(g >= eps && g <= 1.0 / eps)) bad += "ε ≤ γ_n ≤ 1/ε; ";
            double hi = strong ? 1.0 : 2.0 - eps;
            if (!(mu >= eps && mu <= hi)) bad += strong ? "ε ≤ μ_n ≤ 1; " : "ε ≤ μ_n ≤ 2−ε; ";
        }
        if (!bad.empty()) band_error("run_forward_backward", bad.substr(0, bad.size() - 2), n, vals);
        return std::pair{g, mu};
    };
    check(0);

    LoopConfig c = with_metric(cfg, kernel);
    const MetricKernel* U = c.metric ? &*c.metric : nullptr;
    std::function<Vec(double, const Vec&)> W;
    if (kernel && kernel->warped) {
        W = kernel->warped;
    } else if (kernel) {
        if (A.empty() || !A.affine_matrix()) throw ParameterError("kernel FB without a warped resolvent needs an affine A");
        const Mat S = *A.affine_matrix();
        const Vec b = *A.affine_offset();
        const Mat Uk = kernel->U.matrix();
        W = [S, b, Uk, &B](double g, const Vec& x) -> Vec {
            Mat K = Uk / g + S;
            Vec rhs = Uk * x / g - b;
            if (!B.empty()) rhs -= B.forward(x);
            return K.partialPivLu().solve(rhs);
        };
    } else {
        W = [&A, &B](double g, const Vec& x) -> Vec {
            if (B.empty()) return A.resolvent(g, x);
            return A.resolvent(g, x - g * B.forward(x));
        };
    }

    CutOracle oracle = [&, a](const CutContext& ctx) {
        auto [g, mu] = check(ctx.n);
        const Vec& x = ctx.x_tilde;
        Vec w = W(g, x);
        Vec ts = (x - w) / g;
        CutReport r = graph_cut_halfspace(ctx.x, w, ts, x, a, U);
        // x_{n+1} = x_n + μ_n(w_n − x_n) ⇔ λ_n = 4αμ_n/(4α − γ_n).
        r.relaxation = a ? 4.0 * *a * mu / (4.0 * *a - g) : mu;
        return r;
    };
    RunResult res = finish(outer_loop_run(oracle, x0, c));
    res.pd.x = res.z;
    if (!B.empty()) res.pd.y_star = B.forward(res.z);
    return res;
}

double spectral_norm(const LinOp& L) {
    if (L.rows() == 0 || L.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(L.matrix());
    return svd.singularValues()(0);
}

}  // namespace splitkit
