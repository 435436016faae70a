#include "splitkit/algorithms.hpp"

#include "detail.hpp"

#include <cmath>

namespace splitkit {

using detail::num;

namespace {

Vec head(const Vec& v, Index n) { return v.head(n); }

// B⁻¹ as an affine operator when B is affine with invertible S.
std::optional<std::pair<Mat, Vec>> affine_inverse(const OperatorSpec& B) {
    if (B.empty() || !B.affine_matrix()) return std::nullopt;
    const Mat& S = *B.affine_matrix();
    Eigen::FullPivLU<Mat> lu(S);
    if (!lu.isInvertible()) return std::nullopt;
    Mat Si = lu.inverse();
    return std::pair<Mat, Vec>{Si, -Si * *B.affine_offset()};
}

}  // namespace

// ---------------------------------------------------------------- partial inverse, product-space form

RunResult run_partial_inverse_composite(const OperatorSpec& A, const std::vector<OperatorSpec>& Bs,
                                        const std::vector<LinOp>& Ls, const LoopConfig& cfg, const Vec& x0) {
    if (Bs.size() != Ls.size()) throw DimensionError("run_partial_inverse_composite: |B| ≠ |L|");
    const Index n = A.dim();
    std::vector<OperatorSpec> factors{A};
    std::vector<Vec> start{x0};
    for (std::size_t k = 0; k < Bs.size(); ++k) {
        if (Ls[k].cols() != n || Ls[k].rows() != Bs[k].dim())
            throw DimensionError("run_partial_inverse_composite: L_" + std::to_string(k + 1) + " shape mismatch");
        factors.push_back(Bs[k]);
        start.push_back(Ls[k].apply(x0));
    }
    OperatorSpec P = OperatorSpec::product(factors);
    Subspace V = Subspace::graph(Ls, n);
    Vec z0 = P.layout().concat(start);
    RunResult res = run_partial_inverse(P, V, cfg, z0, Vec::Zero(z0.size()));
    Vec xs = res.pd.y_star;
    res.pd.x = head(res.pd.x, n);
    res.pd.y_star = xs.tail(xs.size() - n);
    return res;
}

// ---------------------------------------------------------------- Chambolle–Pock

KernelProblem chambolle_pock_problem(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, double tau,
                                     double sigma) {
    require_step(tau, "chambolle_pock τ");
    require_step(sigma, "chambolle_pock σ");
    const Index n = L.cols(), m = L.rows();
    if (A.dim() != n || B.dim() != m) throw DimensionError("chambolle_pock: shape mismatch");
    double nl = spectral_norm(L);
    if (!(tau * sigma * nl * nl < 1.0))
        throw ParameterError("chambolle_pock: τσ‖L‖² < 1 violated (τσ‖L‖² = " + num(tau * sigma * nl * nl) + ")");

    Mat U(n + m, n + m);
    U << Mat::Identity(n, n) / tau, -L.matrix().transpose(), -L.matrix(), Mat::Identity(m, m) / sigma;
    KernelProblem kp;
    kp.kernel.U = MetricKernel(U);
    kp.kernel.warped = [A, B, L, tau, sigma, n, m](double g, const Vec& X) -> Vec {
        if (g != 1.0) throw ParameterError("chambolle_pock: the kernel resolvent is defined for γ = 1");
        Vec x = X.head(n), ys = X.tail(m);
        Vec xs = tau * L.adjoint_apply(ys);
        Vec p = A.resolvent(tau, x - xs);
        Vec y = sigma * L.apply(2.0 * p - x);
        Vec q = inverse_resolvent_eval(B, sigma, ys + y);
        Vec out(n + m);
        out << p, q;
        return out;
    };
    auto binv = affine_inverse(B);
    if (A.affine_matrix() && binv) {
        Mat S(n + m, n + m);
        S << *A.affine_matrix(), L.matrix().transpose(), -L.matrix(), binv->first;
        Vec b(n + m);
        b << *A.affine_offset(), binv->second;
        kp.M = OperatorSpec::affine(S, b);
    }
    return kp;
}

RunResult run_chambolle_pock(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, double tau, double sigma,
                             const LoopConfig& cfg, const Vec& x0, const Vec& ys0) {
    KernelProblem kp = chambolle_pock_problem(A, B, L, tau, sigma);
    Vec X0(x0.size() + ys0.size());
    X0 << x0, ys0;
    RunResult res = run_proximal_point(kp.M, Schedule::constant(1.0), cfg, X0, kp.kernel);
    res.pd.x = res.z.head(x0.size());
    res.pd.y_star = res.z.tail(ys0.size());
    return res;
}

// ---------------------------------------------------------------- Condat–Vũ

KernelProblem condat_vu_problem(const OperatorSpec& A, const OperatorSpec& C, const std::vector<CondatVuTerm>& terms,
                                double tau) {
    require_step(tau, "condat_vu τ");
    const Index n = A.dim();
    Index total = n;
    double s = 0.0, mx = tau;
    CocoConstant aleph;
    if (!C.empty()) {
        if (!C.cocoercivity()) throw ParameterError("condat_vu: C must carry a cocoercivity constant");
        aleph = *C.cocoercivity();
    }
    std::vector<Index> dims{n};
    for (const auto& t : terms) {
        require_step(t.sigma, "condat_vu σ_k");
        if (t.L.cols() != n || t.L.rows() != t.B.dim()) throw DimensionError("condat_vu: L_k shape mismatch");
        double nl = spectral_norm(t.L);
        s += t.sigma * nl * nl;
        mx = std::max(mx, t.sigma);
        if (!t.Dinv.empty()) {
            if (!t.Dinv.cocoercivity()) throw ParameterError("condat_vu: D_k⁻¹ must carry a cocoercivity constant");
            aleph = aleph ? std::min(*aleph, *t.Dinv.cocoercivity()) : *t.Dinv.cocoercivity();
        }
        dims.push_back(t.B.dim());
        total += t.B.dim();
    }
    const double beta = (1.0 - std::sqrt(tau * s)) / mx;
    if (!(tau * s < 1.0)) throw ParameterError("condat_vu: τΣσ_k‖L_k‖² < 1 violated");
    if (aleph && !(*aleph * beta > 0.5))
        throw ParameterError("condat_vu: ℵβ > 1/2 violated (ℵ = " + num(*aleph) + ", β = " + num(beta) + ")");

    SpaceLayout lay(dims);
    Mat U = Mat::Zero(total, total);
    U.topLeftCorner(n, n) = Mat::Identity(n, n) / tau;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        Index o = lay.offset(k + 1), m = lay.dim(k + 1);
        U.block(0, o, n, m) = -terms[k].L.matrix().transpose();
        U.block(o, 0, m, n) = -terms[k].L.matrix();
        U.block(o, o, m, m) = Mat::Identity(m, m) / terms[k].sigma;
    }
    KernelProblem kp;
    kp.kernel.U = MetricKernel(U, beta * (1.0 - 1e-12));

    if (aleph) {
        auto F = [C, terms, lay, n](const Vec& X) -> Vec {
            Vec out = Vec::Zero(X.size());
            if (!C.empty()) out.head(n) = C.forward(X.head(n));
            for (std::size_t k = 0; k < terms.size(); ++k)
                if (!terms[k].Dinv.empty())
                    out.segment(lay.offset(k + 1), lay.dim(k + 1)) = terms[k].Dinv.forward(Vec(lay.block(X, k + 1)));
            return out;
        };
        kp.C = OperatorSpec::cocoercive(F, *aleph, total);
    }

    kp.kernel.warped = [A, C, terms, lay, n, tau](double g, const Vec& X) -> Vec {
        if (g != 1.0) throw ParameterError("condat_vu: the kernel resolvent is defined for γ = 1");
        Vec x = X.head(n);
        Vec acc = Vec::Zero(n);
        for (std::size_t k = 0; k < terms.size(); ++k) acc += terms[k].L.adjoint_apply(Vec(lay.block(X, k + 1)));
        if (!C.empty()) acc += C.forward(x);
        Vec xs = tau * acc;
        Vec p = A.resolvent(tau, x - xs);
        Vec out(X.size());
        out.head(n) = p;
        Vec d = 2.0 * p - x;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            Vec ys = lay.block(X, k + 1);
            Vec v = terms[k].L.apply(d);
            if (!terms[k].Dinv.empty()) v -= terms[k].Dinv.forward(ys);
            Vec y = terms[k].sigma * v;
            out.segment(lay.offset(k + 1), lay.dim(k + 1)) = inverse_resolvent_eval(terms[k].B, terms[k].sigma, ys + y);
        }
        return out;
    };

    bool affine = A.affine_matrix() != nullptr;
    std::vector<std::pair<Mat, Vec>> binv;
    for (const auto& t : terms) {
        auto bi = affine_inverse(t.B);
        if (!bi) affine = false;
        else binv.push_back(*bi);
    }
    if (affine) {
        Mat S = Mat::Zero(total, total);
        Vec b = Vec::Zero(total);
        S.topLeftCorner(n, n) = *A.affine_matrix();
        b.head(n) = *A.affine_offset();
        for (std::size_t k = 0; k < terms.size(); ++k) {
            Index o = lay.offset(k + 1), m = lay.dim(k + 1);
            S.block(0, o, n, m) = terms[k].L.matrix().transpose();
            S.block(o, 0, m, n) = -terms[k].L.matrix();
            S.block(o, o, m, m) = binv[k].first;
            b.segment(o, m) = binv[k].second;
        }
        kp.M = OperatorSpec::affine(S, b);
    }
    return kp;
}

RunResult run_condat_vu(const OperatorSpec& A, const OperatorSpec& C, const std::vector<CondatVuTerm>& terms,
                        double tau, const LoopConfig& cfg, const Vec& x0, const Vec& ys0) {
    KernelProblem kp = condat_vu_problem(A, C, terms, tau);
    Vec X0(x0.size() + ys0.size());
    X0 << x0, ys0;
    RunResult res = run_forward_backward(kp.M, kp.C, Schedule::constant(1.0), cfg, X0, kp.kernel);
    res.pd.x = res.z.head(x0.size());
    res.pd.y_star = res.z.tail(ys0.size());
    return res;
}

// ---------------------------------------------------------------- FBF presets

RunResult run_fbf_monotone_skew(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, const Schedule& gamma,
                                const LoopConfig& cfg, const Vec& x0, const Vec& ys0) {
    const Index n = L.cols(), m = L.rows();
    if (A.dim() != n || B.dim() != m) throw DimensionError("run_fbf_monotone_skew: shape mismatch");
    Mat S = Mat::Zero(n + m, n + m);
    S.topRightCorner(n, m) = L.matrix().transpose();
    S.bottomLeftCorner(m, n) = -L.matrix();
    OperatorSpec W = OperatorSpec::product({A, OperatorSpec::inverse(B)});
    OperatorSpec K = OperatorSpec::skew(S).with_lipschitz(estimate_operator_norm(L));
    Vec X0(n + m);
    X0 << x0, ys0;
    RunResult res = run_tseng_fbf(W, K, gamma, cfg, X0);
    res.pd.x = res.z.head(n);
    res.pd.y_star = res.z.tail(m);
    return res;
}

RunResult run_fbf_lagrangian(const OperatorSpec& df, const OperatorSpec& dg, const LinOp& L, const Schedule& gamma,
                             const LoopConfig& cfg, const Vec& x0, const Vec& y0, const Vec& vs0) {
    const Index n = L.cols(), m = L.rows();
    if (df.dim() != n || dg.dim() != m) throw DimensionError("run_fbf_lagrangian: shape mismatch");
    // Q(x, y, v*) = (L*v*, −v*, −Lx + y)
    Mat S = Mat::Zero(n + 2 * m, n + 2 * m);
    S.block(0, n + m, n, m) = L.matrix().transpose();
    S.block(n, n + m, m, m) = -Mat::Identity(m, m);
    S.block(n + m, 0, m, n) = -L.matrix();
    S.block(n + m, n, m, m) = Mat::Identity(m, m);
    double nl = estimate_operator_norm(L);
    OperatorSpec W = OperatorSpec::product({df, dg, OperatorSpec::zero(m)});
    OperatorSpec Q = OperatorSpec::skew(S).with_lipschitz(std::sqrt(1.0 + nl * nl));
    Vec X0(n + 2 * m);
    X0 << x0, y0, vs0;
    RunResult res = run_tseng_fbf(W, Q, gamma, cfg, X0);
    res.pd.x = res.z.head(n);
    res.pd.y_star = res.z.tail(m);
    return res;
}

RunResult run_fbf_parallel_sum(const OperatorSpec& A, const OperatorSpec& Q, const std::vector<ParallelSumTerm>& terms,
                               const Schedule& gamma, const LoopConfig& cfg, const Vec& x0, const Vec& ys0) {
    const Index n = A.dim();
    std::vector<OperatorSpec> factors{A};
    std::vector<Index> dims{n};
    double lsum = 0.0, lip = 0.0;
    if (!Q.empty()) {
        if (!Q.lipschitz()) throw ParameterError("run_fbf_parallel_sum: Q must carry a Lipschitz constant");
        lip = *Q.lipschitz();
    }
    for (const auto& t : terms) {
        if (t.L.cols() != n || t.L.rows() != t.B.dim()) throw DimensionError("run_fbf_parallel_sum: L_k shape mismatch");
        factors.push_back(OperatorSpec::inverse(t.B));
        dims.push_back(t.B.dim());
        double nl = estimate_operator_norm(t.L);
        lsum += nl * nl;
        if (!t.Dinv.empty()) {
            if (!t.Dinv.lipschitz()) throw ParameterError("run_fbf_parallel_sum: D_k⁻¹ must carry a Lipschitz constant");
            lip = std::max(lip, *t.Dinv.lipschitz());
        }
    }
    SpaceLayout lay(dims);
    // B(x, y*) = (Qx + Σ L_k*y*_k, (−L_k x + D_k⁻¹y*_k)_k), β = max{μ, ν_k} + √(Σ‖L_k‖²)
    auto F = [Q, terms, lay, n](const Vec& X) -> Vec {
        Vec out(X.size());
        Vec x = X.head(n);
        Vec top = Q.empty() ? Vec(Vec::Zero(n)) : Q.forward(x);
        for (std::size_t k = 0; k < terms.size(); ++k) {
            Vec ys = lay.block(X, k + 1);
            top += terms[k].L.adjoint_apply(ys);
            Vec v = -terms[k].L.apply(x);
            if (!terms[k].Dinv.empty()) v += terms[k].Dinv.forward(ys);
            out.segment(lay.offset(k + 1), lay.dim(k + 1)) = v;
        }
        out.head(n) = top;
        return out;
    };
    OperatorSpec B = OperatorSpec::lipschitz(F, lip + std::sqrt(lsum), lay.total_dim());
    Vec X0(lay.total_dim());
    X0 << x0, ys0;
    RunResult res = run_tseng_fbf(OperatorSpec::product(factors), B, gamma, cfg, X0);
    res.pd.x = res.z.head(n);
    res.pd.y_star = res.z.tail(res.z.size() - n);
    return res;
}

// ---------------------------------------------------------------- FB presets

RunResult run_projected_landweber(const OperatorSpec& projC, const LinOp& L, const Vec& y, const Schedule& gamma,
                                  const LoopConfig& cfg, const Vec& x0) {
    double nl = spectral_norm(L);
    if (!(nl > 0.0)) throw ParameterError("run_projected_landweber: L = 0");
    auto F = [L, y](const Vec& x) -> Vec { return L.adjoint_apply(L.apply(x) - y); };
    OperatorSpec B = OperatorSpec::cocoercive(F, 1.0 / (nl * nl), L.cols());
    return run_forward_backward(projC, B, gamma, cfg, x0);
}

RunResult run_partial_yosida(const OperatorSpec& A, const std::vector<YosidaTerm>& terms, const Schedule& gamma,
                             const LoopConfig& cfg, const Vec& x0) {
    double inv = 0.0;
    for (const auto& t : terms) {
        require_step(t.rho, "partial Yosida ρ_k");
        if (!(t.omega > 0.0)) throw ParameterError("partial Yosida: ω_k must be > 0");
        double nl = spectral_norm(t.L);
        inv += t.omega * nl * nl / t.rho;
    }
    if (!(inv > 0.0)) throw ParameterError("partial Yosida: all L_k vanish");
    auto F = [terms](const Vec& x) -> Vec {
        Vec out = Vec::Zero(x.size());
        for (const auto& t : terms) out += t.omega * t.L.adjoint_apply(yosida_eval(t.B, t.rho, t.L.apply(x)));
        return out;
    };
    OperatorSpec B = OperatorSpec::cocoercive(F, 1.0 / inv, A.dim());
    return run_forward_backward(A, B, gamma, cfg, x0);
}

RunResult run_backward_backward(const OperatorSpec& A, const OperatorSpec& B, double rho, const Schedule& gamma,
                                const LoopConfig& cfg, const Vec& x0) {
    return run_forward_backward(A, OperatorSpec::yosida(B, rho), gamma, cfg, x0);
}

RunResult run_dual_fb(const OperatorSpec& A, double rho, const Vec& z, const std::vector<DualFBTerm>& terms,
                      const Schedule& gamma, const LoopConfig& cfg, const Vec& ys0) {
    require_step(rho, "run_dual_fb ρ");
    const Index n = A.dim();
    if (z.size() != n) throw DimensionError("run_dual_fb: z dimension mismatch");
    std::vector<OperatorSpec> factors;
    std::vector<Index> dims;
    double inv_nu = 0.0, lsum = 0.0;
    for (const auto& t : terms) {
        if (t.L.cols() != n || t.L.rows() != t.B.dim()) throw DimensionError("run_dual_fb: L_k shape mismatch");
        factors.push_back(OperatorSpec::inverse(t.B));
        dims.push_back(t.B.dim());
        double nl = spectral_norm(t.L);
        lsum += nl * nl;
        if (!t.Dinv.empty()) {
            if (!t.Dinv.cocoercivity()) throw ParameterError("run_dual_fb: D_k⁻¹ must carry a cocoercivity constant ν_k");
            inv_nu = std::max(inv_nu, 1.0 / *t.Dinv.cocoercivity());
        }
    }
    if (terms.empty()) throw ParameterError("run_dual_fb: needs at least one term");
    SpaceLayout lay(dims);
    // T u = J_{A/ρ}((z − u)/ρ), x_n = T(Σ L_k*y*_k)
    auto T = [A, rho, z](const Vec& u) -> Vec { return A.resolvent(1.0 / rho, (z - u) / rho); };
    auto Lstar = [terms, lay, n](const Vec& Y) -> Vec {
        Vec u = Vec::Zero(n);
        for (std::size_t k = 0; k < terms.size(); ++k) u += terms[k].L.adjoint_apply(Vec(lay.block(Y, k)));
        return u;
    };
    auto F = [terms, lay, T, Lstar](const Vec& Y) -> Vec {
        Vec x = T(Lstar(Y));
        Vec out(Y.size());
        for (std::size_t k = 0; k < terms.size(); ++k) {
            Vec v = -terms[k].L.apply(x);
            if (!terms[k].Dinv.empty()) v += terms[k].Dinv.forward(Vec(lay.block(Y, k)));
            out.segment(lay.offset(k), lay.dim(k)) = v;
        }
        return out;
    };
    double alpha = 1.0 / (inv_nu + lsum / rho);
    OperatorSpec B = OperatorSpec::cocoercive(F, alpha, lay.total_dim());
    RunResult res = run_forward_backward(OperatorSpec::product(factors), B, gamma, cfg, ys0);
    res.pd.y_star = res.z;
    res.pd.x = T(Lstar(res.z));
    return res;
}

RunResult run_barycentric_dykstra(const std::vector<OperatorSpec>& As, const Vec& z, const LoopConfig& cfg) {
    if (As.empty()) throw ParameterError("run_barycentric_dykstra: needs at least one operator");
    const Index n = z.size();
    const double p = static_cast<double>(As.size());
    std::vector<DualFBTerm> terms;
    for (const auto& a : As) {
        if (a.dim() != n) throw DimensionError("run_barycentric_dykstra: operator dimension mismatch");
        terms.push_back(DualFBTerm{a, OperatorSpec(), LinOp::identity(n)});
    }
    LoopConfig c = cfg;
    c.relaxation = Schedule::constant(1.0);
    return run_dual_fb(OperatorSpec::zero(n), 1.0, z, terms, Schedule::constant(1.0 / p), c,
                       Vec::Zero(n * static_cast<Index>(As.size())));
}

// ---------------------------------------------------------------- FBHF saddle preset

RunResult run_fbhf_saddle(const OperatorSpec& df, const OperatorSpec& dg, const OperatorSpec& gradh, const LinOp& L,
                          const Schedule& gamma, const LoopConfig& cfg, const Vec& x0, const Vec& y0, const Vec& vs0) {
    const Index n = L.cols(), m = L.rows();
    if (df.dim() != n || dg.dim() != m) throw DimensionError("run_fbhf_saddle: shape mismatch");
    OperatorSpec W = OperatorSpec::product({df, dg, OperatorSpec::zero(m)});
    OperatorSpec C;
    if (!gradh.empty()) {
        if (!gradh.cocoercivity()) throw ParameterError("run_fbhf_saddle: ∇h must carry a cocoercivity constant");
        auto F = [gradh, n](const Vec& X) -> Vec {
            Vec out = Vec::Zero(X.size());
            out.head(n) = gradh.forward(X.head(n));
            return out;
        };
        C = OperatorSpec::cocoercive(F, *gradh.cocoercivity(), n + 2 * m);
    }
    Mat S = Mat::Zero(n + 2 * m, n + 2 * m);
    S.block(0, n + m, n, m) = L.matrix().transpose();
    S.block(n, n + m, m, m) = -Mat::Identity(m, m);
    S.block(n + m, 0, m, n) = -L.matrix();
    S.block(n + m, n, m, m) = Mat::Identity(m, m);
    double nl = estimate_operator_norm(L);
    OperatorSpec Q = OperatorSpec::skew(S).with_lipschitz(std::sqrt(1.0 + nl * nl));
    Vec X0(n + 2 * m);
    X0 << x0, y0, vs0;
    RunResult res = run_fbhf(W, C, Q, gamma, cfg, X0);
    res.pd.x = res.z.head(n);
    res.pd.y_star = res.z.tail(m);
    return res;
}

}  // namespace splitkit
