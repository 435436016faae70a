#include "splitkit/projective.hpp"

#include "detail.hpp"

#include <cmath>
#include <deque>

namespace splitkit {

using detail::band_error;
using detail::num;

namespace {

bool zero_block(const LinOp& L) { return L.rows() == 0 && L.cols() == 0; }

void check_coupling(const std::vector<std::vector<LinOp>>& L, const SpaceLayout& H, const SpaceLayout& G,
                    const char* who) {
    if (L.size() != G.size())
        throw DimensionError(std::string(who) + ": L must have one row of blocks per k (" + std::to_string(G.size()) +
                             "), got " + std::to_string(L.size()));
    for (std::size_t k = 0; k < L.size(); ++k) {
        if (L[k].size() != H.size())
            throw DimensionError(std::string(who) + ": L[" + std::to_string(k) + "] must have " +
                                 std::to_string(H.size()) + " blocks");
        for (std::size_t i = 0; i < L[k].size(); ++i) {
            const LinOp& B = L[k][i];
            if (zero_block(B)) continue;
            if (B.rows() != G.dim(k) || B.cols() != H.dim(i))
                throw DimensionError(std::string(who) + ": L[" + std::to_string(k) + "][" + std::to_string(i) +
                                     "] is " + shape_str(B.rows(), B.cols()) + ", expected " +
                                     shape_str(G.dim(k), H.dim(i)));
        }
    }
}

Vec apply_row(const std::vector<std::vector<LinOp>>& L, const SpaceLayout& H, const SpaceLayout& G, std::size_t k,
              const Vec& x) {
    Vec out = Vec::Zero(G.dim(k));
    for (std::size_t i = 0; i < H.size(); ++i)
        if (!zero_block(L[k][i])) out += L[k][i].apply(H.block(x, i));
    return out;
}

Vec apply_col_adjoint(const std::vector<std::vector<LinOp>>& L, const SpaceLayout& H, const SpaceLayout& G,
                      std::size_t i, const Vec& y) {
    Vec out = Vec::Zero(H.dim(i));
    for (std::size_t k = 0; k < G.size(); ++k)
        if (!zero_block(L[k][i])) out += L[k][i].adjoint_apply(G.block(y, k));
    return out;
}

// Empty specs are the zero operator.
Vec fwd(const OperatorSpec& F, const Vec& x) { return F.empty() ? Vec(Vec::Zero(x.size())) : F.forward(x); }
Vec res(const OperatorSpec& M, double g, const Vec& x) { return M.empty() ? x : M.resolvent(g, x); }

// Past iterates X_{n−T}, ..., X_n.
class History {
public:
    explicit History(int T) : T_(T) {}
    void push(int n, const Vec& x) {
        buf_.push_back(x);
        last_ = n;
        while (static_cast<int>(buf_.size()) > T_ + 1) buf_.pop_front();
    }
    const Vec& at(int j) const {
        int back = last_ - j;
        if (back < 0 || back >= static_cast<int>(buf_.size()))
            throw ParameterError("stale access beyond the delay bound: iterate " + std::to_string(j) +
                                 " requested at n = " + std::to_string(last_) + " with T = " + std::to_string(T_));
        return buf_[buf_.size() - 1 - back];
    }

private:
    int T_;
    int last_ = -1;
    std::deque<Vec> buf_;
};

void check_schedule_shape(const BlockSchedule& s, int m, int p, const char* who) {
    if (s.m != m || s.p != p)
        throw DimensionError(std::string(who) + ": schedule is for m = " + std::to_string(s.m) + ", p = " +
                             std::to_string(s.p) + " but the problem has m = " + std::to_string(m) + ", p = " +
                             std::to_string(p));
    require_valid_schedule(s);
}

void reject_unsupported(const LoopConfig& cfg, const char* who) {
    if (cfg.inertia) throw ParameterError(std::string(who) + ": inertial perturbation is not supported");
    if (cfg.metric) throw ParameterError(std::string(who) + ": a metric kernel is not supported");
}

int projective_stall_limit(const LoopConfig& cfg, const BlockSchedule& s) {
    return std::max(cfg.stall_limit, 10 + 2 * (s.R - 1 + s.T));
}

}  // namespace

// ---------------------------------------------------------------- KT

SpaceLayout KTProblem::primal_layout() const {
    std::vector<Index> d;
    for (const auto& a : A) d.push_back(a.dim());
    return SpaceLayout(d);
}

SpaceLayout KTProblem::dual_layout() const {
    std::vector<Index> d;
    for (const auto& b : B) d.push_back(b.dim());
    return SpaceLayout(d);
}

Vec KTProblem::apply_L(int k, const Vec& x) const { return apply_row(L, primal_layout(), dual_layout(), k, x); }

Vec KTProblem::apply_Lt(int i, const Vec& ys) const {
    return apply_col_adjoint(L, primal_layout(), dual_layout(), i, ys);
}

std::pair<double, double> kt_residual(const KTProblem& P, const Vec& x, const Vec& ys) {
    const SpaceLayout H = P.primal_layout(), G = P.dual_layout();
    double pr = 0.0, dr = 0.0;
    for (int i = 0; i < P.m(); ++i) {
        Vec xi = H.block(x, i);
        pr += (xi - P.A[i].resolvent(1.0, xi - apply_col_adjoint(P.L, H, G, i, ys))).squaredNorm();
    }
    for (int k = 0; k < P.p(); ++k) {
        Vec l = apply_row(P.L, H, G, k, x);
        dr += (l - P.B[k].resolvent(1.0, l + G.block(ys, k))).squaredNorm();
    }
    return {std::sqrt(pr), std::sqrt(dr)};
}

RunResult run_block_kt_projective(const KTProblem& P, const BlockSchedule& sched, const KTParams& par,
                                  const LoopConfig& cfg, const Vec& x0, const Vec& ys0) {
    const char* who = "run_block_kt_projective";
    const int m = P.m(), p = P.p();
    if (m < 1) throw DimensionError(std::string(who) + ": need at least one A_i");
    for (const auto& a : P.A)
        if (a.empty() || !a.has_resolvent()) throw ParameterError(std::string(who) + ": every A_i needs a resolvent");
    for (const auto& b : P.B)
        if (b.empty() || !b.has_resolvent()) throw ParameterError(std::string(who) + ": every B_k needs a resolvent");
    const SpaceLayout H = P.primal_layout(), G = P.dual_layout();
    check_coupling(P.L, H, G, who);
    H.check(x0, "x0");
    G.check(ys0, "y*0");
    if (static_cast<int>(par.gamma.size()) != m || static_cast<int>(par.sigma.size()) != p)
        throw DimensionError(std::string(who) + ": need one γ schedule per A_i and one σ schedule per B_k");
    check_schedule_shape(sched, m, p, who);
    reject_unsupported(cfg, who);
    check_epsilon(cfg.epsilon);
    const double eps = cfg.epsilon;

    auto band = [&](double v, bool primal, int idx, int n) {
        if (!(v >= eps && v <= 1.0 / eps))
            band_error(who, primal ? "ε ≤ γ_{i,n} ≤ 1/ε" : "ε ≤ σ_{k,n} ≤ 1/ε", n,
                       std::string(primal ? "γ_" : "σ_") + std::to_string(idx + 1) + " = " + num(v) +
                           ", ε = " + num(eps));
        return v;
    };
    for (int i = 0; i < m; ++i) band(par.gamma[i](0), true, i, 0);
    for (int k = 0; k < p; ++k) band(par.sigma[k](0), false, k, 0);

    const Index nh = H.total_dim(), ng = G.total_dim();
    Vec X0(nh + ng);
    X0 << x0, ys0;

    History hist(sched.T);
    GraphCache cache;
    cache.a.assign(m, Vec());
    cache.a_star.assign(m, Vec());
    cache.a_stamp.assign(m, -1);
    cache.b.assign(p, Vec());
    cache.b_star.assign(p, Vec());
    cache.b_stamp.assign(p, -1);

    CutOracle oracle = [&](const CutContext& ctx) {
        const int n = ctx.n;
        hist.push(n, ctx.x);
        const BlockStep st = sched.step(n);

        for (std::size_t j = 0; j < st.I.size(); ++j) {
            const int i = st.I[j], w = st.pi[j];
            const Vec& Xw = hist.at(w);
            Vec xw = Xw.head(nh), yw = Xw.tail(ng);
            double g = band(par.gamma[i](w), true, i, n);
            Vec ls = apply_col_adjoint(P.L, H, G, i, yw);
            Vec xi = H.block(xw, i);
            Vec a = P.A[i].resolvent(g, xi - g * ls);
            cache.a_star[i] = (xi - a) / g - ls;
            cache.a[i] = std::move(a);
            cache.a_stamp[i] = w;
        }
        for (std::size_t j = 0; j < st.K.size(); ++j) {
            const int k = st.K[j], w = st.omega[j];
            const Vec& Xw = hist.at(w);
            Vec xw = Xw.head(nh), yw = Xw.tail(ng);
            double s = band(par.sigma[k](w), false, k, n);
            Vec l = apply_row(P.L, H, G, k, xw);
            Vec yk = G.block(yw, k);
            Vec b = P.B[k].resolvent(s, l + s * yk);
            cache.b_star[k] = yk + (l - b) / s;
            cache.b[k] = std::move(b);
            cache.b_stamp[k] = w;
        }

        Vec x = ctx.x.head(nh), ys = ctx.x.tail(ng);
        Vec a_all = H.concat(cache.a), bs_all = G.concat(cache.b_star);
        std::vector<Vec> ts(m), t(p);
        double tau = 0.0, gap = 0.0;
        for (int i = 0; i < m; ++i) {
            ts[i] = cache.a_star[i] + apply_col_adjoint(P.L, H, G, i, bs_all);
            tau += ts[i].squaredNorm();
        }
        for (int k = 0; k < p; ++k) {
            t[k] = cache.b[k] - apply_row(P.L, H, G, k, a_all);
            tau += t[k].squaredNorm();
        }
        // ⟨x,t*⟩ + ⟨t,y*⟩ − Σ⟨a_i,a_i*⟩ − Σ⟨b_k,b_k*⟩ regrouped without the cancelling y* terms;
        // on current data it reduces to Σγ_i⁻¹‖x_i − a_i‖² + Σσ_k⁻¹‖l_k − b_k‖².
        for (int i = 0; i < m; ++i)
            gap += (H.block(x, i) - cache.a[i]).dot(cache.a_star[i] + apply_col_adjoint(P.L, H, G, i, ys));
        for (int k = 0; k < p; ++k)
            gap += (apply_row(P.L, H, G, k, x) - cache.b[k]).dot(cache.b_star[k] - G.block(ys, k));

        CutReport r;
        r.t_star.resize(nh + ng);
        r.t_star << H.concat(ts), G.concat(t);
        r.w.resize(nh + ng);
        r.w << a_all, bs_all;
        r.q = r.w;
        // τ_n = 0 gives θ_n = 0.
        r.delta = tau > 0.0 ? gap : 0.0;
        auto [pr, dr] = kt_residual(P, x, ys);
        r.residual = std::sqrt(pr * pr + dr * dr);
        r.aux.reserve(2 * (m + p));
        for (const auto& v : cache.a) r.aux.push_back(v);
        for (const auto& v : cache.a_star) r.aux.push_back(v);
        for (const auto& v : cache.b) r.aux.push_back(v);
        for (const auto& v : cache.b_star) r.aux.push_back(v);
        return r;
    };

    LoopConfig c = cfg;
    c.stall_limit = projective_stall_limit(cfg, sched);
    EngineResult e = outer_loop_run(oracle, X0, c);

    RunResult out;
    out.z = std::move(e.x);
    out.trace = std::move(e.trace);
    out.pd.x = out.z.head(nh);
    out.pd.y_star = out.z.tail(ng);
    auto [pr, dr] = kt_residual(P, out.pd.x, out.pd.y_star);
    out.pd.primal_residual = pr;
    out.pd.dual_residual = dr;
    return out;
}

RunResult run_kt_projective(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, const Schedule& gamma,
                            const Schedule& sigma, const LoopConfig& cfg, const Vec& x0, const Vec& ys0) {
    if (A.empty() || B.empty()) throw ParameterError("run_kt_projective: A and B are required");
    if (L.rows() != B.dim() || L.cols() != A.dim())
        throw DimensionError("run_kt_projective: L is " + shape_str(L.rows(), L.cols()) + ", expected " +
                             shape_str(B.dim(), A.dim()));
    KTProblem P{{A}, {B}, {{L}}};
    BlockSchedule s = make_block_schedule(BlockScheduleKind::Full, 1, 1, 1, 0);
    return run_block_kt_projective(P, s, KTParams{{gamma}, {sigma}}, cfg, x0, ys0);
}

// ---------------------------------------------------------------- saddle

SaddleDualBlock SaddleDualBlock::plain(OperatorSpec B, Index dim) {
    SaddleDualBlock d;
    d.Bm = std::move(B);
    d.Dm = OperatorSpec::prox(ProxAtom::box(Vec::Zero(dim), Vec::Zero(dim)));
    return d;
}

namespace {

Index dual_dim(const SaddleDualBlock& d) {
    for (const OperatorSpec* s : {&d.Bm, &d.Bc, &d.Bl, &d.Dm, &d.Dc, &d.Dl})
        if (!s->empty()) return s->dim();
    throw ParameterError("saddle dual block has no operator to fix its dimension");
}

Index primal_dim(const SaddlePrimalBlock& b) {
    for (const OperatorSpec* s : {&b.A, &b.C, &b.Q})
        if (!s->empty()) return s->dim();
    throw ParameterError("saddle primal block has no operator to fix its dimension");
}

struct SaddleConstants {
    std::optional<double> alpha;   // min of cocoercivity constants
    std::vector<double> al;        // α_i^l
    std::vector<double> bl, dl;    // β_k^l, δ_k^l
    double chi = 0.0;
};

double lip_of(const OperatorSpec& F, const std::string& name) {
    if (F.empty()) return 0.0;
    if (!F.has_forward()) throw ParameterError(name + " must be single-valued");
    if (!F.lipschitz()) throw ParameterError(name + " must carry a Lipschitz constant");
    return *F.lipschitz();
}

void fold_coco(const OperatorSpec& F, const std::string& name, std::optional<double>& alpha) {
    if (F.empty()) return;
    if (!F.has_forward()) throw ParameterError(name + " must be single-valued");
    if (!F.cocoercivity()) throw ParameterError(name + " must carry a cocoercivity constant");
    alpha = alpha ? std::min(*alpha, *F.cocoercivity()) : *F.cocoercivity();
}

SaddleConstants saddle_constants(const SaddleProblem& P) {
    SaddleConstants c;
    for (int i = 0; i < P.m(); ++i) {
        const auto& b = P.primal[i];
        const std::string tag = "_" + std::to_string(i + 1);
        fold_coco(b.C, "C" + tag, c.alpha);
        c.al.push_back(lip_of(b.Q, "Q" + tag));
    }
    for (int k = 0; k < P.p(); ++k) {
        const auto& d = P.dual[k];
        const std::string tag = "_" + std::to_string(k + 1);
        fold_coco(d.Bc, "B^c" + tag, c.alpha);
        fold_coco(d.Dc, "D^c" + tag, c.alpha);
        c.bl.push_back(lip_of(d.Bl, "B^l" + tag));
        c.dl.push_back(lip_of(d.Dl, "D^l" + tag));
    }
    c.chi = lip_of(P.R, "R");
    return c;
}

}  // namespace

SpaceLayout SaddleProblem::primal_layout() const {
    std::vector<Index> d;
    for (const auto& b : primal) d.push_back(primal_dim(b));
    return SpaceLayout(d);
}

SpaceLayout SaddleProblem::dual_layout() const {
    std::vector<Index> d;
    for (const auto& b : dual) d.push_back(dual_dim(b));
    return SpaceLayout(d);
}

SpaceLayout SaddleProblem::state_layout() const {
    SpaceLayout G = dual_layout();
    return primal_layout().join(G).join(G).join(G);
}

double saddle_residual(const SaddleProblem& P, const Vec& state) {
    const SpaceLayout H = P.primal_layout(), G = P.dual_layout();
    const Index nh = H.total_dim(), ng = G.total_dim();
    if (state.size() != nh + 3 * ng) throw DimensionError("saddle_residual: state dimension mismatch");
    Vec x = state.head(nh), y = state.segment(nh, ng), z = state.segment(nh + ng, ng), v = state.tail(ng);
    Vec Rx = P.R.empty() ? Vec(Vec::Zero(nh)) : P.R.forward(x);
    double s = 0.0;
    for (int i = 0; i < P.m(); ++i) {
        const auto& b = P.primal[i];
        Vec xi = H.block(x, i);
        Vec F = fwd(b.C, xi) + fwd(b.Q, xi) + H.block(Rx, i) + apply_col_adjoint(P.L, H, G, i, v);
        s += (xi - res(b.A, 1.0, xi - F)).squaredNorm();
    }
    for (int k = 0; k < P.p(); ++k) {
        const auto& d = P.dual[k];
        Vec yk = G.block(y, k), zk = G.block(z, k), vk = G.block(v, k);
        s += (yk - res(d.Bm, 1.0, yk - (fwd(d.Bc, yk) + fwd(d.Bl, yk) - vk))).squaredNorm();
        s += (zk - res(d.Dm, 1.0, zk - (fwd(d.Dc, zk) + fwd(d.Dl, zk) - vk))).squaredNorm();
        s += (yk + zk - apply_row(P.L, H, G, k, x)).squaredNorm();
    }
    return std::sqrt(s);
}

RunResult run_saddle_projective(const SaddleProblem& P, const BlockSchedule& sched, const SaddleParams& par,
                                const LoopConfig& cfg, const Vec& x0, const Vec& y0, const Vec& z0, const Vec& vs0) {
    const char* who = "run_saddle_projective";
    const int m = P.m(), p = P.p();
    if (m < 1) throw DimensionError(std::string(who) + ": need at least one primal block");
    const SpaceLayout H = P.primal_layout(), G = P.dual_layout();
    for (int i = 0; i < m; ++i)
        if (!P.primal[i].A.empty() && !P.primal[i].A.has_resolvent())
            throw ParameterError(std::string(who) + ": A_" + std::to_string(i + 1) + " needs a resolvent");
    for (int k = 0; k < p; ++k)
        for (const OperatorSpec* s : {&P.dual[k].Bm, &P.dual[k].Dm})
            if (!s->empty() && !s->has_resolvent())
                throw ParameterError(std::string(who) + ": B^m_k and D^m_k need resolvents");
    if (!P.R.empty() && P.R.dim() != H.total_dim())
        throw DimensionError(std::string(who) + ": R must act on the whole primal space");
    check_coupling(P.L, H, G, who);
    H.check(x0, "x0");
    G.check(y0, "y0");
    G.check(z0, "z0");
    G.check(vs0, "v*0");
    if (static_cast<int>(par.gamma.size()) != m || static_cast<int>(par.mu.size()) != p ||
        static_cast<int>(par.rho.size()) != p || static_cast<int>(par.sigma_k.size()) != p)
        throw DimensionError(std::string(who) + ": need γ per primal block and μ, ρ, σ per dual block");
    if (par.fbhf_relaxation && m != 1) throw ParameterError(std::string(who) + ": fbhf_relaxation needs m = 1");
    check_schedule_shape(sched, m, p, who);
    reject_unsupported(cfg, who);
    check_epsilon(cfg.epsilon);
    const double eps = cfg.epsilon;

    const SaddleConstants K = saddle_constants(P);
    const double sig = par.sigma;
    {
        std::string bad, vals = "σ = " + num(sig) + ", ε = " + num(eps);
        if (K.alpha) {
            vals += ", α = " + num(*K.alpha);
            if (!(sig > 1.0 / (4.0 * *K.alpha))) bad += "σ > 1/(4α); ";
        } else if (!(sig > 0.0)) {
            bad += "σ > 0; ";
        }
        double mx = 0.0;
        for (double a : K.al) mx = std::max(mx, a + K.chi);
        for (double b : K.bl) mx = std::max(mx, b);
        for (double d : K.dl) mx = std::max(mx, d);
        if (!(1.0 / eps > sig + mx)) bad += "1/ε > σ + max{α_i^l+χ, β_k^l, δ_k^l}; ";
        if (!bad.empty()) band_error(who, bad.substr(0, bad.size() - 2), 0, vals);
    }
    auto in_band = [&](double v, double hi, const std::string& ineq, const std::string& name, int n) {
        if (!(v >= eps && v <= hi))
            band_error(who, ineq, n, name + " = " + num(v) + ", upper bound = " + num(hi) + ", ε = " + num(eps));
        return v;
    };
    auto gam = [&](int i, int w, int n) {
        return in_band(par.gamma[i](w), 1.0 / (K.al[i] + K.chi + sig), "ε ≤ γ_{i,n} ≤ 1/(α_i^l+χ+σ)",
                       "γ_" + std::to_string(i + 1), n);
    };
    auto mu = [&](int k, int w, int n) {
        return in_band(par.mu[k](w), 1.0 / (K.bl[k] + sig), "ε ≤ μ_{k,n} ≤ 1/(β_k^l+σ)", "μ_" + std::to_string(k + 1),
                       n);
    };
    auto rho = [&](int k, int w, int n) {
        return in_band(par.rho[k](w), 1.0 / (K.dl[k] + sig), "ε ≤ ρ_{k,n} ≤ 1/(δ_k^l+σ)",
                       "ρ_" + std::to_string(k + 1), n);
    };
    auto sk = [&](int k, int w, int n) {
        return in_band(par.sigma_k[k](w), 1.0 / eps, "ε ≤ σ_{k,n} ≤ 1/ε", "σ_" + std::to_string(k + 1), n);
    };
    for (int i = 0; i < m; ++i) gam(i, 0, 0);
    for (int k = 0; k < p; ++k) mu(k, 0, 0), rho(k, 0, 0), sk(k, 0, 0);

    const Index nh = H.total_dim(), ng = G.total_dim();
    Vec X0(nh + 3 * ng);
    X0 << x0, y0, z0, vs0;
    auto xpart = [nh](const Vec& X) { return Vec(X.head(nh)); };
    auto ypart = [nh, ng](const Vec& X) { return Vec(X.segment(nh, ng)); };
    auto zpart = [nh, ng](const Vec& X) { return Vec(X.segment(nh + ng, ng)); };
    auto vpart = [ng](const Vec& X) { return Vec(X.tail(ng)); };

    History hist(sched.T);
    std::vector<Vec> a(m), as(m), b(p), d(p), es(p), qs(p), ts(p);
    std::vector<double> xi(m, 0.0), eta(p, 0.0);

    CutOracle oracle = [&](const CutContext& ctx) {
        const int n = ctx.n;
        hist.push(n, ctx.x);
        const BlockStep st = sched.step(n);

        for (std::size_t j = 0; j < st.I.size(); ++j) {
            const int i = st.I[j], w = st.pi[j];
            const auto& blk = P.primal[i];
            const Vec& Xw = hist.at(w);
            Vec xw = xpart(Xw), vw = vpart(Xw);
            Vec xi_w = H.block(xw, i);
            double g = gam(i, w, n);
            Vec ls = fwd(blk.Q, xi_w) + apply_col_adjoint(P.L, H, G, i, vw);
            if (!P.R.empty()) ls += H.block(P.R.forward(xw), i);
            a[i] = res(blk.A, g, xi_w - g * (ls + fwd(blk.C, xi_w)));
            as[i] = (xi_w - a[i]) / g - ls + fwd(blk.Q, a[i]);
            xi[i] = (a[i] - xi_w).squaredNorm();
        }
        for (std::size_t j = 0; j < st.K.size(); ++j) {
            const int k = st.K[j], w = st.omega[j];
            const auto& blk = P.dual[k];
            const Vec& Xw = hist.at(w);
            Vec yk = G.block(ypart(Xw), k), zk = G.block(zpart(Xw), k), vk = G.block(vpart(Xw), k);
            double mk = mu(k, w, n), rk = rho(k, w, n), sgk = sk(k, w, n);
            Vec us = vk - fwd(blk.Bl, yk);
            Vec ws = vk - fwd(blk.Dl, zk);
            b[k] = res(blk.Bm, mk, yk + mk * (us - fwd(blk.Bc, yk)));
            d[k] = res(blk.Dm, rk, zk + rk * (ws - fwd(blk.Dc, zk)));
            es[k] = sgk * (apply_row(P.L, H, G, k, xpart(Xw)) - yk - zk) + vk;
            qs[k] = (yk - b[k]) / mk + us + fwd(blk.Bl, b[k]) - es[k];
            ts[k] = (zk - d[k]) / rk + ws + fwd(blk.Dl, d[k]) - es[k];
            eta[k] = (b[k] - yk).squaredNorm() + (d[k] - zk).squaredNorm();
        }

        const Vec& X = ctx.x;
        Vec x = xpart(X), y = ypart(X), z = zpart(X), v = vpart(X);
        Vec a_all = H.concat(a), es_all = G.concat(es);
        Vec Ra = P.R.empty() ? Vec(Vec::Zero(nh)) : P.R.forward(a_all);
        std::vector<Vec> e(p), ps(m);
        for (int k = 0; k < p; ++k) e[k] = b[k] + d[k] - apply_row(P.L, H, G, k, a_all);
        for (int i = 0; i < m; ++i) ps[i] = as[i] + H.block(Ra, i) + apply_col_adjoint(P.L, H, G, i, es_all);

        double sum_sq = 0.0;
        for (int i = 0; i < m; ++i) sum_sq += xi[i];
        for (int k = 0; k < p; ++k) sum_sq += eta[k];
        double Delta = K.alpha ? -sum_sq / (4.0 * *K.alpha) : 0.0;
        for (int i = 0; i < m; ++i) Delta += (H.block(x, i) - a[i]).dot(ps[i]);
        for (int k = 0; k < p; ++k)
            Delta += (G.block(y, k) - b[k]).dot(qs[k]) + (G.block(z, k) - d[k]).dot(ts[k]) +
                     e[k].dot(G.block(v, k) - es[k]);
        double denom = 0.0, pnorm = 0.0;
        for (int i = 0; i < m; ++i) pnorm += ps[i].squaredNorm();
        denom = pnorm;
        for (int k = 0; k < p; ++k) denom += qs[k].squaredNorm() + ts[k].squaredNorm() + e[k].squaredNorm();

        CutReport r;
        r.t_star.resize(nh + 3 * ng);
        r.t_star << H.concat(ps), G.concat(qs), G.concat(ts), G.concat(e);
        r.w.resize(nh + 3 * ng);
        r.w << a_all, G.concat(b), G.concat(d), es_all;
        r.q = r.w;
        r.delta = denom > 0.0 ? Delta : 0.0;
        if (par.fbhf_relaxation && r.delta > 0.0) r.relaxation = par.gamma[0](n) * pnorm / r.delta;
        r.residual = saddle_residual(P, X);
        r.aux.reserve(2 * m);
        for (const auto& v_ : a) r.aux.push_back(v_);
        for (const auto& v_ : as) r.aux.push_back(v_);
        return r;
    };

    LoopConfig c = cfg;
    c.stall_limit = projective_stall_limit(cfg, sched);
    EngineResult eres = outer_loop_run(oracle, X0, c);

    RunResult out;
    out.z = std::move(eres.x);
    out.trace = std::move(eres.trace);
    out.pd.x = xpart(out.z);
    out.pd.y_star = vpart(out.z);
    out.pd.primal_residual = saddle_residual(P, out.z);
    out.pd.dual_residual = 0.0;
    return out;
}

SaddleProblem minimax_saddle_problem(const OperatorSpec& df, const OperatorSpec& dg, const Mat& P, const Mat& M,
                                     const Mat& N) {
    const Index nu = P.rows(), nv = N.rows();
    if (P.cols() != nu || N.cols() != nv || M.rows() != nu || M.cols() != nv)
        throw DimensionError("minimax_saddle_problem: P is u×u, M is u×v, N is v×v");
    if (df.empty() || dg.empty() || df.dim() != nu || dg.dim() != nv)
        throw DimensionError("minimax_saddle_problem: ∂f and ∂g must match the blocks of P and N");
    Mat S(nu + nv, nu + nv);
    S << P, M, -M.transpose(), N;
    SaddleProblem out;
    out.primal = {SaddlePrimalBlock{df, {}, {}}, SaddlePrimalBlock{dg, {}, {}}};
    out.R = OperatorSpec::affine(S).with_lipschitz(spectral_norm(LinOp(S)));
    return out;
}

}  // namespace splitkit
