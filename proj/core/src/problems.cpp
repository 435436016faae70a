#include "splitkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace splitkit {

namespace {

constexpr Index kMaxFactorDim = 64;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Params = std::map<std::string, double>;

// Default parameters per kind; a key missing here is rejected.
const std::map<std::string, Params>& defaults() {
    static const std::map<std::string, Params> d = {
        {"affine_zero", {{"n", 4}, {"r", 4}, {"nu", 0.1}, {"skew", 1.0}}},
        {"two_lines", {}},
        {"halfspaces", {{"n", 2}, {"m", 2}}},
        {"split_feasibility", {{"n", 3}, {"r", 2}}},
        {"lasso", {{"n", 6}, {"lambda", 0.1}, {"noise", 0.01}}},
        {"composite", {{"m", 1}, {"p", 1}, {"n", 3}, {"g", 2}, {"nu", 0.1}}},
        {"dual_strong", {{"n", 3}, {"g", 2}, {"rho", 1.0}}},
        {"minkowski", {{"p", 2}, {"n", 2}, {"g", 2}}},
        {"consensus", {{"m", 3}, {"n", 1}, {"identical", 0}}},
        {"bilinear_minimax", {{"n", 2}, {"g", 2}, {"a_f", 1.0}, {"a_g", 1.0}}},
        {"parallel_sum", {{"n", 3}, {"g", 2}, {"delta", 1.0}, {"nu", 0.1}}},
        {"interval_1d", {{"lo", 0.0}, {"hi", 1.0}, {"u", kInf}, {"c", 2.0}}},
    };
    return d;
}

struct Gen {
    std::mt19937_64 rng;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> unif{0.0, 1.0};

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    Mat gauss(Index r, Index c) {
        Mat m(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) m(i, j) = normal(rng);
        return m;
    }
    Vec gauss(Index n) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v(i) = normal(rng);
        return v;
    }
    Vec uniform(Index n, double a, double b) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v(i) = a + (b - a) * unif(rng);
        return v;
    }
    // K − K* + G*G + νI
    Mat monotone(Index n, double nu, double skew = 1.0) {
        Mat K = gauss(n, n), G = gauss(n, n);
        return skew * (K - K.transpose()) + G.transpose() * G + nu * Mat::Identity(n, n);
    }
    Mat psd(Index n, double nu) {
        Mat G = gauss(n, n);
        return G.transpose() * G + nu * Mat::Identity(n, n);
    }
};

Index dim_param(const Params& p, const std::string& k, Index lo = 1) {
    double v = p.at(k);
    if (v != std::floor(v) || v < static_cast<double>(lo) || v > static_cast<double>(kMaxFactorDim))
        throw ParameterError("gen_problem: " + k + " must be an integer in [" + std::to_string(lo) + ", " +
                             std::to_string(kMaxFactorDim) + "] (got " + std::to_string(v) + ")");
    return static_cast<Index>(v);
}

std::string key(const std::string& base, int i) { return base + std::to_string(i + 1); }
std::string key(const std::string& base, int k, int i) {
    return base + std::to_string(k + 1) + "_" + std::to_string(i + 1);
}

Vec box_proj(const Vec& x, const Vec& lo, const Vec& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

Vec solve_dense(const Mat& A, const Vec& b) { return Eigen::CompleteOrthogonalDecomposition<Mat>(A).solve(b); }

// Stacked [L_k1 ... L_km] for all k, as one (p·g) × (m·n) matrix.
Mat stacked_L(const ProblemInstance& P, int m, int p, Index n, Index g) {
    Mat L = Mat::Zero(p * g, m * n);
    for (int k = 0; k < p; ++k)
        for (int i = 0; i < m; ++i) L.block(k * g, i * n, g, n) = P.mat(key("L", k, i));
    return L;
}

Mat block_diag(const std::vector<Mat>& blocks) {
    Index r = 0, c = 0;
    for (const Mat& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    Mat out = Mat::Zero(r, c);
    Index i = 0, j = 0;
    for (const Mat& b : blocks) {
        out.block(i, j, b.rows(), b.cols()) = b;
        i += b.rows();
        j += b.cols();
    }
    return out;
}

struct CompositeData {
    int m, p;
    Index n, g;
    Mat P, Q, L;
    Vec pv, qv;
};

CompositeData composite_data(const ProblemInstance& P) {
    CompositeData d;
    d.m = P.iparam("m");
    d.p = P.iparam("p");
    d.n = P.iparam("n");
    d.g = P.iparam("g");
    std::vector<Mat> Ps, Qs;
    std::vector<Vec> ps, qs;
    for (int i = 0; i < d.m; ++i) {
        Ps.push_back(P.mat(key("P", i)));
        ps.push_back(P.vec(key("p", i)));
    }
    for (int k = 0; k < d.p; ++k) {
        Qs.push_back(P.mat(key("Q", k)));
        qs.push_back(P.vec(key("q", k)));
    }
    d.P = block_diag(Ps);
    d.Q = block_diag(Qs);
    d.L = stacked_L(P, d.m, d.p, d.n, d.g);
    d.pv = SpaceLayout(std::vector<Index>(d.m, d.n)).concat(ps);
    d.qv = SpaceLayout(std::vector<Index>(d.p, d.g)).concat(qs);
    return d;
}

Mat split_G(const ProblemInstance& P) {
    const Mat& L = P.mat("L");
    const Index n = L.cols(), r = L.rows();
    Mat G(2 * n + 2 * r, n);
    G << Mat::Identity(n, n), -Mat::Identity(n, n), L, -L;
    return G;
}

Vec split_h(const ProblemInstance& P) {
    Vec h(2 * P.vec("hi").size() + 2 * P.vec("dhi").size());
    h << P.vec("hi"), -P.vec("lo"), P.vec("dhi"), -P.vec("dlo");
    return h;
}

Mat minkowski_A(const ProblemInstance& P) {
    const int p = P.iparam("p");
    const Index n = P.iparam("n"), g = P.iparam("g");
    Mat A(g, p * n);
    for (int k = 0; k < p; ++k) A.middleCols(k * n, n) = P.mat(key("L", k));
    return A;
}

Vec stacked_vec(const ProblemInstance& P, const std::string& base, int count) {
    std::vector<Vec> parts;
    Index total = 0;
    for (int k = 0; k < count; ++k) {
        parts.push_back(P.vec(key(base, k)));
        total += parts.back().size();
    }
    Vec out(total);
    Index o = 0;
    for (const Vec& v : parts) {
        out.segment(o, v.size()) = v;
        o += v.size();
    }
    return out;
}

Mat minimax_matrix(const ProblemInstance& P) {
    const Mat& Pm = P.mat("P");
    const Mat& M = P.mat("M");
    const Mat& N = P.mat("N");
    const Index nu = Pm.rows(), nv = N.rows();
    Mat S(nu + nv, nu + nv);
    S << P.param("a_f") * Mat::Identity(nu, nu) + Pm, M, -M.transpose(),
        P.param("a_g") * Mat::Identity(nv, nv) + N;
    return S;
}

Vec minimax_rhs(const ProblemInstance& P) {
    Vec r(P.vec("c_f").size() + P.vec("c_g").size());
    r << P.vec("c_f"), P.vec("c_g");
    return r;
}

Mat parallel_sum_matrix(const ProblemInstance& P) {
    const Mat& L = P.mat("L");
    return P.mat("P") + P.param("delta") * L.transpose() * L;
}

Vec parallel_sum_rhs(const ProblemInstance& P) {
    return P.vec("p") + P.param("delta") * P.mat("L").transpose() * P.vec("c");
}

Mat dual_strong_matrix(const ProblemInstance& P) {
    const Mat& L = P.mat("L");
    const Index n = L.cols();
    return P.mat("S_A") + P.param("rho") * Mat::Identity(n, n) + L.transpose() * P.mat("S_B") * L;
}

Vec dual_strong_rhs(const ProblemInstance& P) {
    return P.vec("z") - P.vec("a") - P.mat("L").transpose() * P.vec("b");
}

double interval_hi(const ProblemInstance& P) { return std::min(P.param("hi"), P.param("u")); }

void require_size(const Vec& x, Index n, const std::string& kind) {
    if (x.size() != n)
        throw DimensionError("residual_eval(" + kind + "): candidate has " + std::to_string(x.size()) +
                             " entries, expected " + std::to_string(n));
}

OperatorSpec box_cone(const Vec& lo, const Vec& hi) { return OperatorSpec::prox(ProxAtom::box(lo, hi)); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, const std::string& what) {
    const char* s = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0') throw ParameterError(what + ": not a number: '" + tok + "'");
    return v;
}

}  // namespace

double ProblemInstance::param(const std::string& k) const {
    auto it = params.find(k);
    if (it == params.end()) throw ParameterError("problem " + kind + " has no parameter '" + k + "'");
    return it->second;
}

const Mat& ProblemInstance::mat(const std::string& k) const {
    auto it = mats.find(k);
    if (it == mats.end()) throw ParameterError("problem " + kind + " has no matrix '" + k + "'");
    return it->second;
}

const Vec& ProblemInstance::vec(const std::string& k) const {
    auto it = vecs.find(k);
    if (it == vecs.end()) throw ParameterError("problem " + kind + " has no vector '" + k + "'");
    return it->second;
}

std::vector<std::string> problem_kinds() {
    std::vector<std::string> out;
    for (const auto& [k, v] : defaults()) out.push_back(k);
    return out;
}

ProblemInstance gen_problem(const std::string& kind, const std::map<std::string, double>& params,
                            std::uint64_t seed) {
    auto dit = defaults().find(kind);
    if (dit == defaults().end()) throw ParameterError("unknown problem kind '" + kind + "'");
    ProblemInstance P;
    P.kind = kind;
    P.seed = seed;
    P.params = dit->second;
    for (const auto& [k, v] : params) {
        if (!P.params.count(k)) throw ParameterError("problem " + kind + " has no parameter '" + k + "'");
        P.params[k] = v;
    }
    const Params& pr = P.params;
    Gen G(seed);

    if (kind == "affine_zero") {
        const Index n = dim_param(pr, "n"), r = dim_param(pr, "r");
        if (r > n) throw ParameterError("gen_problem(affine_zero): r ≤ n");
        Mat Qb = Eigen::HouseholderQR<Mat>(G.gauss(n, n)).householderQ();
        Mat Q = Qb.leftCols(r);
        Mat S = Q * G.monotone(r, pr.at("nu"), pr.at("skew")) * Q.transpose();
        Vec xbar = G.gauss(n);
        P.mats["S"] = S;
        P.vecs["b"] = -S * xbar;
        P.vecs["x_planted"] = xbar;
    } else if (kind == "two_lines") {
        Vec xbar = G.gauss(2);
        Mat A(2, 2);
        double t1 = 2.0 * std::numbers::pi * G.unif(G.rng);
        double t2 = t1 + 0.5 + 2.0 * G.unif(G.rng);  // angle gap in [0.5, 2.5] rad
        A << std::cos(t1), std::sin(t1), std::cos(t2), std::sin(t2);
        P.mats["A"] = A;
        P.vecs["c"] = A * xbar;
        P.vecs["x_planted"] = xbar;
    } else if (kind == "halfspaces") {
        const Index n = dim_param(pr, "n"), m = dim_param(pr, "m");
        if (m > 12) throw ParameterError("gen_problem(halfspaces): at most 12 constraints for the oracle");
        Mat Gm = G.gauss(m, n);
        Vec xf = G.gauss(n);
        P.mats["G"] = Gm;
        P.vecs["h"] = Gm * xf + G.uniform(m, 0.0, 1.0);
        P.vecs["z"] = xf + 2.0 * G.gauss(n);
    } else if (kind == "split_feasibility") {
        const Index n = dim_param(pr, "n"), r = dim_param(pr, "r");
        if (n + r > 6) throw ParameterError("gen_problem(split_feasibility): n + r ≤ 6 for the oracle");
        Mat L = G.gauss(r, n);
        Vec xbar = G.gauss(n);
        Vec u = G.uniform(n, 0.2, 1.0), v = G.uniform(r, 0.2, 1.0);
        P.mats["L"] = L;
        P.vecs["lo"] = xbar - u;
        P.vecs["hi"] = xbar + G.uniform(n, 0.2, 1.0);
        P.vecs["dlo"] = L * xbar - v;
        P.vecs["dhi"] = L * xbar + G.uniform(r, 0.2, 1.0);
        P.vecs["x_planted"] = xbar;
    } else if (kind == "lasso") {
        const Index n = dim_param(pr, "n", 3);
        if (n > 10) throw ParameterError("gen_problem(lasso): n ≤ 10 for the sign-enumeration oracle");
        if (!(pr.at("lambda") > 0.0)) throw ParameterError("gen_problem(lasso): λ > 0");
        Mat L = G.gauss(2 * n, n);
        L /= Eigen::JacobiSVD<Mat>(L).singularValues()(0);
        Vec xbar = Vec::Zero(n);
        for (Index j : {Index(0), Index(2)}) {
            double s = G.unif(G.rng) < 0.5 ? -1.0 : 1.0;
            xbar(j) = s * (0.5 + G.unif(G.rng));
        }
        P.mats["L"] = L;
        P.vecs["y"] = L * xbar + pr.at("noise") * G.gauss(2 * n);
        P.vecs["x_planted"] = xbar;
    } else if (kind == "composite") {
        const int m = static_cast<int>(dim_param(pr, "m")), p = static_cast<int>(dim_param(pr, "p"));
        const Index n = dim_param(pr, "n"), g = dim_param(pr, "g");
        std::vector<Vec> xs, ys;
        for (int i = 0; i < m; ++i) xs.push_back(G.gauss(n));
        for (int k = 0; k < p; ++k) ys.push_back(G.gauss(g));
        for (int i = 0; i < m; ++i) P.mats[key("P", i)] = G.psd(n, pr.at("nu"));
        for (int k = 0; k < p; ++k) P.mats[key("Q", k)] = G.psd(g, pr.at("nu"));
        for (int k = 0; k < p; ++k)
            for (int i = 0; i < m; ++i) P.mats[key("L", k, i)] = G.gauss(g, n);
        for (int i = 0; i < m; ++i) {
            Vec pi = P.mats[key("P", i)] * xs[i];
            for (int k = 0; k < p; ++k) pi += P.mats[key("L", k, i)].transpose() * ys[k];
            P.vecs[key("p", i)] = pi;
        }
        for (int k = 0; k < p; ++k) {
            Vec lx = Vec::Zero(g);
            for (int i = 0; i < m; ++i) lx += P.mats[key("L", k, i)] * xs[i];
            P.vecs[key("q", k)] = P.mats[key("Q", k)] * lx - ys[k];
        }
        P.vecs["x_planted"] = SpaceLayout(std::vector<Index>(m, n)).concat(xs);
        P.vecs["y_planted"] = SpaceLayout(std::vector<Index>(p, g)).concat(ys);
    } else if (kind == "dual_strong") {
        const Index n = dim_param(pr, "n"), g = dim_param(pr, "g");
        if (!(pr.at("rho") > 0.0)) throw ParameterError("gen_problem(dual_strong): ρ > 0");
        P.mats["S_A"] = G.monotone(n, 0.0);
        P.mats["S_B"] = G.monotone(g, 0.0);
        P.mats["L"] = G.gauss(g, n);
        P.vecs["a"] = G.gauss(n);
        P.vecs["b"] = G.gauss(g);
        Vec xbar = G.gauss(n);
        const Mat& L = P.mats["L"];
        P.vecs["z"] = (P.mats["S_A"] + pr.at("rho") * Mat::Identity(n, n)) * xbar + P.vecs["a"] +
                      L.transpose() * (P.mats["S_B"] * (L * xbar) + P.vecs["b"]);
        P.vecs["x_planted"] = xbar;
    } else if (kind == "minkowski") {
        const int p = static_cast<int>(dim_param(pr, "p"));
        const Index n = dim_param(pr, "n"), g = dim_param(pr, "g");
        if (p * n > 8) throw ParameterError("gen_problem(minkowski): p·n ≤ 8 for the oracle");
        for (int k = 0; k < p; ++k) {
            P.mats[key("L", k)] = G.gauss(g, n);
            P.vecs[key("lo", k)] = -G.uniform(n, 0.2, 1.0);
            P.vecs[key("hi", k)] = G.uniform(n, 0.2, 1.0);
        }
        P.vecs["y"] = 3.0 * G.gauss(g);
    } else if (kind == "consensus") {
        const int m = static_cast<int>(dim_param(pr, "m", 2));
        const Index n = dim_param(pr, "n");
        Vec xbar = G.gauss(n);
        Vec lo0 = xbar - G.uniform(n, 0.1, 1.0), hi0 = xbar + G.uniform(n, 0.1, 1.0);
        for (int i = 0; i < m; ++i) {
            if (pr.at("identical") != 0.0) {
                P.vecs[key("lo", i)] = lo0;
                P.vecs[key("hi", i)] = hi0;
            } else {
                P.vecs[key("lo", i)] = xbar - G.uniform(n, 0.1, 1.0);
                P.vecs[key("hi", i)] = xbar + G.uniform(n, 0.1, 1.0);
            }
        }
    } else if (kind == "bilinear_minimax") {
        const Index n = dim_param(pr, "n"), g = dim_param(pr, "g");
        if (!(pr.at("a_f") >= 0.0 && pr.at("a_g") >= 0.0))
            throw ParameterError("gen_problem(bilinear_minimax): a_f, a_g ≥ 0");
        P.mats["P"] = G.psd(n, 0.0);
        P.mats["M"] = G.gauss(n, g);
        P.mats["N"] = G.psd(g, 0.0);
        Vec ub = G.gauss(n), vb = G.gauss(g);
        Vec uv(n + g);
        uv << ub, vb;
        P.vecs["c_f"] = Vec::Zero(n);
        P.vecs["c_g"] = Vec::Zero(g);
        Vec rhs = minimax_matrix(P) * uv;
        P.vecs["c_f"] = rhs.head(n);
        P.vecs["c_g"] = rhs.tail(g);
        P.vecs["x_planted"] = uv;
    } else if (kind == "parallel_sum") {
        const Index n = dim_param(pr, "n"), g = dim_param(pr, "g");
        if (!(pr.at("delta") > 0.0)) throw ParameterError("gen_problem(parallel_sum): δ > 0");
        P.mats["P"] = G.psd(n, pr.at("nu"));
        P.mats["L"] = G.gauss(g, n);
        P.vecs["c"] = G.gauss(g);
        Vec xbar = G.gauss(n);
        P.vecs["p"] = Vec::Zero(n);
        P.vecs["p"] = parallel_sum_matrix(P) * xbar - pr.at("delta") * P.mats["L"].transpose() * P.vecs["c"];
        P.vecs["x_planted"] = xbar;
    } else if (kind == "interval_1d") {
        if (!(pr.at("lo") <= std::min(pr.at("hi"), pr.at("u"))))
            throw ParameterError("gen_problem(interval_1d): [lo,hi] ∩ (−∞,u] must be nonempty");
    }
    return P;
}

ProblemInstance parse_problem_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    Params params;
    std::uint64_t seed = 0;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            auto eq = item.find('=');
            if (eq == std::string::npos) throw ParameterError("problem spec: expected key=value, got '" + item + "'");
            std::string k = item.substr(0, eq), v = item.substr(eq + 1);
            if (k == "seed") {
                double s = parse_double(v, "problem spec seed");
                if (s < 0 || s != std::floor(s)) throw ParameterError("problem spec: seed must be a nonnegative integer");
                seed = static_cast<std::uint64_t>(s);
            } else {
                params[k] = parse_double(v, "problem spec " + k);
            }
        }
    }
    return gen_problem(kind, params, seed);
}

// ---------------------------------------------------------------- oracle and residual

OracleSolution oracle_solve(const ProblemInstance& p) {
    OracleSolution s;
    const std::string& k = p.kind;
    if (k == "affine_zero") {
        s.primal = affine_projection(p.mat("S"), p.vec("b"), Vec::Zero(p.vec("b").size()));
        s.method = "minimal-norm linear solve";
    } else if (k == "two_lines") {
        s.primal = solve_dense(p.mat("A"), p.vec("c"));
        s.method = "linear solve";
    } else if (k == "halfspaces") {
        s.primal = polyhedral_projection(p.mat("G"), p.vec("h"), p.vec("z"));
        s.method = "active-set enumeration";
    } else if (k == "split_feasibility") {
        s.primal = polyhedral_projection(split_G(p), split_h(p), Vec::Zero(p.mat("L").cols()));
        s.method = "active-set enumeration";
    } else if (k == "lasso") {
        s.primal = lasso_sign_enumeration(p.mat("L"), p.vec("y"), p.param("lambda"));
        s.method = "sign-pattern enumeration";
    } else if (k == "composite") {
        CompositeData d = composite_data(p);
        const Index N = d.P.rows(), Mg = d.Q.rows();
        Mat K(N + Mg, N + Mg);
        K << d.P, d.L.transpose(), d.Q * d.L, -Mat::Identity(Mg, Mg);
        Vec rhs(N + Mg);
        rhs << d.pv, d.qv;
        Vec sol = solve_dense(K, rhs);
        s.primal = sol.head(N);
        s.dual = sol.tail(Mg);
        s.method = "KKT linear solve";
    } else if (k == "dual_strong") {
        s.primal = solve_dense(dual_strong_matrix(p), dual_strong_rhs(p));
        s.dual = p.mat("S_B") * (p.mat("L") * s.primal) + p.vec("b");
        s.method = "linear solve";
    } else if (k == "minkowski") {
        const int pk = p.iparam("p");
        Mat A = minkowski_A(p);
        Vec c = box_least_squares(A, p.vec("y"), stacked_vec(p, "lo", pk), stacked_vec(p, "hi", pk));
        s.primal = A * c;
        s.dual = c;
        s.method = "bound-pattern enumeration";
    } else if (k == "consensus") {
        const int m = p.iparam("m");
        Vec lo = p.vec("lo1"), hi = p.vec("hi1");
        for (int i = 1; i < m; ++i) {
            lo = lo.cwiseMax(p.vec(key("lo", i)));
            hi = hi.cwiseMin(p.vec(key("hi", i)));
        }
        s.primal = 0.5 * (lo + hi);
        s.method = "interval intersection midpoint";
    } else if (k == "bilinear_minimax") {
        s.primal = solve_dense(minimax_matrix(p), minimax_rhs(p));
        s.method = "linear solve";
    } else if (k == "parallel_sum") {
        s.primal = solve_dense(parallel_sum_matrix(p), parallel_sum_rhs(p));
        s.dual = p.param("delta") * (p.mat("L") * s.primal - p.vec("c"));
        s.method = "linear solve";
    } else if (k == "interval_1d") {
        const double c = p.param("c");
        double x = bisect_monotone([c](double t) { return t - c; }, p.param("lo"), interval_hi(p));
        s.primal = Vec::Constant(1, x);
        s.method = "bisection";
    } else {
        throw ParameterError("oracle_solve: unsupported kind '" + k + "'");
    }
    s.certificate = residual_eval(p, PrimalDualPair{s.primal, s.dual, 0.0, 0.0});
    return s;
}

double residual_eval(const ProblemInstance& p, const PrimalDualPair& cand) {
    const std::string& k = p.kind;
    const Vec& x = cand.x;
    if (k == "affine_zero") {
        require_size(x, p.vec("b").size(), k);
        return (p.mat("S") * x + p.vec("b")).norm();
    }
    if (k == "two_lines") {
        require_size(x, 2, k);
        return (p.mat("A") * x - p.vec("c")).norm();
    }
    if (k == "halfspaces") {
        require_size(x, p.vec("z").size(), k);
        return polyhedral_kkt_residual(p.mat("G"), p.vec("h"), p.vec("z"), x);
    }
    if (k == "split_feasibility") {
        require_size(x, p.mat("L").cols(), k);
        return polyhedral_kkt_residual(split_G(p), split_h(p), Vec::Zero(x.size()), x);
    }
    if (k == "lasso") {
        const Mat& L = p.mat("L");
        require_size(x, L.cols(), k);
        Vec v = x - L.transpose() * (L * x - p.vec("y"));
        Vec prox(v.size());
        for (Index j = 0; j < v.size(); ++j) prox(j) = soft(v(j), p.param("lambda"));
        return (x - prox).norm();
    }
    if (k == "composite") {
        CompositeData d = composite_data(p);
        require_size(x, d.P.rows(), k);
        Vec lx = d.L * x;
        Vec ys = cand.y_star.size() == d.Q.rows() ? cand.y_star : Vec(d.Q * lx - d.qv);
        return (d.P * x - d.pv + d.L.transpose() * ys).norm() + (d.Q * lx - d.qv - ys).norm();
    }
    if (k == "dual_strong") {
        require_size(x, p.vec("a").size(), k);
        return (dual_strong_matrix(p) * x - dual_strong_rhs(p)).norm();
    }
    if (k == "minkowski") {
        const int pk = p.iparam("p");
        Mat A = minkowski_A(p);
        require_size(x, A.rows(), k);
        if (cand.y_star.size() == A.cols()) {
            const Vec& c = cand.y_star;
            Vec lo = stacked_vec(p, "lo", pk), hi = stacked_vec(p, "hi", pk);
            Vec step = box_proj(c - A.transpose() * (A * c - p.vec("y")), lo, hi);
            return (x - A * c).norm() + (c - step).norm();
        }
        Vec c = box_least_squares(A, p.vec("y"), stacked_vec(p, "lo", pk), stacked_vec(p, "hi", pk));
        return (x - A * c).norm();
    }
    if (k == "consensus") {
        const int m = p.iparam("m");
        const Index n = p.iparam("n");
        double r = 0.0;
        if (x.size() == n) {
            for (int i = 0; i < m; ++i) r += (x - box_proj(x, p.vec(key("lo", i)), p.vec(key("hi", i)))).norm();
            return r;
        }
        require_size(x, m * n, k);
        for (int i = 0; i < m; ++i) {
            Vec xi = x.segment(i * n, n);
            r += (xi - box_proj(xi, p.vec(key("lo", i)), p.vec(key("hi", i)))).norm();
            if (i + 1 < m) r += (xi - x.segment((i + 1) * n, n)).norm();
        }
        return r;
    }
    if (k == "bilinear_minimax") {
        require_size(x, p.vec("x_planted").size(), k);
        return (minimax_matrix(p) * x - minimax_rhs(p)).norm();
    }
    if (k == "parallel_sum") {
        require_size(x, p.vec("p").size(), k);
        return (parallel_sum_matrix(p) * x - parallel_sum_rhs(p)).norm();
    }
    if (k == "interval_1d") {
        require_size(x, 1, k);
        double t = x(0) - (x(0) - p.param("c"));
        t = std::min(std::max(t, p.param("lo")), interval_hi(p));
        return std::abs(x(0) - t);
    }
    throw ParameterError("residual_eval: unsupported kind '" + k + "'");
}

// ---------------------------------------------------------------- serialization

void write_problem(const ProblemInstance& p, std::ostream& os) {
    os << "splitkit-problem 1\n";
    os << "kind " << p.kind << "\n";
    os << "seed " << p.seed << "\n";
    for (const auto& [k, v] : p.params) os << "param " << k << " " << fmt(v) << "\n";
    for (const auto& [k, m] : p.mats) {
        os << "mat " << k << " " << m.rows() << " " << m.cols() << "\n";
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt(m(i, j));
            os << "\n";
        }
    }
    for (const auto& [k, v] : p.vecs) {
        os << "vec " << k << " " << v.size() << "\n";
        for (Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << fmt(v(i));
        os << "\n";
    }
    os << "end\n";
}

ProblemInstance read_problem(std::istream& is) {
    std::string tok;
    auto next = [&](const char* what) {
        if (!(is >> tok)) throw ParameterError(std::string("read_problem: unexpected end of input, expected ") + what);
        return tok;
    };
    auto next_num = [&](const char* what) { return parse_double(next(what), std::string("read_problem ") + what); };
    auto next_dim = [&](const char* what) {
        double v = next_num(what);
        if (v < 0 || v != std::floor(v)) throw ParameterError(std::string("read_problem: bad ") + what);
        return static_cast<Index>(v);
    };
    if (next("header") != "splitkit-problem" || next("version") != "1")
        throw ParameterError("read_problem: missing 'splitkit-problem 1' header");
    ProblemInstance p;
    for (;;) {
        std::string tag = next("a record");
        if (tag == "end") break;
        if (tag == "kind") {
            p.kind = next("kind");
        } else if (tag == "seed") {
            p.seed = std::stoull(next("seed"));
        } else if (tag == "param") {
            std::string k = next("param name");
            p.params[k] = next_num("param value");
        } else if (tag == "mat") {
            std::string k = next("mat name");
            Index r = next_dim("rows"), c = next_dim("cols");
            Mat m(r, c);
            for (Index i = 0; i < r; ++i)
                for (Index j = 0; j < c; ++j) m(i, j) = next_num("matrix entry");
            p.mats[k] = m;
        } else if (tag == "vec") {
            std::string k = next("vec name");
            Index n = next_dim("size");
            Vec v(n);
            for (Index i = 0; i < n; ++i) v(i) = next_num("vector entry");
            p.vecs[k] = v;
        } else {
            throw ParameterError("read_problem: unknown record '" + tag + "'");
        }
    }
    if (!defaults().count(p.kind)) throw ParameterError("read_problem: unknown problem kind '" + p.kind + "'");
    return p;
}

ProblemInstance read_problem_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParameterError("cannot open problem file '" + path + "'");
    return read_problem(f);
}

// ---------------------------------------------------------------- views

TwoOperatorView two_operator_view(const ProblemInstance& p) {
    TwoOperatorView v;
    const std::string& k = p.kind;
    if (k == "lasso") {
        const Mat& L = p.mat("L");
        Mat H = L.transpose() * L;
        v.A = OperatorSpec::prox(ProxAtom::l1(p.param("lambda"), L.cols()));
        v.B = OperatorSpec::affine(H, -L.transpose() * p.vec("y")).with_cocoercivity(1.0 / spectral_norm(LinOp(H)));
    } else if (k == "two_lines") {
        const Mat& A = p.mat("A");
        v.A = OperatorSpec::prox(ProxAtom::affine(A.row(0), p.vec("c").head(1)));
        v.B = OperatorSpec::prox(ProxAtom::affine(A.row(1), p.vec("c").tail(1)));
    } else if (k == "interval_1d") {
        Vec lo = Vec::Constant(1, p.param("lo")), hi = Vec::Constant(1, p.param("hi"));
        v.A = box_cone(lo, hi);
        v.B = box_cone(Vec::Constant(1, -kInf), Vec::Constant(1, p.param("u")));
        v.C = OperatorSpec::affine(Mat::Identity(1, 1), Vec::Constant(1, -p.param("c"))).with_cocoercivity(1.0);
    } else if (k == "affine_zero") {
        v.A = OperatorSpec::affine(p.mat("S"), p.vec("b"));
    } else if (k == "composite") {
        if (p.iparam("m") != 1 || p.iparam("p") != 1)
            throw ParameterError("two_operator_view(composite): needs m = p = 1");
        v.A = OperatorSpec::affine(p.mat("P1"), -p.vec("p1"));
        v.B = OperatorSpec::affine(p.mat("Q1"), -p.vec("q1"));
        v.L = LinOp(p.mat("L1_1"));
    } else {
        throw ParameterError("two_operator_view: no view for kind '" + k + "'");
    }
    return v;
}

KTProblem kt_view(const ProblemInstance& p) {
    KTProblem P;
    const std::string& k = p.kind;
    if (k == "composite") {
        const int m = p.iparam("m"), pk = p.iparam("p");
        for (int i = 0; i < m; ++i) P.A.push_back(OperatorSpec::affine(p.mat(key("P", i)), -p.vec(key("p", i))));
        for (int j = 0; j < pk; ++j) P.B.push_back(OperatorSpec::affine(p.mat(key("Q", j)), -p.vec(key("q", j))));
        P.L.assign(pk, std::vector<LinOp>(m));
        for (int j = 0; j < pk; ++j)
            for (int i = 0; i < m; ++i) P.L[j][i] = LinOp(p.mat(key("L", j, i)));
    } else if (k == "consensus") {
        // x_i ∈ box_i, B_k = N_{0} on x_k − x_{k+1}.
        const int m = p.iparam("m");
        const Index n = p.iparam("n");
        for (int i = 0; i < m; ++i) P.A.push_back(box_cone(p.vec(key("lo", i)), p.vec(key("hi", i))));
        P.L.assign(m - 1, std::vector<LinOp>(m));
        for (int j = 0; j + 1 < m; ++j) {
            P.B.push_back(box_cone(Vec::Zero(n), Vec::Zero(n)));
            P.L[j][j] = LinOp::identity(n);
            P.L[j][j + 1] = LinOp(-Mat::Identity(n, n));
        }
    } else if (k == "split_feasibility") {
        // 0 ∈ N_[lo,hi]x + L*N_[dlo,dhi](Lx) + x.
        const Mat& L = p.mat("L");
        const Index n = L.cols();
        P.A = {box_cone(p.vec("lo"), p.vec("hi"))};
        P.B = {box_cone(p.vec("dlo"), p.vec("dhi")), OperatorSpec::affine(Mat::Identity(n, n))};
        P.L = {{LinOp(L)}, {LinOp::identity(n)}};
    } else {
        throw ParameterError("kt_view: no view for kind '" + k + "'");
    }
    return P;
}

SaddleProblem saddle_view(const ProblemInstance& p) {
    const std::string& k = p.kind;
    if (k == "bilinear_minimax") {
        const Index n = p.mat("P").rows(), g = p.mat("N").rows();
        OperatorSpec df = OperatorSpec::prox(ProxAtom::quadratic(p.param("a_f") * Mat::Identity(n, n), p.vec("c_f")));
        OperatorSpec dg = OperatorSpec::prox(ProxAtom::quadratic(p.param("a_g") * Mat::Identity(g, g), p.vec("c_g")));
        return minimax_saddle_problem(df, dg, p.mat("P"), p.mat("M"), p.mat("N"));
    }
    SaddleProblem S;
    if (k == "parallel_sum") {
        const Index g = p.mat("L").rows();
        const double delta = p.param("delta");
        S.primal = {SaddlePrimalBlock{OperatorSpec::affine(p.mat("P"), -p.vec("p")), {}, {}}};
        SaddleDualBlock d;
        d.Bm = box_cone(p.vec("c"), p.vec("c"));
        d.Dc = OperatorSpec::affine(delta * Mat::Identity(g, g)).with_cocoercivity(1.0 / delta);
        S.dual = {d};
        S.L = {{LinOp(p.mat("L"))}};
    } else if (k == "composite") {
        KTProblem K = kt_view(p);
        for (const OperatorSpec& A : K.A) S.primal.push_back(SaddlePrimalBlock{A, {}, {}});
        for (int j = 0; j < K.p(); ++j) S.dual.push_back(SaddleDualBlock::plain(K.B[j], p.iparam("g")));
        S.L = K.L;
    } else {
        throw ParameterError("saddle_view: no view for kind '" + k + "'");
    }
    return S;
}

std::vector<OperatorSpec> halfspace_view(const ProblemInstance& p) {
    if (p.kind != "halfspaces") throw ParameterError("halfspace_view: kind must be halfspaces");
    const Mat& G = p.mat("G");
    const Vec& h = p.vec("h");
    std::vector<OperatorSpec> out;
    for (Index j = 0; j < G.rows(); ++j) out.push_back(OperatorSpec::prox(ProxAtom::halfspace(G.row(j).transpose(), h(j))));
    return out;
}

}  // namespace splitkit
