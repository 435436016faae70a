// Brute-force ground truth. Nothing here may call the engines or the drivers.
#include "splitkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace splitkit {

namespace {

Vec min_norm_solve(const Mat& A, const Vec& b) {
    if (A.cols() == 0) return Vec(0);
    return Eigen::CompleteOrthogonalDecomposition<Mat>(A).solve(b);
}

Mat rows_of(const Mat& G, const std::vector<int>& idx) {
    Mat out(idx.size(), G.cols());
    for (std::size_t j = 0; j < idx.size(); ++j) out.row(j) = G.row(idx[j]);
    return out;
}

// min ‖r − Bᵀλ‖ over λ ≥ 0 by enumerating supports.
double nonneg_cone_distance(const Mat& B, const Vec& r) {
    const int k = static_cast<int>(B.rows());
    double best = r.norm();
    for (int mask = 1; mask < (1 << k); ++mask) {
        std::vector<int> S;
        for (int j = 0; j < k; ++j)
            if (mask & (1 << j)) S.push_back(j);
        Mat Bs = rows_of(B, S);
        Vec lam = min_norm_solve(Bs.transpose(), r);
        if (lam.minCoeff() < 0.0) continue;
        best = std::min(best, (r - Bs.transpose() * lam).norm());
    }
    return best;
}

}  // namespace

Vec polyhedral_projection(const Mat& G, const Vec& h, const Vec& z) {
    const int m = static_cast<int>(G.rows());
    if (m > 12) throw ParameterError("polyhedral_projection: at most 12 constraints (got " + std::to_string(m) + ")");
    if (G.cols() != z.size() || h.size() != m) throw DimensionError("polyhedral_projection: shape mismatch");
    const double scale = 1.0 + h.cwiseAbs().maxCoeff() + G.norm() * (1.0 + z.norm());
    const double tol = 1e-10 * scale;
    bool found = false;
    Vec best;
    double best_d = std::numeric_limits<double>::max();
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> W;
        for (int j = 0; j < m; ++j)
            if (mask & (1 << j)) W.push_back(j);
        Vec x = z;
        if (!W.empty()) {
            Mat Gw = rows_of(G, W);
            Vec hw(W.size());
            for (std::size_t j = 0; j < W.size(); ++j) hw(j) = h(W[j]);
            // Minimum-norm correction d with G_W d = G_W z − h_W from an orthogonal factorization
            // (the normal equations square the conditioning), refined once; then G_W* λ = d.
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(Gw);
            Vec d = cod.solve(Gw * z - hw);
            d += cod.solve(Gw * (z - d) - hw);
            Vec lam = min_norm_solve(Gw.transpose(), d);
            if (lam.minCoeff() < -tol) continue;
            x = z - d;
            if ((Gw * x - hw).cwiseAbs().maxCoeff() > tol) continue;
        }
        if ((G * x - h).maxCoeff() > tol) continue;
        double d = (x - z).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = x;
            found = true;
        }
    }
    if (!found) throw ParameterError("polyhedral_projection: the polyhedron is empty");
    return best;
}

double polyhedral_kkt_residual(const Mat& G, const Vec& h, const Vec& z, const Vec& x) {
    Vec slack = G * x - h;
    double infeas = slack.cwiseMax(0.0).norm();
    std::vector<int> act;
    for (int j = 0; j < slack.size(); ++j)
        if (slack(j) >= -1e-6 * (1.0 + std::abs(h(j)))) act.push_back(j);
    Vec r = z - x;
    double stat = act.empty() ? r.norm() : nonneg_cone_distance(rows_of(G, act), r);
    return infeas + stat;
}

Vec box_least_squares(const Mat& A, const Vec& y, const Vec& lo, const Vec& hi) {
    const int d = static_cast<int>(A.cols());
    if (d > 8) throw ParameterError("box_least_squares: at most 8 unknowns (got " + std::to_string(d) + ")");
    if (lo.size() != d || hi.size() != d || A.rows() != y.size()) throw DimensionError("box_least_squares: shapes");
    const double tol = 1e-10 * (1.0 + A.norm() * (1.0 + y.norm()) + lo.cwiseAbs().maxCoeff() + hi.cwiseAbs().maxCoeff());
    int total = 1;
    for (int j = 0; j < d; ++j) total *= 3;
    for (int code = 0; code < total; ++code) {
        // state 0 free, 1 at lo, 2 at hi
        std::vector<int> st(d);
        for (int j = 0, c = code; j < d; ++j, c /= 3) st[j] = c % 3;
        bool skip = false;
        for (int j = 0; j < d; ++j)
            if (lo(j) == hi(j) && st[j] != 1) skip = true;
        if (skip) continue;
        Vec c = Vec::Zero(d);
        std::vector<int> F;
        for (int j = 0; j < d; ++j) {
            if (st[j] == 1) c(j) = lo(j);
            else if (st[j] == 2) c(j) = hi(j);
            else F.push_back(j);
        }
        bool bounded = true;
        for (int j = 0; j < d; ++j)
            if ((st[j] == 1 && !std::isfinite(lo(j))) || (st[j] == 2 && !std::isfinite(hi(j)))) bounded = false;
        if (!bounded) continue;
        if (!F.empty()) {
            Mat AF(A.rows(), F.size());
            for (std::size_t j = 0; j < F.size(); ++j) AF.col(j) = A.col(F[j]);
            Vec cf = min_norm_solve(AF, y - A * c);
            for (std::size_t j = 0; j < F.size(); ++j) c(F[j]) = cf(j);
        }
        Vec g = A.transpose() * (A * c - y);
        bool ok = true;
        for (int j = 0; j < d && ok; ++j) {
            if (st[j] == 0) ok = c(j) >= lo(j) - tol && c(j) <= hi(j) + tol;
            else if (st[j] == 1) ok = lo(j) == hi(j) || g(j) >= -tol;
            else ok = g(j) <= tol;
        }
        if (ok) return c;
    }
    throw std::logic_error("box_least_squares: no KKT pattern found");
}

Vec lasso_sign_enumeration(const Mat& L, const Vec& y, double lambda) {
    const int n = static_cast<int>(L.cols());
    if (n > 10) throw ParameterError("lasso_sign_enumeration: at most 10 unknowns (got " + std::to_string(n) + ")");
    if (!(lambda > 0.0)) throw ParameterError("lasso_sign_enumeration: λ must be > 0");
    const double tol = 1e-10 * (1.0 + L.norm() * (1.0 + y.norm()));
    auto objective = [&](const Vec& x) { return lambda * x.lpNorm<1>() + 0.5 * (L * x - y).squaredNorm(); };
    int total = 1;
    for (int j = 0; j < n; ++j) total *= 3;
    bool found = false;
    Vec best;
    double best_f = std::numeric_limits<double>::max();
    for (int code = 0; code < total; ++code) {
        Vec s(n);
        std::vector<int> F;
        for (int j = 0, c = code; j < n; ++j, c /= 3) {
            s(j) = (c % 3) - 1.0;
            if (s(j) != 0.0) F.push_back(j);
        }
        Vec x = Vec::Zero(n);
        if (!F.empty()) {
            Mat LF(L.rows(), F.size());
            Vec sF(F.size());
            for (std::size_t j = 0; j < F.size(); ++j) {
                LF.col(j) = L.col(F[j]);
                sF(j) = s(F[j]);
            }
            Vec xF = min_norm_solve(LF.transpose() * LF, LF.transpose() * y - lambda * sF);
            for (std::size_t j = 0; j < F.size(); ++j) x(F[j]) = xF(j);
        }
        Vec corr = L.transpose() * (y - L * x);
        bool ok = true;
        for (int j = 0; j < n && ok; ++j) {
            if (s(j) != 0.0) ok = x(j) * s(j) >= -tol && std::abs(corr(j) - lambda * s(j)) <= 1e3 * tol;
            else ok = std::abs(corr(j)) <= lambda + tol;
        }
        if (!ok) continue;
        double f = objective(x);
        if (f < best_f) {
            best_f = f;
            best = x;
            found = true;
        }
    }
    if (!found) throw std::logic_error("lasso_sign_enumeration: no consistent sign pattern");
    return best;
}

double bisect_monotone(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo <= hi)) throw ParameterError("bisect_monotone: empty interval");
    if (f(lo) >= 0.0) return lo;
    if (f(hi) <= 0.0) return hi;
    for (int it = 0; it < 400; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < 0.0) lo = mid;
        else hi = mid;
        if (hi - lo <= tol * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    }
    return 0.5 * (lo + hi);
}

Vec affine_projection(const Mat& M, const Vec& c, const Vec& x0) {
    if (M.cols() != x0.size() || M.rows() != c.size()) throw DimensionError("affine_projection: shape mismatch");
    return x0 - min_norm_solve(M, M * x0 + c);
}

}  // namespace splitkit
