#include "splitkit/engine.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

namespace splitkit {

namespace {

double ip(const Vec& a, const Vec& b, const MetricKernel* U) { return U ? U->inner(a, b) : a.dot(b); }

}  // namespace

Vec project_onto_halfspace(const Vec& x, const HalfSpace& H) {
    if (x.size() != H.u_star.size()) throw DimensionError("project_onto_halfspace: dimension mismatch");
    double nn = H.u_star.squaredNorm();
    if (nn == 0.0) {
        if (H.eta < 0.0) throw EmptyIntersectionError("half-space with zero normal and negative offset is empty");
        return x;
    }
    double v = x.dot(H.u_star);
    if (v <= H.eta) return x;
    return x - ((v - H.eta) / nn) * H.u_star;
}

Vec haugazeau_combine(const Vec& x, const Vec& y, const Vec& z, const MetricKernel* U) {
    if (x.size() != y.size() || y.size() != z.size()) throw DimensionError("haugazeau_combine: dimension mismatch");
    Vec xy = x - y, yz = y - z;
    double chi = ip(xy, yz, U);
    double mu = ip(xy, xy, U);
    double nu = ip(yz, yz, U);
    // ρ = μν − χ² = μ‖r‖² with r the part of y − z orthogonal to x − y; this form avoids the
    // cancellation of μν − χ² when the two half-spaces are nearly parallel.
    Vec r = mu > 0.0 ? Vec(yz - (chi / mu) * xy) : yz;
    double r2 = ip(r, r, U);
    double rho = mu * r2;
    // Tiny ρ means collinear x − y and y − z in floating point.
    if (rho <= 1e-14 * mu * nu) {
        if (chi < 0.0) throw EmptyIntersectionError("Haugazeau: H(x,y) ∩ H(y,z) is empty");
        return z;
    }
    if (chi * nu >= rho) return x + (1.0 + chi / nu) * (z - y);
    // y + (ν/ρ)(χ(x − y) + μ(z − y)) with χ(x − y) + μ(z − y) = −μr.
    return y - (nu / r2) * r;
}

CutReport graph_cut_halfspace(const Vec& x, const Vec& w, const Vec& t_star, const Vec& q, CocoConstant alpha,
                              const MetricKernel* U) {
    CutReport c;
    c.w = w;
    c.t_star = t_star;
    c.q = q;
    double off = 0.0;
    if (alpha) {
        Vec wq = w - q;
        off = ip(wq, wq, U) / (4.0 * *alpha);
    }
    c.delta = ip(x - w, t_star, U) - off;
    c.residual = std::sqrt(ip(t_star, t_star, U)) + std::sqrt(ip(w - x, w - x, U));
    return c;
}

HalfSpace cut_halfspace(const CutReport& c, CocoConstant alpha) {
    double off = 0.0;
    if (alpha) off = (c.w - c.q).squaredNorm() / (4.0 * *alpha);
    return HalfSpace{c.t_star, c.w.dot(c.t_star) + off};
}

std::string to_string(EngineMode m) { return m == EngineMode::Fejer ? "fejer" : "haugazeau"; }

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return "converged";
        case RunStatus::MaxIter: return "max_iter";
        case RunStatus::Stalled: return "stalled";
        case RunStatus::Failed: return "failed";
    }
    return "?";
}

EngineMode parse_mode(const std::string& s) {
    if (s == "fejer") return EngineMode::Fejer;
    if (s == "haugazeau") return EngineMode::Haugazeau;
    throw ParameterError("unknown engine mode '" + s + "' (expected fejer | haugazeau)");
}

void check_epsilon(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("ε must lie in (0,1)");
}

void check_relaxation(double lambda, EngineMode mode, double eps, int n) {
    double hi = mode == EngineMode::Fejer ? 2.0 - eps : 1.0;
    if (!(lambda >= eps && lambda <= hi)) {
        std::ostringstream os;
        os << "relaxation λ_" << n << " = " << lambda << " violates "
           << (mode == EngineMode::Fejer ? "ε ≤ λ_n ≤ 2−ε" : "ε ≤ λ_n ≤ 1") << " (ε = " << eps << ")";
        throw ParameterError(os.str());
    }
}

EngineResult outer_loop_run(const CutOracle& oracle, const Vec& x0, const LoopConfig& cfg) {
    check_epsilon(cfg.epsilon);
    if (cfg.max_iter < 0) throw ParameterError("max_iter must be >= 0");
    const MetricKernel* U = cfg.metric ? &*cfg.metric : nullptr;
    if (U && U->dim() != x0.size()) throw DimensionError("metric kernel dimension does not match x0");
    if (cfg.reference && cfg.reference->size() != x0.size()) throw DimensionError("reference point dimension mismatch");

    auto norm = [U](const Vec& v) { return std::sqrt(ip(v, v, U)); };
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        if (!cfg.timing) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };

    EngineResult out;
    RunTrace& tr = out.trace;
    Vec x = x0, x_prev = x0;
    if (cfg.record_iterates) tr.iterates.push_back(x);
    int stall = 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (int n = 0;; ++n) {
        Vec x_tilde = x;
        if (cfg.inertia) {
            double a = (*cfg.inertia)(n);
            if (a < 0.0) throw ParameterError("inertial parameter α_n must be >= 0");
            Vec e = a * (x - x_prev);
            double cap = std::min(a, 1.0 / (n + 1.0));
            double en = e.norm();
            if (en > cap) e *= cap / en;
            x_tilde = x + e;
        }

        CutReport cut = oracle(CutContext{n, x, x_tilde, cfg.inertia.has_value()});
        IterRecord rec;
        rec.iter = n;
        rec.residual = cut.residual;
        rec.fejer_gap = cfg.reference ? norm(x - *cfg.reference) : nan;
        rec.delta = cut.delta;

        if (cut.residual <= cfg.tol) {
            rec.elapsed_ms = elapsed();
            tr.records.push_back(rec);
            tr.status = RunStatus::Converged;
            tr.iterations = n;
            break;
        }
        if (n >= cfg.max_iter) {
            rec.elapsed_ms = elapsed();
            tr.records.push_back(rec);
            tr.status = RunStatus::MaxIter;
            tr.iterations = n;
            break;
        }

        double lambda = cut.relaxation ? *cut.relaxation : cfg.relaxation(n);
        rec.lambda = lambda;
        Vec r = x;
        if (cut.delta > 0.0) {
            if (!cut.band_exempt) check_relaxation(lambda, cfg.mode, cfg.epsilon, n);
            double tt = ip(cut.t_star, cut.t_star, U);
            if (!(tt > 0.0)) throw std::logic_error("cut oracle returned δ > 0 with t* = 0");
            double coef = cut.delta / tt;
            rec.theta = lambda * coef;
            r = x - rec.theta * cut.t_star;
            stall = 0;
        } else {
            ++stall;
        }

        Vec x_next;
        if (cfg.mode == EngineMode::Haugazeau) {
            try {
                x_next = haugazeau_combine(x0, x, r, U);
            } catch (const EmptyIntersectionError& e) {
                rec.elapsed_ms = elapsed();
                tr.records.push_back(rec);
                tr.status = RunStatus::Failed;
                tr.message = e.what();
                tr.iterations = n;
                break;
            }
        } else {
            x_next = std::move(r);
        }

        rec.disp_norm = norm(x_next - x);
        rec.elapsed_ms = elapsed();
        tr.records.push_back(rec);
        if (cfg.observer) cfg.observer(IterationView{n, x, x_tilde, cut, x_next, lambda});

        x_prev = std::move(x);
        x = std::move(x_next);
        if (cfg.record_iterates) tr.iterates.push_back(x);

        if (stall >= cfg.stall_limit) {
            tr.status = RunStatus::Stalled;
            tr.iterations = n + 1;
            tr.message = "no separating information for " + std::to_string(stall) + " consecutive iterations";
            break;
        }
    }
    out.x = std::move(x);
    return out;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string g17(double v) {
    char buf[64];
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // %.17g is locale dependent only through the decimal point; force '.' below.
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    for (char& c : s)
        if (c == ',') c = '.';
    return s;
}

}  // namespace

void trace_write(const RunTrace& trace, std::ostream& os) {
    os << "iter,residual,disp_norm,theta,fejer_gap,elapsed_ms\n";
    for (const auto& r : trace.records) {
        os << r.iter << ',' << g17(r.residual) << ',' << g17(r.disp_norm) << ',' << g17(r.theta) << ','
           << g17(r.fejer_gap) << ',' << g17(r.elapsed_ms) << '\n';
    }
}

void trace_write(const RunTrace& trace, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trace file '" + path + "' for writing");
    trace_write(trace, f);
    if (!f) throw std::runtime_error("error writing trace file '" + path + "'");
}

std::vector<IterRecord> trace_read(std::istream& is) {
    std::vector<IterRecord> out;
    std::string line;
    if (!std::getline(is, line)) return out;
    if (line != "iter,residual,disp_norm,theta,fejer_gap,elapsed_ms") throw std::runtime_error("trace: bad header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        ss.imbue(std::locale::classic());
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw std::runtime_error("trace: bad row '" + line + "'");
        IterRecord r;
        r.iter = std::stoi(cells[0]);
        r.residual = std::strtod(cells[1].c_str(), nullptr);
        r.disp_norm = std::strtod(cells[2].c_str(), nullptr);
        r.theta = std::strtod(cells[3].c_str(), nullptr);
        r.fejer_gap = std::strtod(cells[4].c_str(), nullptr);
        r.elapsed_ms = std::strtod(cells[5].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

}  // namespace splitkit
