#include "splitkit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace splitkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinStep = 1e-12;

void require_dim(const Vec& x, Index n, const std::string& who) {
    if (x.size() != n)
        throw DimensionError(who + ": expected dimension " + std::to_string(n) + ", got " + std::to_string(x.size()));
}

double sym_tol(const Mat& M) { return 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff()); }

Vec gaussian(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
}

}  // namespace

void require_step(double gamma, const char* who) {
    if (!(gamma >= kMinStep) || !std::isfinite(gamma)) {
        std::ostringstream os;
        os << who << ": step γ = " << gamma << " is below 1e-12 or not finite";
        throw ParameterError(os.str());
    }
}

// ---------------------------------------------------------------- Subspace

Subspace Subspace::span(const Mat& basis) {
    Subspace s;
    if (basis.cols() == 0) {
        s.P_ = Mat::Zero(basis.rows(), basis.rows());
        return s;
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(basis);
    s.P_ = basis * cod.pseudoInverse();
    s.P_ = 0.5 * (s.P_ + s.P_.transpose()).eval();
    return s;
}

Subspace Subspace::kernel(const Mat& A) {
    Subspace s;
    Index n = A.cols();
    if (A.rows() == 0) {
        s.P_ = Mat::Identity(n, n);
        return s;
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
    s.P_ = Mat::Identity(n, n) - cod.pseudoInverse() * A;
    s.P_ = 0.5 * (s.P_ + s.P_.transpose()).eval();
    return s;
}

Subspace Subspace::from_projector(Mat P) {
    if (P.rows() != P.cols()) throw DimensionError("projector must be square");
    double tol = 1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff());
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol || (P * P - P).cwiseAbs().maxCoeff() > tol)
        throw ParameterError("matrix is not an orthogonal projector");
    Subspace s;
    s.P_ = std::move(P);
    return s;
}

Subspace Subspace::graph(const std::vector<LinOp>& L, Index n) {
    // V = {(x, L_k x)}; P_V(u, v_k) = (w, L_k w), w = (Id + Σ L_k*L_k)^{-1}(u + Σ L_k* v_k).
    Index total = n;
    for (const auto& l : L) {
        if (l.cols() != n) throw DimensionError("graph subspace: operator domain mismatch");
        total += l.rows();
    }
    Mat G(total, n);
    G.topRows(n) = Mat::Identity(n, n);
    Index off = n;
    for (const auto& l : L) {
        G.middleRows(off, l.rows()) = l.matrix();
        off += l.rows();
    }
    Mat Uinv = G.transpose() * G;
    Subspace s;
    s.P_ = G * Uinv.ldlt().solve(G.transpose());
    s.P_ = 0.5 * (s.P_ + s.P_.transpose()).eval();
    return s;
}

Vec Subspace::proj(const Vec& x) const {
    require_dim(x, dim(), "Subspace::proj");
    return P_ * x;
}

Vec Subspace::proj_perp(const Vec& x) const {
    require_dim(x, dim(), "Subspace::proj_perp");
    return x - P_ * x;
}

// ---------------------------------------------------------------- ProxAtom

ProxAtom ProxAtom::halfspace(Vec a, double b) {
    if (!(a.norm() > 0.0)) throw ParameterError("half-space normal must be nonzero");
    ProxAtom f;
    f.kind_ = Kind::HalfSpace;
    f.n_ = a.size();
    f.a_ = std::move(a);
    f.s_ = b;
    return f;
}

ProxAtom ProxAtom::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw DimensionError("box bounds differ in size");
    for (Index i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i])) throw ParameterError("box has lo > hi at coordinate " + std::to_string(i));
    ProxAtom f;
    f.kind_ = Kind::Box;
    f.n_ = lo.size();
    f.lo_ = std::move(lo);
    f.hi_ = std::move(hi);
    return f;
}

ProxAtom ProxAtom::affine(Mat A, Vec b) {
    if (A.rows() != b.size()) throw DimensionError("affine set: A has " + std::to_string(A.rows()) + " rows, b has size " + std::to_string(b.size()));
    ProxAtom f;
    f.kind_ = Kind::Affine;
    f.n_ = A.cols();
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
    f.Apinv_ = cod.pseudoInverse();
    if ((A * (f.Apinv_ * b) - b).norm() > 1e-9 * std::max(1.0, b.norm()))
        throw ParameterError("affine set {Ax = b} is empty");
    f.Q_ = std::move(A);
    f.a_ = std::move(b);
    return f;
}

ProxAtom ProxAtom::ball(Vec center, double radius) {
    if (!(radius >= 0.0)) throw ParameterError("ball radius must be >= 0");
    ProxAtom f;
    f.kind_ = Kind::Ball;
    f.n_ = center.size();
    f.a_ = std::move(center);
    f.s_ = radius;
    return f;
}

ProxAtom ProxAtom::l1(double weight, Index n) {
    if (!(weight >= 0.0)) throw ParameterError("l1 weight must be >= 0");
    ProxAtom f;
    f.kind_ = Kind::L1;
    f.n_ = n;
    f.s_ = weight;
    return f;
}

ProxAtom ProxAtom::quadratic(Mat Q, Vec b) {
    if (Q.rows() != Q.cols() || Q.rows() != b.size()) throw DimensionError("quadratic atom: shape mismatch");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > sym_tol(Q)) throw ParameterError("quadratic atom: Q is not symmetric");
    if (Q.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
            throw ParameterError("quadratic atom: Q is not positive semidefinite");
    }
    ProxAtom f;
    f.kind_ = Kind::Quadratic;
    f.n_ = Q.rows();
    f.Q_ = std::move(Q);
    f.a_ = std::move(b);
    return f;
}

ProxAtom ProxAtom::support_of_box(Vec lo, Vec hi) {
    ProxAtom f = box(std::move(lo), std::move(hi));
    f.kind_ = Kind::SupportOfBox;
    return f;
}

ProxAtom ProxAtom::zero(Index n) {
    ProxAtom f;
    f.kind_ = Kind::Zero;
    f.n_ = n;
    return f;
}

ProxAtom ProxAtom::linear(Vec c) {
    ProxAtom f;
    f.kind_ = Kind::Linear;
    f.n_ = c.size();
    f.a_ = std::move(c);
    return f;
}

std::string ProxAtom::name() const {
    switch (kind_) {
        case Kind::HalfSpace: return "halfspace";
        case Kind::Box: return "box";
        case Kind::Affine: return "affine";
        case Kind::Ball: return "ball";
        case Kind::L1: return "l1";
        case Kind::Quadratic: return "quadratic";
        case Kind::SupportOfBox: return "support_of_box";
        case Kind::Zero: return "zero";
        case Kind::Linear: return "linear";
    }
    return "?";
}

namespace {

Vec clamp_box(const Vec& x, const Vec& lo, const Vec& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

}  // namespace

Vec ProxAtom::prox(double gamma, const Vec& x) const {
    require_step(gamma, "prox");
    require_dim(x, n_, "prox(" + name() + ")");
    switch (kind_) {
        case Kind::HalfSpace: {
            double v = a_.dot(x) - s_;
            if (v <= 0.0) return x;
            return x - (v / a_.squaredNorm()) * a_;
        }
        case Kind::Box: return clamp_box(x, lo_, hi_);
        case Kind::Affine: return x - Apinv_ * (Q_ * x - a_);
        case Kind::Ball: {
            Vec d = x - a_;
            double r = d.norm();
            if (r <= s_) return x;
            return a_ + (s_ / r) * d;
        }
        case Kind::L1: {
            double t = gamma * s_;
            Vec out(n_);
            for (Index i = 0; i < n_; ++i) {
                double v = x[i];
                out[i] = v > t ? v - t : (v < -t ? v + t : 0.0);
            }
            return out;
        }
        case Kind::Quadratic: {
            Mat K = Mat::Identity(n_, n_) + gamma * Q_;
            return K.llt().solve(x + gamma * a_);
        }
        case Kind::SupportOfBox: {
            Vec y = x / gamma;
            return x - gamma * clamp_box(y, lo_, hi_);
        }
        case Kind::Zero: return x;
        case Kind::Linear: return x - gamma * a_;
    }
    return x;
}

double ProxAtom::value(const Vec& x) const {
    require_dim(x, n_, "value(" + name() + ")");
    constexpr double feas = 1e-9;
    switch (kind_) {
        case Kind::HalfSpace: return a_.dot(x) <= s_ + feas ? 0.0 : kInf;
        case Kind::Box:
            for (Index i = 0; i < n_; ++i)
                if (x[i] < lo_[i] - feas || x[i] > hi_[i] + feas) return kInf;
            return 0.0;
        case Kind::Affine: return (Q_ * x - a_).norm() <= feas ? 0.0 : kInf;
        case Kind::Ball: return (x - a_).norm() <= s_ + feas ? 0.0 : kInf;
        case Kind::L1: return s_ * x.lpNorm<1>();
        case Kind::Quadratic: return 0.5 * x.dot(Q_ * x) - a_.dot(x);
        case Kind::SupportOfBox: {
            double v = 0.0;
            for (Index i = 0; i < n_; ++i) {
                if (x[i] > 0) v += x[i] * hi_[i];
                else if (x[i] < 0) v += x[i] * lo_[i];
            }
            return std::isnan(v) ? kInf : v;
        }
        case Kind::Zero: return 0.0;
        case Kind::Linear: return a_.dot(x);
    }
    return 0.0;
}

std::optional<Vec> ProxAtom::gradient(const Vec& x) const {
    switch (kind_) {
        case Kind::Quadratic: return Vec(Q_ * x - a_);
        case Kind::Zero: return Vec(Vec::Zero(n_));
        case Kind::Linear: return a_;
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------- nodes

namespace detail {

Vec Node::resolvent(double, const Vec&) const {
    throw ParameterError(describe() + " has no resolvent oracle");
}

Vec Node::forward(const Vec&) const {
    throw ParameterError(describe() + " is not single-valued (no forward evaluation)");
}

}  // namespace detail

namespace {

struct ProxNode final : detail::Node {
    ProxAtom f;
    explicit ProxNode(ProxAtom a) : f(std::move(a)) {}
    Index dim() const override { return f.dim(); }
    std::string describe() const override { return "∂" + f.name(); }
    bool has_resolvent() const override { return true; }
    Vec resolvent(double g, const Vec& x) const override { return f.prox(g, x); }
    bool has_forward() const override { return f.gradient(Vec::Zero(f.dim())).has_value(); }
    Vec forward(const Vec& x) const override {
        auto g = f.gradient(x);
        if (!g) return Node::forward(x);
        return *g;
    }
};

struct AffineNode final : detail::Node {
    Mat S;
    Vec b;
    bool skew = false;
    mutable std::mutex mu;
    mutable std::map<double, Eigen::PartialPivLU<Mat>> cache;

    AffineNode(Mat s, Vec off, bool sk) : S(std::move(s)), b(std::move(off)), skew(sk) {}
    Index dim() const override { return S.rows(); }
    std::string describe() const override { return skew ? "skew" : "affine"; }
    bool has_resolvent() const override { return true; }
    bool has_forward() const override { return true; }
    Vec forward(const Vec& x) const override {
        require_dim(x, dim(), describe() + " forward");
        return S * x + b;
    }
    Vec resolvent(double g, const Vec& x) const override {
        require_dim(x, dim(), describe() + " resolvent");
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(g);
        if (it == cache.end()) {
            Mat K = Mat::Identity(dim(), dim()) + g * S;
            it = cache.emplace(g, Eigen::PartialPivLU<Mat>(K)).first;
        }
        return it->second.solve(x - g * b);
    }
};

struct MapNode final : detail::Node {
    OperatorSpec::Map F;
    Index n;
    std::string label;
    MapNode(OperatorSpec::Map f, Index d, std::string l) : F(std::move(f)), n(d), label(std::move(l)) {}
    Index dim() const override { return n; }
    std::string describe() const override { return label; }
    bool has_forward() const override { return true; }
    Vec forward(const Vec& x) const override {
        require_dim(x, n, label + " forward");
        return F(x);
    }
};

struct ProductNode final : detail::Node {
    std::vector<OperatorSpec> fs;
    SpaceLayout lay;
    explicit ProductNode(std::vector<OperatorSpec> f) : fs(std::move(f)) {
        std::vector<Index> d;
        for (const auto& s : fs) d.push_back(s.dim());
        lay = SpaceLayout(d);
    }
    Index dim() const override { return lay.total_dim(); }
    SpaceLayout layout() const override { return lay; }
    std::string describe() const override {
        std::string s = "product(";
        for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? "," : "") + fs[i].describe();
        return s + ")";
    }
    bool has_resolvent() const override {
        return std::all_of(fs.begin(), fs.end(), [](const OperatorSpec& s) { return s.has_resolvent(); });
    }
    bool has_forward() const override {
        return std::all_of(fs.begin(), fs.end(), [](const OperatorSpec& s) { return s.has_forward(); });
    }
    Vec resolvent(double g, const Vec& x) const override {
        lay.check(x, "product resolvent argument");
        Vec out(x.size());
        for (std::size_t i = 0; i < fs.size(); ++i)
            out.segment(lay.offset(i), lay.dim(i)) = fs[i].resolvent(g, Vec(lay.block(x, i)));
        return out;
    }
    Vec forward(const Vec& x) const override {
        lay.check(x, "product forward argument");
        Vec out(x.size());
        for (std::size_t i = 0; i < fs.size(); ++i)
            out.segment(lay.offset(i), lay.dim(i)) = fs[i].forward(Vec(lay.block(x, i)));
        return out;
    }
};

struct InverseNode final : detail::Node {
    OperatorSpec M;
    explicit InverseNode(OperatorSpec m) : M(std::move(m)) {}
    Index dim() const override { return M.dim(); }
    SpaceLayout layout() const override { return M.layout(); }
    std::string describe() const override { return "(" + M.describe() + ")^{-1}"; }
    bool has_resolvent() const override { return M.has_resolvent(); }
    Vec resolvent(double g, const Vec& x) const override { return inverse_resolvent_eval(M, g, x); }
};

struct ScaledNode final : detail::Node {
    double c;
    OperatorSpec M;
    ScaledNode(double s, OperatorSpec m) : c(s), M(std::move(m)) {}
    Index dim() const override { return M.dim(); }
    SpaceLayout layout() const override { return M.layout(); }
    std::string describe() const override { return std::to_string(c) + "·" + M.describe(); }
    bool has_resolvent() const override { return M.has_resolvent(); }
    Vec resolvent(double g, const Vec& x) const override { return M.resolvent(g * c, x); }
    bool has_forward() const override { return M.has_forward(); }
    Vec forward(const Vec& x) const override { return c * M.forward(x); }
};

struct PartialInverseNode final : detail::Node {
    OperatorSpec M;
    Subspace V;
    PartialInverseNode(OperatorSpec m, Subspace v) : M(std::move(m)), V(std::move(v)) {}
    Index dim() const override { return M.dim(); }
    SpaceLayout layout() const override { return M.layout(); }
    std::string describe() const override { return "partial_inverse(" + M.describe() + ")"; }
    bool has_resolvent() const override { return M.has_resolvent(); }
    Vec resolvent(double g, const Vec& x) const override {
        if (g != 1.0) throw ParameterError("partial inverse resolvent is available at unit step only (γ = 1)");
        return partial_inverse_resolvent(M, V, x);
    }
};

struct YosidaNode final : detail::Node {
    OperatorSpec M;
    double rho;
    YosidaNode(OperatorSpec m, double r) : M(std::move(m)), rho(r) {}
    Index dim() const override { return M.dim(); }
    SpaceLayout layout() const override { return M.layout(); }
    std::string describe() const override { return "yosida(" + M.describe() + ")"; }
    bool has_resolvent() const override { return M.has_resolvent(); }
    // J_{γ ^ρM} = Id + γ/(γ+ρ)(J_{(γ+ρ)M} − Id)
    Vec resolvent(double g, const Vec& x) const override {
        Vec p = M.resolvent(g + rho, x);
        return x + (g / (g + rho)) * (p - x);
    }
    bool has_forward() const override { return M.has_resolvent(); }
    Vec forward(const Vec& x) const override { return yosida_eval(M, rho, x); }
};

struct NormalConeNode final : detail::Node {
    Subspace V;
    explicit NormalConeNode(Subspace v) : V(std::move(v)) {}
    Index dim() const override { return V.dim(); }
    std::string describe() const override { return "normal_cone(V)"; }
    bool has_resolvent() const override { return true; }
    Vec resolvent(double, const Vec& x) const override { return V.proj(x); }
};

struct ResolventMapNode final : detail::Node {
    OperatorSpec::Map J;
    Index n;
    ResolventMapNode(OperatorSpec::Map j, Index d) : J(std::move(j)), n(d) {}
    Index dim() const override { return n; }
    std::string describe() const override { return "resolvent_map"; }
    bool has_resolvent() const override { return true; }
    Vec resolvent(double g, const Vec& x) const override {
        if (g != 1.0) throw ParameterError("operator given by its resolvent supports γ = 1 only");
        require_dim(x, n, "resolvent_map");
        return J(x);
    }
};

}  // namespace

// ---------------------------------------------------------------- OperatorSpec

OperatorSpec OperatorSpec::prox(ProxAtom f) {
    return OperatorSpec(Kind::Prox, std::make_shared<ProxNode>(std::move(f)));
}

OperatorSpec OperatorSpec::affine(Mat S, Vec b) {
    if (S.rows() != S.cols()) throw DimensionError("affine operator must be square, got " + shape_str(S.rows(), S.cols()));
    if (b.size() != S.rows()) throw DimensionError("affine offset size mismatch");
    if (S.rows() > 0) {
        Mat H = 0.5 * (S + S.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff()))
            throw ParameterError("affine operator is not monotone (S + S* has a negative eigenvalue)");
    }
    return OperatorSpec(Kind::AffineMonotone, std::make_shared<AffineNode>(std::move(S), std::move(b), false));
}

OperatorSpec OperatorSpec::skew(Mat S) {
    if (S.rows() != S.cols()) throw DimensionError("skew operator must be square");
    if ((S + S.transpose()).cwiseAbs().maxCoeff() > sym_tol(S)) throw ParameterError("operator is not skew (S* ≠ −S)");
    Index n = S.rows();
    return OperatorSpec(Kind::Skew, std::make_shared<AffineNode>(std::move(S), Vec::Zero(n), true));
}

OperatorSpec OperatorSpec::cocoercive(Map F, double alpha, Index dim) {
    if (!(alpha > 0.0)) throw ParameterError("cocoercivity constant α must be > 0");
    OperatorSpec s(Kind::Cocoercive, std::make_shared<MapNode>(std::move(F), dim, "cocoercive"));
    s.coco_ = alpha;
    s.lip_ = 1.0 / alpha;
    return s;
}

OperatorSpec OperatorSpec::lipschitz(Map F, double beta, Index dim) {
    if (!(beta >= 0.0)) throw ParameterError("Lipschitz constant β must be >= 0");
    OperatorSpec s(Kind::LipMonotone, std::make_shared<MapNode>(std::move(F), dim, "lipschitz"));
    s.lip_ = beta;
    return s;
}

OperatorSpec OperatorSpec::product(std::vector<OperatorSpec> factors) {
    if (factors.empty()) throw DimensionError("product of zero operators");
    OperatorSpec s(Kind::Product, std::make_shared<ProductNode>(factors));
    bool all_c = true, all_l = true;
    double c = kInf, l = 0.0;
    for (const auto& f : factors) {
        if (f.coco_) c = std::min(c, *f.coco_); else all_c = false;
        if (f.lip_) l = std::max(l, *f.lip_); else all_l = false;
    }
    if (all_c) s.coco_ = c;
    if (all_l) s.lip_ = l;
    s.factors_ = std::move(factors);
    return s;
}

OperatorSpec OperatorSpec::inverse(OperatorSpec M) {
    return OperatorSpec(Kind::Inverse, std::make_shared<InverseNode>(std::move(M)));
}

OperatorSpec OperatorSpec::scaled(double c, OperatorSpec M) {
    if (!(c > 0.0)) throw ParameterError("scaling factor must be > 0");
    auto coco = M.coco_;
    auto lip = M.lip_;
    OperatorSpec s(Kind::Scaled, std::make_shared<ScaledNode>(c, std::move(M)));
    if (coco) s.coco_ = *coco / c;
    if (lip) s.lip_ = *lip * c;
    return s;
}

OperatorSpec OperatorSpec::partial_inverse(OperatorSpec M, Subspace V) {
    if (V.dim() != M.dim()) throw DimensionError("partial inverse: subspace dimension mismatch");
    return OperatorSpec(Kind::PartialInverse, std::make_shared<PartialInverseNode>(std::move(M), std::move(V)));
}

OperatorSpec OperatorSpec::yosida(OperatorSpec M, double gamma) {
    require_step(gamma, "yosida");
    OperatorSpec s(Kind::Yosida, std::make_shared<YosidaNode>(std::move(M), gamma));
    s.coco_ = gamma;
    s.lip_ = 1.0 / gamma;
    return s;
}

OperatorSpec OperatorSpec::normal_cone(Subspace V) {
    return OperatorSpec(Kind::NormalConeSubspace, std::make_shared<NormalConeNode>(std::move(V)));
}

OperatorSpec OperatorSpec::from_resolvent(Map J, Index dim) {
    return OperatorSpec(Kind::ResolventMap, std::make_shared<ResolventMapNode>(std::move(J), dim));
}

OperatorSpec OperatorSpec::zero(Index n) { return prox(ProxAtom::zero(n)); }

Vec OperatorSpec::resolvent(double gamma, const Vec& x) const {
    require_step(gamma, "resolvent");
    return node_->resolvent(gamma, x);
}

Vec OperatorSpec::forward(const Vec& x) const { return node_->forward(x); }

OperatorSpec OperatorSpec::with_cocoercivity(double alpha) const {
    if (!(alpha > 0.0)) throw ParameterError("cocoercivity constant α must be > 0");
    OperatorSpec s = *this;
    s.coco_ = alpha;
    if (!s.lip_) s.lip_ = 1.0 / alpha;
    return s;
}

OperatorSpec OperatorSpec::with_lipschitz(double beta) const {
    if (!(beta >= 0.0)) throw ParameterError("Lipschitz constant β must be >= 0");
    OperatorSpec s = *this;
    s.lip_ = beta;
    return s;
}

const Mat* OperatorSpec::affine_matrix() const {
    auto* a = dynamic_cast<const AffineNode*>(node_.get());
    return a ? &a->S : nullptr;
}

const Vec* OperatorSpec::affine_offset() const {
    auto* a = dynamic_cast<const AffineNode*>(node_.get());
    return a ? &a->b : nullptr;
}

// ---------------------------------------------------------------- calculus

Vec resolvent_eval(const OperatorSpec& M, double gamma, const Vec& x) { return M.resolvent(gamma, x); }

Vec yosida_eval(const OperatorSpec& M, double gamma, const Vec& x) {
    require_step(gamma, "yosida_eval");
    return (x - M.resolvent(gamma, x)) / gamma;
}

Vec inverse_resolvent_eval(const OperatorSpec& M, double gamma, const Vec& x) {
    require_step(gamma, "inverse_resolvent_eval");
    return x - gamma * M.resolvent(1.0 / gamma, x / gamma);
}

Vec moreau_conjugate_prox(const ProxAtom& f, double gamma, const Vec& x) {
    require_step(gamma, "moreau_conjugate_prox");
    return (x - f.prox(gamma, x)) / gamma;
}

Vec partial_inverse_resolvent(const OperatorSpec& A, const Subspace& V, const Vec& x) {
    Vec p = A.resolvent(1.0, x);
    return V.proj(p) + V.proj_perp(x - p);
}

Vec product_resolvent(const std::vector<OperatorSpec>& Ms, double gamma, const Vec& x) {
    return OperatorSpec::product(Ms).resolvent(gamma, x);
}

std::pair<Vec, Vec> graph_point_from_resolvent(const OperatorSpec& M, double gamma, const Vec& x) {
    Vec p = M.resolvent(gamma, x);
    Vec ps = (x - p) / gamma;
    return {std::move(p), std::move(ps)};
}

Vec warped_fb_resolvent(const OperatorSpec& A, const OperatorSpec& B, double gamma, const Vec& x) {
    require_step(gamma, "warped_fb_resolvent");
    return A.resolvent(gamma, x - gamma * B.forward(x));
}

// ---------------------------------------------------------------- audits

bool audit_monotone(const OperatorSpec::Map& F, Index dim, int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int p = 0; p < probes; ++p) {
        Vec x = gaussian(dim, rng), y = gaussian(dim, rng);
        double v = (x - y).dot(F(x) - F(y));
        if (v < -1e-10 * std::max(1.0, (x - y).squaredNorm())) return false;
    }
    return true;
}

bool audit_cocoercive(const OperatorSpec::Map& F, Index dim, double alpha, int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int p = 0; p < probes; ++p) {
        Vec x = gaussian(dim, rng), y = gaussian(dim, rng);
        Vec d = F(x) - F(y);
        double lhs = (x - y).dot(d), rhs = alpha * d.squaredNorm();
        if (lhs < rhs - 1e-10 * std::max(1.0, rhs)) return false;
    }
    return true;
}

bool audit_lipschitz(const OperatorSpec::Map& F, Index dim, double beta, int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int p = 0; p < probes; ++p) {
        Vec x = gaussian(dim, rng), y = gaussian(dim, rng);
        double lhs = (F(x) - F(y)).norm(), rhs = beta * (x - y).norm();
        if (lhs > rhs * (1.0 + 1e-10) + 1e-14) return false;
    }
    return true;
}

}  // namespace splitkit
