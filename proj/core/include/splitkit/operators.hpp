#pragma once

#include "splitkit/space.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace splitkit {

// Closed linear subspace V of R^n, held through its orthogonal projector.
class Subspace {
public:
    Subspace() = default;
    static Subspace span(const Mat& basis);           // V = range(basis)
    static Subspace kernel(const Mat& A);             // V = {x : Ax = 0}
    static Subspace from_projector(Mat P);            // P symmetric idempotent
    static Subspace whole(Index n) { return from_projector(Mat::Identity(n, n)); }
    static Subspace trivial(Index n) { return from_projector(Mat::Zero(n, n)); }
    // Graph {(x, L_1x, ..., L_m x)} in H ⊕ G_1 ⊕ ... ⊕ G_m.
    static Subspace graph(const std::vector<LinOp>& L, Index n);

    Index dim() const { return P_.rows(); }
    Vec proj(const Vec& x) const;
    Vec proj_perp(const Vec& x) const;
    const Mat& projector() const { return P_; }

private:
    Mat P_;
};

// Proper lsc convex function with a closed-form proximity operator.
class ProxAtom {
public:
    enum class Kind { HalfSpace, Box, Affine, Ball, L1, Quadratic, SupportOfBox, Zero, Linear };

    static ProxAtom halfspace(Vec a, double b);         // ι of {⟨a,x⟩ ≤ b}
    static ProxAtom box(Vec lo, Vec hi);                // ι of [lo,hi], infinite bounds allowed
    static ProxAtom affine(Mat A, Vec b);               // ι of {Ax = b}
    static ProxAtom ball(Vec center, double radius);    // ι of closed ball
    static ProxAtom l1(double weight, Index n);         // w‖x‖₁
    static ProxAtom quadratic(Mat Q, Vec b);            // ½⟨Qx,x⟩ − ⟨b,x⟩, Q symmetric ⪰ 0
    static ProxAtom support_of_box(Vec lo, Vec hi);     // σ of [lo,hi]
    static ProxAtom zero(Index n);
    static ProxAtom linear(Vec c);                      // ⟨c,x⟩

    Kind kind() const { return kind_; }
    Index dim() const { return n_; }
    std::string name() const;

    Vec prox(double gamma, const Vec& x) const;
    double value(const Vec& x) const;  // +inf outside the domain
    std::optional<Vec> gradient(const Vec& x) const;  // smooth atoms only

    const Vec& a() const { return a_; }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }
    const Mat& Q() const { return Q_; }
    double scalar() const { return s_; }

private:
    Kind kind_ = Kind::Zero;
    Index n_ = 0;
    Vec a_, lo_, hi_;
    Mat Q_, Apinv_;
    double s_ = 0.0;
};

class OperatorSpec;

namespace detail {

struct Node {
    virtual ~Node() = default;
    virtual Index dim() const = 0;
    virtual std::string describe() const = 0;
    virtual bool has_resolvent() const { return false; }
    virtual Vec resolvent(double gamma, const Vec& x) const;
    virtual bool has_forward() const { return false; }
    virtual Vec forward(const Vec& x) const;
    virtual SpaceLayout layout() const { return SpaceLayout::single(dim()); }
};

}  // namespace detail

// Declarative maximally monotone operator.
class OperatorSpec {
public:
    using Map = std::function<Vec(const Vec&)>;

    enum class Kind {
        Prox, AffineMonotone, Skew, Cocoercive, LipMonotone, Product, Inverse,
        Scaled, PartialInverse, Yosida, NormalConeSubspace, ResolventMap
    };

    OperatorSpec() = default;

    static OperatorSpec prox(ProxAtom f);
    // x ↦ Sx + b with S + S* ⪰ 0.
    static OperatorSpec affine(Mat S, Vec b);
    static OperatorSpec affine(Mat S) { Index n = S.rows(); return affine(std::move(S), Vec::Zero(n)); }
    static OperatorSpec skew(Mat S);
    static OperatorSpec cocoercive(Map F, double alpha, Index dim);
    static OperatorSpec lipschitz(Map F, double beta, Index dim);
    static OperatorSpec product(std::vector<OperatorSpec> factors);
    static OperatorSpec inverse(OperatorSpec M);
    static OperatorSpec scaled(double c, OperatorSpec M);
    static OperatorSpec partial_inverse(OperatorSpec M, Subspace V);
    static OperatorSpec yosida(OperatorSpec M, double gamma);
    static OperatorSpec normal_cone(Subspace V);
    // Operator known only through its resolvent at unit step.
    static OperatorSpec from_resolvent(Map J, Index dim);
    static OperatorSpec zero(Index n);

    Kind kind() const { return kind_; }
    bool empty() const { return !node_; }
    Index dim() const { return node_->dim(); }
    SpaceLayout layout() const { return node_->layout(); }
    std::string describe() const { return node_->describe(); }

    bool has_resolvent() const { return node_->has_resolvent(); }
    bool has_forward() const { return node_->has_forward(); }
    Vec resolvent(double gamma, const Vec& x) const;
    Vec forward(const Vec& x) const;

    std::optional<double> cocoercivity() const { return coco_; }
    std::optional<double> lipschitz() const { return lip_; }
    // Returns a copy with the declared constant attached.
    OperatorSpec with_cocoercivity(double alpha) const;
    OperatorSpec with_lipschitz(double beta) const;

    const detail::Node& node() const { return *node_; }
    const std::vector<OperatorSpec>& factors() const { return factors_; }
    // Affine data, when kind() is AffineMonotone or Skew.
    const Mat* affine_matrix() const;
    const Vec* affine_offset() const;

private:
    OperatorSpec(Kind k, std::shared_ptr<detail::Node> n) : kind_(k), node_(std::move(n)) {}
    Kind kind_ = Kind::Prox;
    std::shared_ptr<detail::Node> node_;
    std::vector<OperatorSpec> factors_;
    std::optional<double> coco_, lip_;
};

// J_{γM}x.
Vec resolvent_eval(const OperatorSpec& M, double gamma, const Vec& x);
// (x − J_{γM}x)/γ.
Vec yosida_eval(const OperatorSpec& M, double gamma, const Vec& x);
// J_{γM^{-1}}x = x − γ J_{γ^{-1}M}(x/γ).
Vec inverse_resolvent_eval(const OperatorSpec& M, double gamma, const Vec& x);
// prox_{f*/γ}(x/γ) = (x − prox_{γf}x)/γ.
Vec moreau_conjugate_prox(const ProxAtom& f, double gamma, const Vec& x);
// J_{M_V}x = P_V J_M x + P_{V⊥}(x − J_M x).
Vec partial_inverse_resolvent(const OperatorSpec& A, const Subspace& V, const Vec& x);
Vec product_resolvent(const std::vector<OperatorSpec>& Ms, double gamma, const Vec& x);
// (p, p*) = (J_{γM}x, (x − J_{γM}x)/γ) ∈ gra M.
std::pair<Vec, Vec> graph_point_from_resolvent(const OperatorSpec& M, double gamma, const Vec& x);
// J_{γA}(x − γBx).
Vec warped_fb_resolvent(const OperatorSpec& A, const OperatorSpec& B, double gamma, const Vec& x);

// Probe-based audits. Each returns false when some probe contradicts the claim.
bool audit_monotone(const OperatorSpec::Map& F, Index dim, int probes = 64, std::uint64_t seed = 0);
bool audit_cocoercive(const OperatorSpec::Map& F, Index dim, double alpha, int probes = 64, std::uint64_t seed = 0);
bool audit_lipschitz(const OperatorSpec::Map& F, Index dim, double beta, int probes = 64, std::uint64_t seed = 0);

void require_step(double gamma, const char* who);

}  // namespace splitkit
