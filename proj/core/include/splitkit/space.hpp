#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Raised when an algorithm or operator parameter leaves its admissible range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised on incompatible shapes or product layouts.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Ordered list of factor dimensions of a product Hilbert space.
// Vectors are flat; the layout is passed alongside to slice them.
class SpaceLayout {
public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<Index> factors);
    static SpaceLayout single(Index n) { return SpaceLayout({n}); }

    Index total_dim() const { return total_; }
    std::size_t size() const { return dims_.size(); }
    Index dim(std::size_t i) const { return dims_.at(i); }
    Index offset(std::size_t i) const { return offsets_.at(i); }
    const std::vector<Index>& dims() const { return dims_; }

    Eigen::VectorBlock<Vec> block(Vec& v, std::size_t i) const;
    Eigen::VectorBlock<const Vec> block(const Vec& v, std::size_t i) const;

    std::vector<Vec> split(const Vec& v) const;
    Vec concat(const std::vector<Vec>& parts) const;

    // Concatenation of two layouts (factors of *this first).
    SpaceLayout join(const SpaceLayout& other) const;

    bool operator==(const SpaceLayout& o) const { return dims_ == o.dims_; }

    void check(const Vec& v, const char* what = "vector") const;

private:
    std::vector<Index> dims_;
    std::vector<Index> offsets_;
    Index total_ = 0;
};

// Bounded linear operator H -> G with adjoint.
// The adjoint defaults to the transpose; an explicit one may be supplied
// (used to model hand-written adjoints, which adjoint_consistency_check audits).
class LinOp {
public:
    LinOp() = default;
    explicit LinOp(Mat m) : m_(std::move(m)) {}
    LinOp(Mat m, Mat adjoint);

    static LinOp identity(Index n) { return LinOp(Mat::Identity(n, n)); }
    static LinOp zero(Index rows, Index cols) { return LinOp(Mat::Zero(rows, cols)); }

    Index rows() const { return m_.rows(); }
    Index cols() const { return m_.cols(); }

    Vec apply(const Vec& x) const;
    Vec adjoint_apply(const Vec& y) const;
    LinOp adjoint() const;

    const Mat& matrix() const { return m_; }
    Mat adjoint_matrix() const { return adj_ ? *adj_ : Mat(m_.transpose()); }
    bool has_explicit_adjoint() const { return adj_.has_value(); }

private:
    Mat m_;
    std::optional<Mat> adj_;
};

// Power-iteration bound on ‖L‖ with a 1.05 safety factor.
double estimate_operator_norm(const LinOp& L, int iters = 200, std::uint64_t seed = 0);

// max |⟨Lx,y⟩ − ⟨x,L*y⟩| / (‖x‖‖y‖) over random probes.
double adjoint_consistency_check(const LinOp& L, int trials = 16, std::uint64_t seed = 0);

// Self-adjoint strongly monotone U used to renorm the space: ⟨x,y⟩_U = ⟨Ux,y⟩.
class MetricKernel {
public:
    MetricKernel() = default;
    // β is computed as the smallest eigenvalue of U.
    explicit MetricKernel(Mat U);
    // Declared β; rejected if some probe violates ⟨Ux,x⟩ ≥ β‖x‖².
    MetricKernel(Mat U, double beta, int probes = 64, std::uint64_t seed = 0);

    static MetricKernel identity(Index n) { return MetricKernel(Mat::Identity(n, n)); }

    Index dim() const { return U_.rows(); }
    double beta() const { return beta_; }
    const Mat& matrix() const { return U_; }

    Vec apply(const Vec& x) const { return U_ * x; }
    double inner(const Vec& a, const Vec& b) const { return a.dot(U_ * b); }
    double norm2(const Vec& a) const { return inner(a, a); }

private:
    Mat U_;
    double beta_ = 0.0;
};

std::string shape_str(Index rows, Index cols);

}  // namespace splitkit
