#include "splitkit/space.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace splitkit {

std::string shape_str(Index rows, Index cols) {
    std::ostringstream os;
    os << rows << "x" << cols;
    return os.str();
}

SpaceLayout::SpaceLayout(std::vector<Index> factors) : dims_(std::move(factors)) {
    offsets_.reserve(dims_.size());
    for (Index d : dims_) {
        if (d < 0) throw DimensionError("negative factor dimension");
        offsets_.push_back(total_);
        total_ += d;
    }
}

void SpaceLayout::check(const Vec& v, const char* what) const {
    if (v.size() != total_) {
        std::ostringstream os;
        os << what << " has dimension " << v.size() << ", layout expects " << total_;
        throw DimensionError(os.str());
    }
}

Eigen::VectorBlock<Vec> SpaceLayout::block(Vec& v, std::size_t i) const {
    check(v);
    return v.segment(offsets_.at(i), dims_.at(i));
}

Eigen::VectorBlock<const Vec> SpaceLayout::block(const Vec& v, std::size_t i) const {
    check(v);
    return v.segment(offsets_.at(i), dims_.at(i));
}

std::vector<Vec> SpaceLayout::split(const Vec& v) const {
    check(v);
    std::vector<Vec> out;
    out.reserve(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) out.emplace_back(v.segment(offsets_[i], dims_[i]));
    return out;
}

Vec SpaceLayout::concat(const std::vector<Vec>& parts) const {
    if (parts.size() != dims_.size())
        throw DimensionError("concat: expected " + std::to_string(dims_.size()) + " factors, got " +
                             std::to_string(parts.size()));
    Vec out(total_);
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (parts[i].size() != dims_[i])
            throw DimensionError("concat: factor " + std::to_string(i) + " has dimension " +
                                 std::to_string(parts[i].size()) + ", expected " + std::to_string(dims_[i]));
        out.segment(offsets_[i], dims_[i]) = parts[i];
    }
    return out;
}

SpaceLayout SpaceLayout::join(const SpaceLayout& other) const {
    std::vector<Index> d = dims_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    return SpaceLayout(std::move(d));
}

LinOp::LinOp(Mat m, Mat adjoint) : m_(std::move(m)), adj_(std::move(adjoint)) {
    if (adj_->rows() != m_.cols() || adj_->cols() != m_.rows())
        throw DimensionError("adjoint shape " + shape_str(adj_->rows(), adj_->cols()) + " does not match operator " +
                             shape_str(m_.rows(), m_.cols()));
}

Vec LinOp::apply(const Vec& x) const {
    if (x.size() != m_.cols())
        throw DimensionError("LinOp::apply: operator " + shape_str(m_.rows(), m_.cols()) + " applied to vector of size " +
                             std::to_string(x.size()));
    return m_ * x;
}

Vec LinOp::adjoint_apply(const Vec& y) const {
    if (y.size() != m_.rows())
        throw DimensionError("LinOp::adjoint_apply: operator " + shape_str(m_.rows(), m_.cols()) +
                             " adjoint applied to vector of size " + std::to_string(y.size()));
    if (adj_) return *adj_ * y;
    return m_.transpose() * y;
}

LinOp LinOp::adjoint() const {
    if (adj_) return LinOp(*adj_, m_);
    return LinOp(Mat(m_.transpose()));
}

namespace {

Vec gaussian(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
}

}  // namespace

double estimate_operator_norm(const LinOp& L, int iters, std::uint64_t seed) {
    if (L.rows() == 0 || L.cols() == 0) return 0.0;
    std::mt19937_64 rng(seed);
    Vec x = gaussian(L.cols(), rng);
    x.normalize();
    double est = 0.0;
    for (int k = 0; k < iters; ++k) {
        Vec y = L.adjoint_apply(L.apply(x));
        double nrm = y.norm();
        if (nrm == 0.0) break;
        x = y / nrm;
    }
    est = L.apply(x).norm();
    return 1.05 * est;
}

double adjoint_consistency_check(const LinOp& L, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vec x = gaussian(L.cols(), rng);
        Vec y = gaussian(L.rows(), rng);
        double lhs = L.apply(x).dot(y);
        double rhs = x.dot(L.adjoint_apply(y));
        double scale = x.norm() * y.norm();
        if (scale > 0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

namespace {

void check_symmetric(const Mat& U) {
    if (U.rows() != U.cols()) throw DimensionError("metric kernel must be square, got " + shape_str(U.rows(), U.cols()));
    double scale = std::max(1.0, U.cwiseAbs().maxCoeff());
    if ((U - U.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ParameterError("metric kernel is not self-adjoint");
}

}  // namespace

MetricKernel::MetricKernel(Mat U) : U_(std::move(U)) {
    check_symmetric(U_);
    Eigen::SelfAdjointEigenSolver<Mat> es(U_, Eigen::EigenvaluesOnly);
    beta_ = es.eigenvalues().minCoeff();
    if (!(beta_ > 0.0)) throw ParameterError("metric kernel is not strongly monotone (smallest eigenvalue <= 0)");
}

MetricKernel::MetricKernel(Mat U, double beta, int probes, std::uint64_t seed) : U_(std::move(U)), beta_(beta) {
    check_symmetric(U_);
    if (!(beta_ > 0.0)) throw ParameterError("metric kernel constant β must be > 0");
    std::mt19937_64 rng(seed);
    for (int p = 0; p < probes; ++p) {
        Vec x = gaussian(U_.rows(), rng);
        double q = x.dot(U_ * x);
        if (q < beta_ * x.squaredNorm() * (1.0 - 1e-12))
            throw ParameterError("metric kernel probe violates ⟨Ux,x⟩ ≥ β‖x‖²");
    }
}

}  // namespace splitkit
