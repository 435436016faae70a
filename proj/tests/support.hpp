#pragma once

#include <splitkit/problems.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace splitkit::testing {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
    double unif(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    // Log-uniform on [lo, hi].
    double scale(double lo, double hi) { return std::exp(unif(std::log(lo), std::log(hi))); }

    Vec vec(Index n, double s = 1.0) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v(i) = s * gauss();
        return v;
    }
    Mat mat(Index r, Index c) {
        Mat m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = gauss();
        return m;
    }
    // K − K* + G*G + νI with G of rank ≤ r.
    Mat monotone(Index n, double nu, Index rank = -1) {
        Mat K = mat(n, n);
        Mat G = mat(rank < 0 ? n : rank, n);
        return K - K.transpose() + G.transpose() * G + nu * Mat::Identity(n, n);
    }
    Mat spd(Index n, double floor = 0.5) {
        Mat G = mat(n, n);
        return G.transpose() * G + floor * Mat::Identity(n, n);
    }
};

inline double max_step_gap(const std::vector<Vec>& a, const std::vector<Vec>& b, Index head = -1) {
    double worst = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        Vec u = head < 0 ? a[i] : Vec(a[i].head(head));
        Vec v = head < 0 ? b[i] : Vec(b[i].head(head));
        worst = std::max(worst, (u - v).cwiseAbs().maxCoeff());
    }
    return worst;
}

// max_n (‖x_{n+1} − z‖ − ‖x_n − z‖); ≤ 0 for a Fejér monotone sequence.
inline double fejer_drift(const std::vector<Vec>& xs, const Vec& z) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xs.size(); ++i) worst = std::max(worst, (xs[i] - z).norm() - (xs[i - 1] - z).norm());
    return worst;
}

// Orthogonal projector onto range(B).
inline Mat range_projector(const Mat& B) {
    Eigen::HouseholderQR<Mat> qr(B);
    Mat Q = qr.householderQ() * Mat::Identity(B.rows(), B.cols());
    return Q * Q.transpose();
}

}  // namespace splitkit::testing
