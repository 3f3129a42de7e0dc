#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mslant/immersion.hpp"
#include "mslant/metallic.hpp"

namespace testing_support {

// xorshift64* stream for property tests; independent of the library's generator.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545f4914f6cdd1dULL;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Eigen::VectorXd vector(Eigen::Index n, double lo = -1.0, double hi = 1.0) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }
    Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j) m.col(j) = vector(r);
        return m;
    }
    Eigen::MatrixXd orthogonal(Eigen::Index n) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix(n, n));
        return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    }

private:
    std::uint64_t s_;
};

// Metallic operator with a random orthogonal eigenbasis and `minus` copies of sigma_bar.
inline Eigen::MatrixXd random_metallic(Gen& g, Eigen::Index n, Eigen::Index minus, const mslant::MetallicParams& prm) {
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = i < minus ? prm.sigma_bar : prm.sigma;
    const Eigen::MatrixXd Q = g.orthogonal(n);
    return Q * d.asDiagonal() * Q.transpose();
}

inline double golden() { return (1.0 + std::sqrt(5.0)) / 2.0; }

// Hand-written coordinate fields of f(u,t1,t2) = (u cos t1, u sin t1, u cos t2, u sin t2, u, t1, t2).
inline Eigen::MatrixXd example1_jacobian(double u, double t1, double t2) {
    Eigen::MatrixXd Z(7, 3);
    Z.col(0) << std::cos(t1), std::sin(t1), std::cos(t2), std::sin(t2), 1, 0, 0;
    Z.col(1) << -u * std::sin(t1), u * std::cos(t1), 0, 0, 0, 1, 0;
    Z.col(2) << 0, 0, -u * std::sin(t2), u * std::cos(t2), 0, 0, 1;
    return Z;
}

inline Eigen::MatrixXd example1_structure(const mslant::MetallicParams& prm) {
    const double s = prm.sigma, b = prm.sigma_bar;
    Eigen::VectorXd d(7);
    d << s, s, b, b, b, s, b;
    return d.asDiagonal();
}

inline mslant::Immersion example1_immersion(const mslant::MetallicParams& prm) {
    const double top = std::acos(-1.0) / 2 - 0.01;
    return mslant::Immersion::parse({"u", "t1", "t2"},
                                    {"u*cos(t1)", "u*sin(t1)", "u*cos(t2)", "u*sin(t2)", "u", "t1", "t2"},
                                    {{0.5, 3.0}, {0.0, top}, {0.0, top}}, prm);
}

// Orthogonal projector onto the column span of A, by an independent SVD.
inline Eigen::MatrixXd span_projector(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
    const Eigen::MatrixXd U = svd.matrixU();
    return U * U.transpose();
}

}  // namespace testing_support
