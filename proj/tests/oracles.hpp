#pragma once

// Dense reference implementations used as independent oracles. Nothing here calls
// into the library; every formula is written out from its definition.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using std::numbers::pi;

/// sum_k exp(sign * 2 pi i jk/m) v_k / sqrt(m).
inline std::vector<cplx> dft(const std::vector<cplx>& v, int sign) {
    const std::size_t m = v.size();
    std::vector<cplx> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            s += std::polar(1.0, sign * 2.0 * pi * static_cast<double>(j * k % m) / static_cast<double>(m)) * v[k];
        out[j] = s / std::sqrt(static_cast<double>(m));
    }
    return out;
}

inline Eigen::MatrixXd sine_matrix(std::size_t m) {
    Eigen::MatrixXd s(m, m);
    const double c = std::sqrt(2.0 / static_cast<double>(m + 1));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            s(i, j) = c * std::sin(static_cast<double>((i + 1) * (j + 1)) * pi / static_cast<double>(m + 1));
    return s;
}

inline Eigen::MatrixXd tridiag(std::size_t m, double lower, double diag, double upper) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        t(i, i) = diag;
        if (i > 0) t(i, i - 1) = lower;
        if (i + 1 < m) t(i, i + 1) = upper;
    }
    return t;
}

template <class A, class B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(const A& a, const B& b) {
    Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// R_eps = sum_j r_j Z^j with Z the eps-shift (ones below the diagonal, eps in the corner),
/// so Z^N = eps I and coefficients with j >= N fold back with an extra factor eps.
inline Eigen::MatrixXd r_eps(const std::vector<double>& r, std::size_t n, double eps) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 1; i < n; ++i) z(i, i - 1) = 1.0;
    z(0, n - 1) += eps;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n), power = Eigen::MatrixXd::Identity(n, n);
    for (double c : r) {
        out += c * power;
        power = z * power;
    }
    return out;
}

/// R kron M + tau I kron K.
inline Eigen::MatrixXd all_at_once(const Eigen::MatrixXd& r, const Eigen::MatrixXd& m, const Eigen::MatrixXd& k,
                                   double tau) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(r.rows(), r.cols());
    return kron(r, m) + tau * kron(id, k);
}

/// 5-point -div(a grad u) on [lo,hi]^2 with a at edge midpoints, h = (hi-lo)/(m+1), x fastest.
template <class F>
Eigen::MatrixXd fd_stiffness(std::size_t m, F a, double lo = 0.0, double hi = 1.0) {
    const double h = (hi - lo) / static_cast<double>(m + 1);
    const std::size_t n = m * m;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    auto x = [&](double i) { return lo + (i + 1.0) * h; };
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t row = i + m * j;
            const double xi = x(static_cast<double>(i)), yj = x(static_cast<double>(j));
            const double ae = a(xi + h / 2, yj), aw = a(xi - h / 2, yj), an = a(xi, yj + h / 2), as = a(xi, yj - h / 2);
            k(row, row) = (ae + aw + an + as) / (h * h);
            if (i + 1 < m) k(row, row + 1) = -ae / (h * h);
            if (i > 0) k(row, row - 1) = -aw / (h * h);
            if (j + 1 < m) k(row, row + m) = -an / (h * h);
            if (j > 0) k(row, row - m) = -as / (h * h);
        }
    return k;
}

inline std::vector<double> random_vector(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& e : v) e = nd(rng);
    return v;
}

inline std::vector<cplx> random_complex(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> v(n);
    for (auto& e : v) e = {nd(rng), nd(rng)};
    return v;
}

inline Eigen::Map<const Eigen::VectorXd> view(const std::vector<double>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline Eigen::Map<const Eigen::VectorXcd> view(const std::vector<cplx>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

template <class V>
double rel_diff(const V& a, const V& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace oracle
