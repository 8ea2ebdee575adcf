#include "bec/error.hpp"
#include "bec/transforms.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using bec::cplx;
using bec::FourierDirection;
using bec::FourierPlan;
using bec::SinePlan;

namespace {

double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return std::sqrt(s);
}

TEST(Fourier, ForwardOfFirstUnitVectorIsConstant) {
    FourierPlan fwd(2, FourierDirection::Forward);
    std::vector<cplx> e0{1.0, 0.0};
    const auto out = bec::fft_apply(fwd, e0);
    EXPECT_NEAR(out[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(out[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(out[0].imag(), 0.0, 1e-15);
    EXPECT_NEAR(out[1].imag(), 0.0, 1e-15);

    for (std::size_t m : {3u, 8u, 17u}) {
        std::vector<cplx> e(m, 0.0);
        e[0] = 1.0;
        for (auto dir : {FourierDirection::Forward, FourierDirection::Inverse})
            for (const auto& x : bec::fft_apply(FourierPlan(m, dir), e))
                EXPECT_NEAR(std::abs(x - 1.0 / std::sqrt(double(m))), 0.0, 1e-15);
    }
}

TEST(Fourier, InverseUndoesForward) {
    FourierPlan fwd(4, FourierDirection::Forward), inv(4, FourierDirection::Inverse);
    const auto v = oracle::random_complex(4, 1);
    EXPECT_LT(oracle::rel_diff(bec::fft_apply(inv, bec::fft_apply(fwd, v)), v), 1e-13);
}

TEST(Fourier, MatchesNaiveSummation) {
    for (std::size_t m = 1; m <= 64; ++m) {
        const auto v = oracle::random_complex(m, static_cast<unsigned>(m));
        EXPECT_LT(oracle::rel_diff(bec::fft_apply(FourierPlan(m, FourierDirection::Forward), v), oracle::dft(v, -1)),
                  1e-12)
            << "m = " << m;
        EXPECT_LT(oracle::rel_diff(bec::fft_apply(FourierPlan(m, FourierDirection::Inverse), v), oracle::dft(v, +1)),
                  1e-12)
            << "m = " << m;
    }
}

TEST(Fourier, PreservesNorm) {
    for (std::size_t m : {1u, 2u, 5u, 16u, 31u, 64u, 100u}) {
        const auto v = oracle::random_complex(m, 7u + static_cast<unsigned>(m));
        for (auto dir : {FourierDirection::Forward, FourierDirection::Inverse}) {
            const auto out = bec::fft_apply(FourierPlan(m, dir), v);
            EXPECT_NEAR(norm2(out) / norm2(v), 1.0, 1e-13);
        }
    }
}

TEST(Fourier, StridedBatchMatchesSingleTransforms) {
    // Three interleaved sequences of length 5: element i of sequence b at b + 3i.
    const std::size_t m = 5, count = 3;
    FourierPlan batched(m, FourierDirection::Forward, {count, count, 1});
    FourierPlan single(m, FourierDirection::Forward);
    auto data = oracle::random_complex(m * count, 11);
    const auto original = data;
    batched.apply(data);
    for (std::size_t b = 0; b < count; ++b) {
        std::vector<cplx> seq(m);
        for (std::size_t i = 0; i < m; ++i) seq[i] = original[b + count * i];
        const auto ref = oracle::dft(seq, -1);
        for (std::size_t i = 0; i < m; ++i) EXPECT_LT(std::abs(data[b + count * i] - ref[i]), 1e-13);
    }
}

TEST(Fourier, RejectsLengthMismatch) {
    FourierPlan plan(8, FourierDirection::Forward);
    std::vector<cplx> v(7);
    EXPECT_THROW(bec::fft_apply(plan, v), bec::ContractError);
}

TEST(Sine, MatchesNaiveMatrix) {
    for (std::size_t m = 1; m <= 64; ++m) {
        const auto v = oracle::random_vector(m, static_cast<unsigned>(m));
        const Eigen::VectorXd ref = oracle::sine_matrix(m) * oracle::view(v);
        const auto out = bec::dst1_apply(SinePlan(m), v);
        EXPECT_LT((oracle::view(out) - ref).norm() / ref.norm(), 1e-12) << "m = " << m;
    }
}

TEST(Sine, IsInvolutory) {
    for (std::size_t m = 1; m <= 64; ++m) {
        SinePlan plan(m);
        const auto v = oracle::random_vector(m, 100u + static_cast<unsigned>(m));
        EXPECT_LT(oracle::rel_diff(bec::dst1_apply(plan, bec::dst1_apply(plan, v)), v), 1e-13);
    }
}

TEST(Sine, DiagonalizesSecondDifference) {
    const std::size_t m = 15;
    const Eigen::MatrixXd t = oracle::tridiag(m, -1.0, 2.0, -1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    SinePlan plan(m);
    for (std::size_t k = 1; k <= m; ++k) {
        std::vector<double> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = std::sin(double((j + 1) * k) * std::numbers::pi / double(m + 1));
        const Eigen::VectorXd vv = oracle::view(v);

        const double expected = 2.0 - 2.0 * std::cos(double(k) * std::numbers::pi / double(m + 1));
        EXPECT_LT((t * vv - expected * vv).norm(), 1e-12 * vv.norm());
        // Eigenvalues come back ascending, so mode k is the (k-1)-th.
        EXPECT_NEAR(eig.eigenvalues()(static_cast<Eigen::Index>(k - 1)), expected, 1e-12);

        const auto s = bec::dst1_apply(plan, v);
        for (std::size_t i = 0; i < m; ++i) {
            const double want = (i + 1 == k) ? vv.norm() : 0.0;
            EXPECT_NEAR(std::abs(s[i]), want, 1e-12);
        }
    }
}

TEST(Sine, RejectsLengthMismatch) {
    SinePlan plan(7);
    std::vector<double> v(8);
    EXPECT_THROW(bec::dst1_apply(plan, v), bec::ContractError);
}

}  // namespace
