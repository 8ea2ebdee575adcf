#include "bec/discretization.hpp"
#include "bec/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

using namespace bec;

namespace {

const WindField circulating = [](double x, double y) {
    return std::array<double, 2>{2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - y * y)};
};

SparseMatrix from_dense(const Eigen::MatrixXd& a) { return SparseMatrix(SparseMatrix::Storage(a.sparseView())); }

Eigen::MatrixXd random_spd(Eigen::Index n, unsigned seed) {
    std::srand(seed);
    const Eigen::MatrixXd b = Eigen::MatrixXd::Random(n, n);
    return b * b.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

std::shared_ptr<const SpatialPair> dense_pair(const Eigen::MatrixXd& m, const Eigen::MatrixXd& k) {
    auto pair = std::make_shared<SpatialPair>();
    pair->M = from_dense(m);
    pair->K = from_dense(k);
    return pair;
}

AllAtOnceSystem bare_system(std::shared_ptr<const SpatialPair> pair, int order, std::size_t steps, double T) {
    const std::size_t j = pair->size();
    return AllAtOnceSystem(std::move(pair), bdf_stencil(order), steps, T, std::vector<double>(steps * j, 0.0),
                           std::vector<double>(j, 0.0));
}

TEST(HeatFd, CenterRowOfUnitCoefficientStencil) {
    const auto pair = build_heat_fd(Grid2D::unit_square(3), 1.0);
    const Eigen::MatrixXd k = pair.K.to_dense();
    const Eigen::Index c = 4;  // (1,1)
    EXPECT_DOUBLE_EQ(k(c, c), 64.0);
    for (Eigen::Index nb : {1, 3, 5, 7}) EXPECT_DOUBLE_EQ(k(c, nb), -16.0);
    EXPECT_EQ((k.row(c).array() != 0.0).count(), 5);
    EXPECT_TRUE((pair.M.to_dense() - Eigen::MatrixXd::Identity(9, 9)).isZero(0.0));
}

TEST(HeatFd, LinearInCoefficient) {
    const auto grid = Grid2D::unit_square(6);
    const Eigen::MatrixXd k1 = build_heat_fd(grid, 1.0).K.to_dense();
    const Eigen::MatrixXd k3 = build_heat_fd(grid, 3.5).K.to_dense();
    EXPECT_LT((k3 - 3.5 * k1).cwiseAbs().maxCoeff(), 1e-12 * k3.cwiseAbs().maxCoeff());
}

TEST(HeatFd, VariableCoefficientMatchesOracleAndIsSpd) {
    auto a = [](double x, double) { return 1.0 + x; };
    const auto pair = build_heat_fd(Grid2D::unit_square(4), Coefficient(std::function<double(double, double)>(a)));
    const Eigen::MatrixXd k = pair.K.to_dense();
    EXPECT_LT((k - oracle::fd_stiffness(4, a)).norm(), 1e-12 * k.norm());
    EXPECT_EQ(pair.K.asymmetry(), 0.0);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff(), 0.0);
    EXPECT_TRUE(pair.symmetric_K);
    EXPECT_FALSE(pair.fst_diagonalizable());
}

TEST(HeatFd, RejectsNonPositiveCoefficient) {
    EXPECT_THROW(build_heat_fd(Grid2D::unit_square(3), 0.0), DomainError);
    EXPECT_THROW(build_heat_fd(Grid2D::unit_square(3), Coefficient(std::function<double(double, double)>(
                                                           [](double x, double) { return x - 0.5; }))),
                 DomainError);
}

TEST(HeatQ1, MassAndStiffnessStencils) {
    const std::size_t m = 5;
    const auto pair = build_heat_q1(Grid2D::unit_square(m), 1.0);
    const double h = 1.0 / double(m + 1);
    const Eigen::MatrixXd mass = pair.M.to_dense(), stiff = pair.K.to_dense();
    const Eigen::Index c = 2 + 5 * 2;
    const double ms[3][3] = {{1, 4, 1}, {4, 16, 4}, {1, 4, 1}};
    const double ks[3][3] = {{-1, -1, -1}, {-1, 8, -1}, {-1, -1, -1}};
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            const Eigen::Index col = c + di + 5 * dj;
            EXPECT_NEAR(mass(c, col), h * h / 36.0 * ms[dj + 1][di + 1], 1e-16);
            EXPECT_NEAR(stiff(c, col), ks[dj + 1][di + 1] / 3.0, 1e-14);
        }

    const Eigen::MatrixXd t = oracle::tridiag(m, 1, 4, 1) * (h / 6.0);
    const Eigen::MatrixXd l = oracle::tridiag(m, -1, 2, -1) / h;
    EXPECT_LT((mass - oracle::kron(t, t)).norm(), 1e-14 * mass.norm());
    EXPECT_LT((stiff - oracle::kron(l, t) - oracle::kron(t, l)).norm(), 1e-13 * stiff.norm());
}

TEST(HeatQ1, SineBasisDiagonalizesBothMatrices) {
    const std::size_t m = 7;
    const auto pair = build_heat_q1(Grid2D::unit_square(m), 2.0);
    ASSERT_TRUE(pair.fst_diagonalizable());
    const Eigen::MatrixXd s = oracle::kron(oracle::sine_matrix(m), oracle::sine_matrix(m));
    const Eigen::MatrixXd dm = s * pair.M.to_dense() * s, dk = s * pair.K.to_dense() * s;
    const double h = 1.0 / double(m + 1);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            const auto idx = static_cast<Eigen::Index>(i + m * j);
            const double ti = 4.0 + 2.0 * std::cos(double(i + 1) * std::numbers::pi / double(m + 1));
            const double tj = 4.0 + 2.0 * std::cos(double(j + 1) * std::numbers::pi / double(m + 1));
            EXPECT_NEAR(dm(idx, idx), h * h / 36.0 * ti * tj, 1e-12);
            EXPECT_NEAR(pair.spectrum->mass[std::size_t(idx)], dm(idx, idx), 1e-12);
            EXPECT_NEAR(pair.spectrum->stiffness[std::size_t(idx)], dk(idx, idx), 1e-11);
        }
    Eigen::MatrixXd offm = dm, offk = dk;
    offm.diagonal().setZero();
    offk.diagonal().setZero();
    EXPECT_LT(offm.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(offk.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HeatQ1, MassConditionNumberIsBounded) {
    // kappa(M) = ((4 + 2cos(pi h)) / (4 - 2cos(pi h)))^2 increases toward 9 as h -> 0.
    std::vector<double> kappas;
    for (std::size_t m : {7u, 15u, 31u}) {
        const Eigen::VectorXd ev =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(build_heat_q1(Grid2D::unit_square(m), 1.0).M.to_dense())
                .eigenvalues();
        const double kappa = ev.maxCoeff() / ev.minCoeff();
        const double c = std::cos(std::numbers::pi / double(m + 1));
        EXPECT_NEAR(kappa, std::pow((4 + 2 * c) / (4 - 2 * c), 2), 1e-8 * kappa);
        EXPECT_LT(kappa, 9.0);
        kappas.push_back(kappa);
    }
    EXPECT_LT(kappas[2] / kappas[1] - 1.0, 0.05);
    EXPECT_LT(kappas[2] / kappas[1], kappas[1] / kappas[0]);
}

TEST(HeatPairs, StepMatrixSpectrumAboveOne) {
    const double tau = 0.05;
    for (const auto& pair : {build_heat_q1(Grid2D::unit_square(5), 1.0), build_heat_fd(Grid2D::unit_square(5), 1.0),
                             build_heat_fd(Grid2D::unit_square(4), Coefficient(std::function<double(double, double)>(
                                                                       [](double x, double y) { return 1 + x * y; })))}) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(pair.step_matrix(tau).to_dense(),
                                                                      pair.M.to_dense());
        EXPECT_GT(ges.eigenvalues().minCoeff(), 1.0);
    }
}

TEST(ConvDiff, ZeroWindIsScaledLaplacian) {
    const double nu = 1.0 / 200.0;
    const auto grid = Grid2D::square(6, -1.0, 1.0);
    const auto pair = build_convdiff(grid, nu, [](double, double) { return std::array<double, 2>{0.0, 0.0}; });
    const Eigen::MatrixXd ref = oracle::fd_stiffness(6, [nu](double, double) { return nu; }, -1.0, 1.0);
    EXPECT_LT((pair.K.to_dense() - ref).norm(), 1e-14 * ref.norm());
    EXPECT_FALSE(pair.fst_diagonalizable());
}

TEST(ConvDiff, CenterRowIsPureDiffusion) {
    const double nu = 1.0 / 200.0;
    const std::size_t m = 7;
    const auto grid = Grid2D::square(m, -1.0, 1.0);
    ASSERT_DOUBLE_EQ(grid.x(3), 0.0);
    const Eigen::MatrixXd k = build_convdiff(grid, nu, circulating).K.to_dense();
    const Eigen::MatrixXd ref = oracle::fd_stiffness(m, [nu](double, double) { return nu; }, -1.0, 1.0);
    const Eigen::Index c = 3 + 7 * 3;
    EXPECT_LT((k.row(c) - ref.row(c)).norm(), 1e-14 * ref.row(c).norm());
    EXPECT_GT((k - ref).norm(), 1.0);
}

TEST(ConvDiff, SymmetricPartIsPositiveSemidefinite) {
    const auto pair = build_convdiff(Grid2D::square(8, -1.0, 1.0), 1.0 / 200.0, circulating);
    EXPECT_FALSE(pair.symmetric_K);
    const Eigen::MatrixXd k = pair.K.to_dense();
    const Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff(), -1e-12);
}

TEST(Bdf, Coefficients) {
    EXPECT_EQ(bdf_stencil(1).r, (std::vector<double>{1.0, -1.0}));
    EXPECT_EQ(bdf_stencil(2).r, (std::vector<double>{1.5, -2.0, 0.5}));
    for (int order : {1, 2}) {
        double s = 0.0;
        for (double r : bdf_stencil(order).r) s += r;
        EXPECT_EQ(s, 0.0);
    }
    EXPECT_THROW(bdf_stencil(3), DomainError);
    EXPECT_THROW(bdf_stencil(0), DomainError);
}

TEST(ApplyL, MatchesDenseKronecker) {
    for (int order : {1, 2})
        for (auto [n, j] : {std::pair<std::size_t, Eigen::Index>{3, 4}, {4, 9}, {7, 5}, {2, 3}}) {
            const Eigen::MatrixXd m = random_spd(j, 3), k = random_spd(j, 4);
            const auto system = bare_system(dense_pair(m, k), order, n, 1.3);
            const Eigen::MatrixXd ref =
                oracle::all_at_once(oracle::r_eps(bdf_stencil(order).r, n, 0.0), m, k, system.tau());
            const auto v = oracle::random_vector(system.size(), 21);
            const Eigen::VectorXd want = ref * oracle::view(v);
            EXPECT_LT((oracle::view(system.apply(v)) - want).norm(), 1e-13 * want.norm());
        }
}

TEST(ApplyL, ZeroAndTwoBlockExpansion) {
    const auto pair = std::make_shared<const SpatialPair>(build_heat_q1(Grid2D::unit_square(3), 1.0));
    const auto system = bare_system(pair, 1, 2, 1.0);
    const auto zero = system.apply(std::vector<double>(18, 0.0));
    for (double x : zero) EXPECT_EQ(x, 0.0);

    const auto v = oracle::random_vector(18, 2);
    const auto out = system.apply(v);
    const Eigen::MatrixXd m = pair->M.to_dense(), k = pair->K.to_dense();
    const Eigen::VectorXd v1 = oracle::view(v).head(9), v2 = oracle::view(v).tail(9);
    const Eigen::VectorXd want = -m * v1 + (m + system.tau() * k) * v2;
    EXPECT_LT((oracle::view(out).tail(9) - want).norm(), 1e-14 * want.norm());
}

TEST(Assemble, BackwardEulerHistoryOnlyInFirstBlock) {
    const auto pair = std::make_shared<const SpatialPair>(build_heat_q1(Grid2D::unit_square(4), 1.0));
    ProblemData data;
    data.initial = [](double x, double y) { return x * (x - 1) * y * (y - 1); };
    const auto system = assemble(pair, bdf_stencil(1), 1.0, 5, data);
    const auto mu0 = spmv(pair->M, pair->grid.sample(data.initial));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(system.rhs()[i], mu0[i]);
    for (std::size_t i = 16; i < system.size(); ++i) EXPECT_EQ(system.rhs()[i], 0.0);
}

TEST(Assemble, Bdf2StartupFoldsInitialData) {
    const auto pair = std::make_shared<const SpatialPair>(build_heat_fd(Grid2D::unit_square(3), 1.0));
    ProblemData data;
    data.initial = [](double x, double y) { return std::sin(x + 2 * y); };
    const auto system = assemble(pair, bdf_stencil(2), 1.0, 4, data);
    const auto u0 = pair->grid.sample(data.initial);
    for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_NEAR(system.rhs()[i], 1.5 * u0[i], 1e-15);
        EXPECT_NEAR(system.rhs()[9 + i], -0.5 * u0[i], 1e-15);
        EXPECT_EQ(system.rhs()[18 + i], 0.0);
    }
}

TEST(Assemble, SingleStepCollapsesToOneSolve) {
    const auto pair = std::make_shared<const SpatialPair>(build_heat_q1(Grid2D::unit_square(3), 0.7));
    ProblemData data;
    data.initial = [](double x, double y) { return x + y; };
    data.source = [](double x, double y, double t) { return x * y + t; };
    const double T = 0.4;
    const auto system = assemble(pair, bdf_stencil(1), T, 1, data);
    const Eigen::MatrixXd m = pair->M.to_dense(), k = pair->K.to_dense();
    const Eigen::VectorXd u0 = oracle::view(pair->grid.sample(data.initial));
    const Eigen::VectorXd f1 = oracle::view(pair->grid.sample([&](double x, double y) { return data.source(x, y, T); }));
    const Eigen::VectorXd want = T * m * f1 + m * u0;
    EXPECT_LT((oracle::view(system.rhs()) - want).norm(), 1e-14 * want.norm());

    const Eigen::VectorXd u1 = (m + T * k).lu().solve(want);
    const auto lu1 = system.apply(std::vector<double>(u1.data(), u1.data() + u1.size()));
    EXPECT_LT((oracle::view(lu1) - want).norm(), 1e-13 * want.norm());
}

TEST(Assemble, AllAtOnceSolveReproducesTimeStepping) {
    const std::size_t n = 6;
    const double T = 0.5;
    auto coeff = [](double x, double y) { return 1.0 + x * y; };
    const auto pair = std::make_shared<const SpatialPair>(
        build_heat_fd(Grid2D::unit_square(5), Coefficient(std::function<double(double, double)>(coeff))));
    ProblemData data;
    data.initial = [](double x, double y) { return std::sin(3 * x) * y; };
    data.source = [](double x, double y, double t) { return std::cos(t) * (x - y); };
    const auto system = assemble(pair, bdf_stencil(1), T, n, data);
    const double tau = system.tau();
    const Eigen::MatrixXd m = pair->M.to_dense(), k = pair->K.to_dense();

    const Eigen::MatrixXd l = oracle::all_at_once(oracle::r_eps({1.0, -1.0}, n, 0.0), m, k, tau);
    const Eigen::VectorXd all = l.partialPivLu().solve(oracle::view(system.rhs()));

    Eigen::VectorXd u = oracle::view(pair->grid.sample(data.initial));
    const auto a0 = (m + tau * k).partialPivLu();
    for (std::size_t step = 1; step <= n; ++step) {
        const double t = double(step) * tau;
        const Eigen::VectorXd f = oracle::view(pair->grid.sample([&](double x, double y) { return data.source(x, y, t); }));
        u = a0.solve(m * u + tau * m * f);
        EXPECT_LT((all.segment(Eigen::Index((step - 1) * 25), 25) - u).norm(), 1e-12 * u.norm()) << "step " << step;
    }
}

TEST(Grid, LexicographicOrderingXFastest) {
    const auto grid = Grid2D::unit_square(3);
    const auto v = grid.sample([](double x, double y) { return x + 10 * y; });
    EXPECT_DOUBLE_EQ(v[1], 0.5 + 10 * 0.25);
    EXPECT_DOUBLE_EQ(v[3], 0.25 + 10 * 0.5);
    EXPECT_TRUE(Grid2D::unit_square(15).coarsenable());
    EXPECT_FALSE(Grid2D::unit_square(6).coarsenable());
    EXPECT_EQ(Grid2D::unit_square(15).coarsened().m, 7u);
}

}  // namespace
