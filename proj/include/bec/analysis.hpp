#pragma once

#include "bec/discretization.hpp"
#include "bec/gmres.hpp"
#include "bec/preconditioner.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bec {

/// Dense copies of one small all-at-once system and its eps-circulant preconditioner.
struct DenseProbe {
    std::size_t N = 0;
    std::size_t J = 0;
    double tau = 0.0;
    double final_time = 0.0;
    double epsilon = 0.0;
    TimeStencil stencil;
    bool symmetric_K = true;
    Eigen::MatrixXd M, K;
    Eigen::MatrixXd L;      ///< assembled column by column from the matrix-free action
    Eigen::MatrixXd P;      ///< R_eps kron M + tau I kron K
    Eigen::MatrixXd PinvL;  ///< P^-1 L
};

/// Build the dense probe; throws ConfigError when N*J exceeds cap.
DenseProbe make_probe(const AllAtOnceSystem& system, double epsilon, std::size_t cap = 2000);

/// Dense R_eps (eps = 1 gives the circulant, eps = 0 gives R).
Eigen::MatrixXd dense_time_matrix(const TimeStencil& stencil, std::size_t n, double epsilon);

struct CheckReport {
    std::string name;
    bool passed = false;
    bool skipped = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

/// P^-1 = L^-1 + L^-1 E_1 Z^-1 E_N^T L^-1 with Z = eps^-1 [I - eps (A0^-1 M)^N] M^-1 for
/// one-step schemes; for p steps E_1, E_N select the first and last p blocks and
/// Z = -W^-1 - E_N^T L^-1 E_1, W = C kron M with C the eps-scaled upper-right corner of R_eps.
CheckReport check_inverse_formula(const DenseProbe& probe, double tolerance = 1e-9);

/// Eigenvalues of P^-1 L against {1}^((N-p)J) and the predicted remainder
/// (lambda^N / (lambda^N - eps), lambda in sigma(M^-1/2 A0 M^-1/2), for p = 1).
CheckReport check_spectrum(const DenseProbe& probe, double tolerance = 1e-8);

/// max |lambda - 1| over sigma(P^-1 L) against eps / (1 - eta).
CheckReport check_clustering(const DenseProbe& probe, double eta);

/// Numerical rank of P^-1 L - I (singular values above 1e-8 sigma_max) equals pJ.
CheckReport check_rank_defect(const DenseProbe& probe, double relative_threshold = 1e-8);

struct DiagonalizationReport {
    CheckReport check;
    double margin = 0.0;            ///< min(d - 1) over sigma(D)
    double condition_number = 0.0;  ///< kappa_2(V^) (informational)
};

/// Builds V^, D^ for one-step schemes and measures ||L V^ - P V^ D^||_F / ||L V^||_F.
DiagonalizationReport check_diagonalization(const DenseProbe& probe, double tolerance = 1e-9);

/// ||P^-1 L - I||_2 <= eps c0 sqrt(N) / (1 - eta), c0 = sqrt(kappa_2(M)).
CheckReport check_norm_bound(const DenseProbe& probe, double eta);

/// sqrt(lambda_max(M) / lambda_min(M)).
double mass_constant(const Eigen::MatrixXd& M);

/// b_tau = delta sqrt(tau) / (delta sqrt(tau) + c0 sqrt(T)).
double rate_epsilon(double delta, double tau, double final_time, double c0);

/// Runs GMRES with eps = b_tau and a random right-hand side and checks
/// ||r_k|| / ||r_0|| <= (2 sqrt(delta) / (1 + delta))^k for every k.
CheckReport check_gmres_rate(const AllAtOnceSystem& system, double delta, std::uint64_t seed = 0,
                             double tolerance = 1e-12);

struct ComparisonRow {
    std::string preconditioner;
    double epsilon = 0.0;
    SolveReport report;
};

/// Runs BC (eps = 1) and BEC (eps = min(0.5, 0.5 tau)) with identical GMRES settings.
std::vector<ComparisonRow> compare_bc_bec(const AllAtOnceSystem& system, const GmresConfig& config = {},
                                          const std::optional<std::vector<double>>& exact = std::nullopt,
                                          InnerSolverKind inner = InnerSolverKind::Auto);

}  // namespace bec
