#pragma once

#include "bec/discretization.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bec {

/// out = Op(in); out is fully overwritten.
using RealOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresConfig {
    double tolerance = 1e-7;  ///< on ||r_k|| / ||r_0||, preconditioned residuals
    std::size_t restart = 50;
    std::size_t max_iterations = 2000;
    std::vector<double> initial_guess;  ///< empty means zero
    double breakdown = 1e-14;           ///< happy breakdown when h_{k+1,k} <= breakdown * ||r_0||
};

struct SolveReport {
    std::size_t iterations = 0;
    bool converged = false;
    /// Preconditioned residual norms ||r_k||, k = 0..iterations (Givens estimates).
    std::vector<double> history;
    double res = 0.0;                ///< ||f - L u|| / ||f||
    std::optional<double> error;     ///< max-norm error against a known solution
    double seconds = 0.0;
    std::size_t restarts = 0;
};

/// Restarted GMRES on P^-1 A x = P^-1 b with modified Gram-Schmidt Arnoldi and Givens
/// rotations. An empty preconditioner means the identity. On exhaustion of
/// max_iterations the best iterate is returned with report.converged == false.
std::pair<std::vector<double>, SolveReport> gmres_solve(const RealOperator& apply_a, const RealOperator& apply_pinv,
                                                        std::span<const double> b, const GmresConfig& config);

struct ResidualMetrics {
    double res = 0.0;
    std::optional<double> error;
};

/// RES = ||f - L u|| / ||f|| with the unpreconditioned operator, and optionally
/// E = ||u - u*||_inf.
ResidualMetrics residual_metrics(const AllAtOnceSystem& system, std::span<const double> u,
                                 std::optional<std::span<const double>> exact = std::nullopt);

}  // namespace bec
