#pragma once

#include "bec/discretization.hpp"
#include "bec/multigrid.hpp"
#include "bec/transforms.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bec {

/// eps = min(0.5, 0.5 tau).
double choose_epsilon(double tau);

/// lambda_k = sum_j r_j eps^(j/N) theta_N^(kj), k = 0..N-1, by direct summation.
/// When N <= p the coefficients r_j with j >= N fold onto diagonal j mod N with weight eps^(j div N).
std::vector<cplx> bec_eigenvalues(const TimeStencil& stencil, double eps, std::size_t n);
/// Same values as sqrt(N) F_N (r_0 eps^0, ..., r_p eps^(p/N), 0, ..., 0); O(N log N) for any p.
std::vector<cplx> bec_eigenvalues_fft(const TimeStencil& stencil, double eps, std::size_t n);

/// Dense D^-1 F^* Lambda F D, i.e. R_eps rebuilt from its diagonalization (small N only).
Eigen::MatrixXd reconstruct_R_eps(const TimeStencil& stencil, double eps, std::size_t n);

enum class InnerSolverKind { Auto, FstDirect, Multigrid, DenseDirect };

std::string to_string(InnerSolverKind kind);
InnerSolverKind inner_solver_from_string(const std::string& name);

/// Solver for the Fourier-space blocks B_k = lambda_k M + tau K.
class BlockSolver {
public:
    virtual ~BlockSolver() = default;
    virtual InnerSolverKind kind() const noexcept = 0;
    /// Solve block k (lambda is lambda_k; implementations may cache per k).
    virtual void solve(std::size_t k, cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const = 0;
};

/// Exact solve through the tensor sine basis; needs pair.fst_diagonalizable().
class FstBlockSolver final : public BlockSolver {
public:
    FstBlockSolver(const SpatialPair& pair, double tau);
    InnerSolverKind kind() const noexcept override { return InnerSolverKind::FstDirect; }
    void solve(std::size_t k, cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const override;
    void solve(cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const;

private:
    void transform(std::span<double> v) const;  // (S kron S) v in place

    std::size_t m_;
    double tau_;
    TensorSpectrum spectrum_;
    SinePlan rows_;
    SinePlan cols_;
};

class MultigridBlockSolver final : public BlockSolver {
public:
    MultigridBlockSolver(const SpatialPair& pair, double tau, MultigridOptions options);
    InnerSolverKind kind() const noexcept override { return InnerSolverKind::Multigrid; }
    void solve(std::size_t k, cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const override;
    const Multigrid& multigrid() const noexcept { return mg_; }

private:
    Multigrid mg_;
};

/// Complex LU per block, factored once for every lambda handed to the constructor.
class DenseBlockSolver final : public BlockSolver {
public:
    DenseBlockSolver(const SpatialPair& pair, double tau, std::span<const cplx> lambdas, std::size_t cap = 4096);
    InnerSolverKind kind() const noexcept override { return InnerSolverKind::DenseDirect; }
    void solve(std::size_t k, cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const override;

private:
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
};

std::vector<cplx> inner_solve_fst(cplx lambda, const SpatialPair& pair, double tau, std::span<const cplx> rhs);
std::vector<cplx> inner_solve_multigrid(cplx lambda, const SpatialPair& pair, double tau, std::span<const cplx> rhs,
                                        int cycles = 1, MultigridOptions options = {});
std::vector<cplx> inner_solve_dense(cplx lambda, const SpatialPair& pair, double tau, std::span<const cplx> rhs,
                                    std::size_t cap = 4096);

struct PreconditionerOptions {
    double epsilon = 0.5;
    InnerSolverKind inner = InnerSolverKind::Auto;
    MultigridOptions multigrid{};
    bool conjugate_reduction = true;
    std::size_t dense_cap = 4096;
    double imaginary_tolerance = 1e-10;
};

/// Block eps-circulant preconditioner P_eps = R_eps kron M + tau I kron K.
///
/// R_eps = D^-1 F_N^* Lambda F_N D with D = diag(eps^(k/N)), so P_eps^-1 y is
///   1. y~ = [(F_N D) kron I_J] y
///   2. B_k z~^k = y~^k,  B_k = lambda_k M + tau K
///   3. z  = [(D^-1 F_N^*) kron I_J] z~
/// For real y only blocks k < ceil((N+1)/2) are solved; the rest are conjugates.
class BECPreconditioner {
public:
    BECPreconditioner(const AllAtOnceSystem& system, PreconditionerOptions options);

    double epsilon() const noexcept { return options_.epsilon; }
    std::size_t steps() const noexcept { return n_; }
    std::size_t block_size() const noexcept { return j_; }
    std::size_t size() const noexcept { return n_ * j_; }
    const std::vector<cplx>& eigenvalues() const noexcept { return lambda_; }
    const std::vector<double>& scaling() const noexcept { return scale_; }
    InnerSolverKind inner_kind() const noexcept { return inner_->kind(); }
    const PreconditionerOptions& options() const noexcept { return options_; }
    /// Number of Step-2 systems solved per application.
    std::size_t solves_per_apply() const noexcept;

    void apply(std::span<const double> y, std::span<double> z) const;
    std::vector<double> apply(std::span<const double> y) const;

    std::size_t block_solves() const noexcept { return block_solves_.load(); }
    std::size_t applications() const noexcept { return applications_.load(); }
    void reset_counters() const noexcept;

private:
    std::size_t n_, j_;
    PreconditionerOptions options_;
    std::vector<cplx> lambda_;
    std::vector<double> scale_;  // eps^(k/N)
    std::unique_ptr<BlockSolver> inner_;
    FourierPlan to_fourier_;    // F_N kron I_J
    FourierPlan from_fourier_;  // F_N^* kron I_J
    mutable std::atomic<std::size_t> block_solves_{0};
    mutable std::atomic<std::size_t> applications_{0};
};

inline std::vector<double> apply_inverse(const BECPreconditioner& p, std::span<const double> y) { return p.apply(y); }

}  // namespace bec
