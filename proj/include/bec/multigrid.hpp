#pragma once

#include "bec/discretization.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bec {

struct MultigridOptions {
    int cycles = 1;
    double omega = 0.8;  ///< damped Jacobi weight
    int pre_sweeps = 1;
    int post_sweeps = 1;
    std::size_t coarsest = 7;  ///< levels with m <= coarsest are solved by dense LU
};

/// Geometric V-cycle for the shifted blocks (lambda M + tau K) z = y on a uniform grid.
///
/// The real hierarchy (M_l, K_l, prolongations) is built once per pair and shared by
/// every shift lambda. Prolongation is bilinear interpolation, restriction its
/// transpose. Coarse operators are re-discretized when the pair can do so (constant
/// coefficients) and Galerkin products P^T A P otherwise.
class Multigrid {
public:
    Multigrid(const SpatialPair& pair, double tau, MultigridOptions options = {});

    std::size_t levels() const noexcept { return levels_.size(); }
    std::size_t size() const noexcept { return levels_.front().M.rows(); }
    const MultigridOptions& options() const noexcept { return options_; }

    /// Runs options().cycles V-cycles from a zero initial guess, stopping early once the
    /// residual reaches rounding level. Throws SolverError if a cycle increases the residual norm.
    void solve(cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const;
    std::vector<cplx> solve(cplx lambda, std::span<const cplx> rhs) const;

    /// Residual b - (lambda M + tau K) x on the finest level.
    std::vector<cplx> residual(cplx lambda, std::span<const cplx> b, std::span<const cplx> x) const;

    /// Bilinear prolongation from a grid with (m+1)/2 - 1 points per side to one with m.
    static SparseMatrix prolongation(std::size_t m_fine);

private:
    struct Level {
        std::size_t m;
        SparseMatrix M, K;
        std::vector<double> diag_M, diag_K;
        SparseMatrix P;  ///< from level+1 to this level (empty on the coarsest)
        SparseMatrix R;  ///< P^T
    };

    void cycle(std::size_t level, cplx lambda, std::span<const cplx> b, std::span<cplx> x) const;
    void apply_block(const Level& lv, cplx lambda, std::span<const cplx> x, std::span<cplx> out) const;

    std::vector<Level> levels_;
    double tau_;
    MultigridOptions options_;
};

}  // namespace bec
