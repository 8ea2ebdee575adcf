#pragma once

#include "bec/operators.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace bec {

/// Uniform tensor grid of m x m interior points on [x0,x1] x [y0,y1].
/// Unknowns are ordered lexicographically with x fastest: index(i, j) = i + m*j.
struct Grid2D {
    std::size_t m = 1;
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;

    static Grid2D unit_square(std::size_t m) { return {m, 0.0, 1.0, 0.0, 1.0}; }
    static Grid2D square(std::size_t m, double lo, double hi) { return {m, lo, hi, lo, hi}; }

    std::size_t unknowns() const noexcept { return m * m; }
    double hx() const noexcept { return (x1 - x0) / static_cast<double>(m + 1); }
    double hy() const noexcept { return (y1 - y0) / static_cast<double>(m + 1); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i + m * j; }
    double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i + 1) * hx(); }
    double y(std::size_t j) const noexcept { return y0 + static_cast<double>(j + 1) * hy(); }

    /// True when m + 1 is a power of two, so the grid halves down to m = 1.
    bool coarsenable() const noexcept;
    /// Grid with (m+1)/2 - 1 interior points on the same domain.
    Grid2D coarsened() const;

    /// Sample a function at the interior nodes.
    std::vector<double> sample(const std::function<double(double, double)>& f) const;
};

/// Diffusion coefficient: either a known constant or a field a(x, y).
class Coefficient {
public:
    Coefficient(double value);  // NOLINT: implicit on purpose, constants are the common case
    explicit Coefficient(std::function<double(double, double)> field);

    double operator()(double x, double y) const { return constant_ ? *constant_ : field_(x, y); }
    bool is_constant() const noexcept { return constant_.has_value(); }
    std::optional<double> constant() const noexcept { return constant_; }

private:
    std::optional<double> constant_;
    std::function<double(double, double)> field_;
};

using WindField = std::function<std::array<double, 2>(double, double)>;

/// Eigenvalues of M and K under the (S kron S) sine basis, indexed like the unknowns.
struct TensorSpectrum {
    std::vector<double> mass;
    std::vector<double> stiffness;
};

/// Mass / stiffness pair for one spatial mesh, plus Dirichlet couplings to the boundary
/// nodes (eliminated unknowns) and what a multigrid hierarchy needs to coarsen it.
struct SpatialPair {
    Grid2D grid;
    SparseMatrix M;
    SparseMatrix K;
    SparseMatrix M_boundary;  ///< J x B block coupling interior rows to boundary nodes
    SparseMatrix K_boundary;
    std::vector<std::array<double, 2>> boundary_nodes;

    bool symmetric_K = true;
    std::optional<TensorSpectrum> spectrum;  ///< set iff the pair is diagonalized by S kron S

    /// Re-discretization on a coarser grid; empty means coarse operators come from
    /// the Galerkin product P^T A P.
    std::function<SpatialPair(const Grid2D&)> rediscretize;
    /// Factor aligning a re-discretized coarse pair with P^T A P (4 for finite
    /// differences with M = I, 1 for Q1 whose matrices already carry the cell measure).
    double coarse_scale = 1.0;

    std::size_t size() const noexcept { return M.rows(); }
    bool fst_diagonalizable() const noexcept { return spectrum.has_value(); }
    /// A0 = M + tau K.
    SparseMatrix step_matrix(double tau) const;
    /// Boundary data sampled at the boundary nodes.
    std::vector<double> boundary_values(const std::function<double(double, double)>& g) const;
};

/// 5-point finite differences for -div(a grad u) with a taken at edge midpoints; M = I.
SpatialPair build_heat_fd(const Grid2D& grid, const Coefficient& a);

/// Bilinear (Q1) finite elements on the uniform mesh, constant a:
/// M = (h/6)T kron (h/6)T, K = a[(1/h)L kron (h/6)T + (h/6)T kron (1/h)L],
/// with T = tridiag(1,4,1) and L = tridiag(-1,2,-1).
SpatialPair build_heat_q1(const Grid2D& grid, double a);

/// nu * (5-point Laplacian) plus first-order upwinding of w . grad u at the nodes; M = I.
SpatialPair build_convdiff(const Grid2D& grid, double nu, const WindField& wind);

/// Backward differentiation coefficients r_0..r_p.
struct TimeStencil {
    std::vector<double> r;

    std::size_t steps() const noexcept { return r.size() - 1; }
};

TimeStencil bdf_stencil(int order);

/// Source, boundary and initial data for one evolutionary problem. Empty functions mean zero.
struct ProblemData {
    std::function<double(double, double, double)> source;    ///< f(x, y, t)
    std::function<double(double, double, double)> boundary;  ///< g(x, y, t) on the boundary
    std::function<double(double, double)> initial;           ///< u0(x, y)
};

/// L u = f with L = R kron M + tau I_N kron K.
///
/// Vectors are stacked time blocks (u^1; ...; u^N), each of length J. History terms with
/// time index <= 0 use u0 (for BDF2 the missing u^{-1} is taken equal to u0).
class AllAtOnceSystem {
public:
    AllAtOnceSystem(std::shared_ptr<const SpatialPair> pair, TimeStencil stencil, std::size_t steps,
                    double final_time, std::vector<double> rhs, std::vector<double> initial);

    const SpatialPair& pair() const noexcept { return *pair_; }
    std::shared_ptr<const SpatialPair> pair_ptr() const noexcept { return pair_; }
    const TimeStencil& stencil() const noexcept { return stencil_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t block_size() const noexcept { return pair_->size(); }
    std::size_t size() const noexcept { return steps_ * block_size(); }
    double final_time() const noexcept { return final_time_; }
    double tau() const noexcept { return final_time_ / static_cast<double>(steps_); }
    const std::vector<double>& rhs() const noexcept { return rhs_; }
    const std::vector<double>& initial() const noexcept { return initial_; }

    /// out = L v using the p+1 block diagonals; O(N J) work for fixed p.
    void apply(std::span<const double> v, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> v) const;

    /// Time-block Toeplitz matrix R.
    ToeplitzSpec time_matrix() const;

private:
    std::shared_ptr<const SpatialPair> pair_;
    TimeStencil stencil_;
    std::size_t steps_;
    double final_time_;
    std::vector<double> rhs_;
    std::vector<double> initial_;
};

AllAtOnceSystem assemble(std::shared_ptr<const SpatialPair> pair, const TimeStencil& stencil, double final_time,
                         std::size_t steps, const ProblemData& data);

inline std::vector<double> apply_L(const AllAtOnceSystem& system, std::span<const double> v) {
    return system.apply(v);
}

}  // namespace bec
