#include "bec/discretization.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bec {

bool Grid2D::coarsenable() const noexcept {
    const std::size_t n = m + 1;
    return n >= 2 && (n & (n - 1)) == 0;
}

Grid2D Grid2D::coarsened() const {
    require(coarsenable() && m >= 3, "grid with m = " + std::to_string(m) + " cannot be coarsened");
    return {(m + 1) / 2 - 1, x0, x1, y0, y1};
}

std::vector<double> Grid2D::sample(const std::function<double(double, double)>& f) const {
    std::vector<double> v(unknowns(), 0.0);
    if (!f) return v;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) v[index(i, j)] = f(x(i), y(j));
    return v;
}

Coefficient::Coefficient(double value) : constant_(value) {}

Coefficient::Coefficient(std::function<double(double, double)> field) : field_(std::move(field)) {
    require(static_cast<bool>(field_), "Coefficient field must be callable");
}

SparseMatrix SpatialPair::step_matrix(double tau) const { return M + tau * K; }

std::vector<double> SpatialPair::boundary_values(const std::function<double(double, double)>& g) const {
    std::vector<double> v(boundary_nodes.size(), 0.0);
    if (!g) return v;
    for (std::size_t b = 0; b < v.size(); ++b) v[b] = g(boundary_nodes[b][0], boundary_nodes[b][1]);
    return v;
}

namespace {

// Collects stencil entries for interior rows. Neighbours are addressed by offsets on
// the full (m+2) x (m+2) node grid; those landing on the boundary go to the
// boundary-coupling blocks.
class PairAssembler {
public:
    explicit PairAssembler(const Grid2D& grid) : grid_(grid), n_(grid.m + 2), boundary_index_(n_ * n_, -1) {
        for (std::size_t fj = 0; fj < n_; ++fj)
            for (std::size_t fi = 0; fi < n_; ++fi)
                if (fi == 0 || fj == 0 || fi == n_ - 1 || fj == n_ - 1) {
                    boundary_index_[fi + n_ * fj] = static_cast<int>(nodes_.size());
                    nodes_.push_back({grid.x0 + static_cast<double>(fi) * grid.hx(),
                                      grid.y0 + static_cast<double>(fj) * grid.hy()});
                }
    }

    void add_mass(std::size_t i, std::size_t j, int di, int dj, double value) { add(mass_, mass_b_, i, j, di, dj, value); }
    void add_stiffness(std::size_t i, std::size_t j, int di, int dj, double value) {
        add(stiff_, stiff_b_, i, j, di, dj, value);
    }
    void set_identity_mass() {
        for (std::size_t k = 0; k < grid_.unknowns(); ++k) mass_.emplace_back(static_cast<int>(k), static_cast<int>(k), 1.0);
    }

    SpatialPair finish() {
        SpatialPair pair;
        pair.grid = grid_;
        const std::size_t nj = grid_.unknowns();
        pair.M = SparseMatrix(nj, nj, mass_);
        pair.K = SparseMatrix(nj, nj, stiff_);
        pair.M_boundary = SparseMatrix(nj, nodes_.size(), mass_b_);
        pair.K_boundary = SparseMatrix(nj, nodes_.size(), stiff_b_);
        pair.boundary_nodes = std::move(nodes_);
        return pair;
    }

private:
    void add(std::vector<SparseMatrix::Triplet>& inner, std::vector<SparseMatrix::Triplet>& outer, std::size_t i,
             std::size_t j, int di, int dj, double value) {
        const auto fi = static_cast<std::size_t>(static_cast<long>(i) + 1 + di);
        const auto fj = static_cast<std::size_t>(static_cast<long>(j) + 1 + dj);
        const int row = static_cast<int>(grid_.index(i, j));
        const int b = boundary_index_[fi + n_ * fj];
        if (b >= 0)
            outer.emplace_back(row, b, value);
        else
            inner.emplace_back(row, static_cast<int>(grid_.index(fi - 1, fj - 1)), value);
    }

    Grid2D grid_;
    std::size_t n_;
    std::vector<int> boundary_index_;
    std::vector<std::array<double, 2>> nodes_;
    std::vector<SparseMatrix::Triplet> mass_, mass_b_, stiff_, stiff_b_;
};

// Eigenvalues of tridiag(-1,2,-1) and tridiag(1,4,1) on the sine modes k = 1..m.
double laplace_symbol(std::size_t k, std::size_t m) {
    return 2.0 - 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(m + 1));
}
double mass_symbol(std::size_t k, std::size_t m) {
    return 4.0 + 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(m + 1));
}

void check_grid(const Grid2D& grid) {
    require(grid.m >= 1, "grid needs at least one interior point per dimension");
    if (!(grid.x1 > grid.x0 && grid.y1 > grid.y0)) throw DomainError("grid domain bounds must be increasing");
}

}  // namespace

SpatialPair build_heat_fd(const Grid2D& grid, const Coefficient& a) {
    check_grid(grid);
    const double hx = grid.hx(), hy = grid.hy();
    PairAssembler asmb(grid);
    asmb.set_identity_mass();
    for (std::size_t j = 0; j < grid.m; ++j) {
        for (std::size_t i = 0; i < grid.m; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const double east = a(x + 0.5 * hx, y), west = a(x - 0.5 * hx, y);
            const double north = a(x, y + 0.5 * hy), south = a(x, y - 0.5 * hy);
            if (!(east > 0.0 && west > 0.0 && north > 0.0 && south > 0.0))
                throw DomainError("diffusion coefficient must be positive (near x=" + std::to_string(x) +
                                  ", y=" + std::to_string(y) + ")");
            const double cx = 1.0 / (hx * hx), cy = 1.0 / (hy * hy);
            asmb.add_stiffness(i, j, 0, 0, cx * (east + west) + cy * (north + south));
            asmb.add_stiffness(i, j, 1, 0, -cx * east);
            asmb.add_stiffness(i, j, -1, 0, -cx * west);
            asmb.add_stiffness(i, j, 0, 1, -cy * north);
            asmb.add_stiffness(i, j, 0, -1, -cy * south);
        }
    }
    SpatialPair pair = asmb.finish();
    pair.symmetric_K = true;
    if (auto c = a.constant()) {
        const double value = *c;
        TensorSpectrum spec{std::vector<double>(grid.unknowns(), 1.0), std::vector<double>(grid.unknowns())};
        for (std::size_t j = 0; j < grid.m; ++j)
            for (std::size_t i = 0; i < grid.m; ++i)
                spec.stiffness[grid.index(i, j)] =
                    value * (laplace_symbol(i + 1, grid.m) / (hx * hx) + laplace_symbol(j + 1, grid.m) / (hy * hy));
        pair.spectrum = std::move(spec);
        pair.rediscretize = [value](const Grid2D& g) { return build_heat_fd(g, value); };
        pair.coarse_scale = 4.0;
    }
    return pair;
}

SpatialPair build_heat_q1(const Grid2D& grid, double a) {
    check_grid(grid);
    if (!(a > 0.0)) throw DomainError("Q1 diffusion coefficient must be positive");
    require(std::abs(grid.hx() - grid.hy()) <= 1e-14 * grid.hx(), "Q1 assembly needs a square mesh (hx == hy)");
    const double h = grid.hx();

    // 1D factors on neighbour offsets -1, 0, +1.
    constexpr std::array<double, 3> t1{1.0, 4.0, 1.0};
    constexpr std::array<double, 3> l1{-1.0, 2.0, -1.0};
    PairAssembler asmb(grid);
    for (std::size_t j = 0; j < grid.m; ++j)
        for (std::size_t i = 0; i < grid.m; ++i)
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const double tx = t1[di + 1], ty = t1[dj + 1];
                    const double lx = l1[di + 1], ly = l1[dj + 1];
                    asmb.add_mass(i, j, di, dj, (h / 6.0) * (h / 6.0) * tx * ty);
                    asmb.add_stiffness(i, j, di, dj, a / 6.0 * (lx * ty + tx * ly));
                }
    SpatialPair pair = asmb.finish();
    pair.symmetric_K = true;
    TensorSpectrum spec{std::vector<double>(grid.unknowns()), std::vector<double>(grid.unknowns())};
    for (std::size_t j = 0; j < grid.m; ++j)
        for (std::size_t i = 0; i < grid.m; ++i) {
            const double ti = mass_symbol(i + 1, grid.m), tj = mass_symbol(j + 1, grid.m);
            const double li = laplace_symbol(i + 1, grid.m), lj = laplace_symbol(j + 1, grid.m);
            spec.mass[grid.index(i, j)] = (h / 6.0) * (h / 6.0) * ti * tj;
            spec.stiffness[grid.index(i, j)] = a / 6.0 * (li * tj + ti * lj);
        }
    pair.spectrum = std::move(spec);
    pair.rediscretize = [a](const Grid2D& g) { return build_heat_q1(g, a); };
    pair.coarse_scale = 1.0;
    return pair;
}

SpatialPair build_convdiff(const Grid2D& grid, double nu, const WindField& wind) {
    check_grid(grid);
    if (!(nu > 0.0)) throw DomainError("diffusion constant nu must be positive");
    require(static_cast<bool>(wind), "wind field must be callable");
    const double hx = grid.hx(), hy = grid.hy();
    const double cx = nu / (hx * hx), cy = nu / (hy * hy);
    PairAssembler asmb(grid);
    asmb.set_identity_mass();
    for (std::size_t j = 0; j < grid.m; ++j) {
        for (std::size_t i = 0; i < grid.m; ++i) {
            const auto w = wind(grid.x(i), grid.y(j));
            asmb.add_stiffness(i, j, 0, 0, 2.0 * cx + 2.0 * cy + std::abs(w[0]) / hx + std::abs(w[1]) / hy);
            // Upwind: backward difference along positive wind, forward along negative.
            asmb.add_stiffness(i, j, 1, 0, -cx + std::min(w[0], 0.0) / hx);
            asmb.add_stiffness(i, j, -1, 0, -cx - std::max(w[0], 0.0) / hx);
            asmb.add_stiffness(i, j, 0, 1, -cy + std::min(w[1], 0.0) / hy);
            asmb.add_stiffness(i, j, 0, -1, -cy - std::max(w[1], 0.0) / hy);
        }
    }
    SpatialPair pair = asmb.finish();
    pair.symmetric_K = false;
    pair.rediscretize = [nu, wind](const Grid2D& g) { return build_convdiff(g, nu, wind); };
    pair.coarse_scale = 4.0;
    return pair;
}

}  // namespace bec
