#include "bec/multigrid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <string>

namespace bec {

namespace {

double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

}  // namespace

SparseMatrix Multigrid::prolongation(std::size_t m_fine) {
    const Grid2D fine = Grid2D::unit_square(m_fine);
    const std::size_t mc = fine.coarsened().m;
    // 1D: coarse point c sits on fine point 2c+1 and spreads 1/2 to both neighbours.
    std::vector<std::vector<std::pair<std::size_t, double>>> p1(m_fine);
    for (std::size_t c = 0; c < mc; ++c) {
        p1[2 * c].emplace_back(c, 0.5);
        p1[2 * c + 1].emplace_back(c, 1.0);
        p1[2 * c + 2].emplace_back(c, 0.5);
    }
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(9 * mc * mc);
    for (std::size_t jf = 0; jf < m_fine; ++jf)
        for (std::size_t if_ = 0; if_ < m_fine; ++if_)
            for (const auto& [jc, wy] : p1[jf])
                for (const auto& [ic, wx] : p1[if_])
                    t.emplace_back(static_cast<int>(if_ + m_fine * jf), static_cast<int>(ic + mc * jc), wx * wy);
    return SparseMatrix(m_fine * m_fine, mc * mc, t);
}

Multigrid::Multigrid(const SpatialPair& pair, double tau, MultigridOptions options)
    : tau_(tau), options_(options) {
    require(options_.cycles >= 1, "multigrid needs at least one cycle");
    if (!(options_.omega > 0.0 && options_.omega <= 1.0)) throw DomainError("Jacobi weight must lie in (0, 1]");
    const Grid2D& grid = pair.grid;
    require(grid.m <= options_.coarsest || grid.coarsenable(),
            "multigrid needs m + 1 to be a power of two (got m = " + std::to_string(grid.m) + ")");

    levels_.push_back({grid.m, pair.M, pair.K, pair.M.diagonal(), pair.K.diagonal(), {}, {}});
    Grid2D g = grid;
    double scale = 1.0;
    while (g.m > options_.coarsest) {
        const Grid2D coarse = g.coarsened();
        SparseMatrix P = prolongation(g.m);
        SparseMatrix R = P.transpose();
        SparseMatrix Mc, Kc;
        if (pair.rediscretize) {
            scale *= pair.coarse_scale;
            const SpatialPair cp = pair.rediscretize(coarse);
            Mc = scale * cp.M;
            Kc = scale * cp.K;
        } else {
            const Level& fine = levels_.back();
            Mc = R * (fine.M * P);
            Kc = R * (fine.K * P);
        }
        levels_.back().P = std::move(P);
        levels_.back().R = std::move(R);
        levels_.push_back({coarse.m, Mc, Kc, Mc.diagonal(), Kc.diagonal(), {}, {}});
        g = coarse;
    }
}

void Multigrid::apply_block(const Level& lv, cplx lambda, std::span<const cplx> x, std::span<cplx> out) const {
    lv.M.multiply<cplx>(x, out, lambda, 0.0);
    lv.K.multiply<cplx>(x, out, tau_, 1.0);
}

std::vector<cplx> Multigrid::residual(cplx lambda, std::span<const cplx> b, std::span<const cplx> x) const {
    std::vector<cplx> r(b.size());
    apply_block(levels_.front(), lambda, x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

void Multigrid::cycle(std::size_t level, cplx lambda, std::span<const cplx> b, std::span<cplx> x) const {
    const Level& lv = levels_[level];
    const std::size_t n = b.size();

    if (level + 1 == levels_.size()) {
        Eigen::MatrixXcd a = lambda * lv.M.to_dense().cast<cplx>() + tau_ * lv.K.to_dense().cast<cplx>();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        if (!(lu.rcond() > 1e-15)) throw SolverError("multigrid: singular coarsest-level block");
        Eigen::Map<const Eigen::VectorXcd> rhs(b.data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(n)) = lu.solve(rhs);
        return;
    }

    std::vector<cplx> diag(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = lambda * lv.diag_M[i] + tau_ * lv.diag_K[i];
        if (diag[i] == cplx(0.0)) throw SolverError("multigrid: zero diagonal in Jacobi smoother");
    }
    auto smooth = [&](int sweeps) {
        for (int s = 0; s < sweeps; ++s) {
            apply_block(lv, lambda, x, r);
            for (std::size_t i = 0; i < n; ++i) x[i] += options_.omega * (b[i] - r[i]) / diag[i];
        }
    };

    smooth(options_.pre_sweeps);
    apply_block(lv, lambda, x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    const std::size_t nc = lv.R.rows();
    std::vector<cplx> rc(nc), ec(nc, 0.0);
    lv.R.multiply<cplx>(r, rc);
    cycle(level + 1, lambda, rc, ec);
    lv.P.multiply<cplx>(ec, x, 1.0, 1.0);

    smooth(options_.post_sweeps);
}

void Multigrid::solve(cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const {
    require(rhs.size() == size() && z.size() == size(), "multigrid solve: length mismatch");
    std::fill(z.begin(), z.end(), cplx(0.0));
    double previous = norm2(rhs);
    if (previous == 0.0) return;
    // Below this the residual is rounding noise and may wobble upward without meaning anything.
    const double floor = 1e-13 * previous;
    for (int c = 0; c < options_.cycles; ++c) {
        cycle(0, lambda, rhs, z);
        if (levels_.size() == 1) return;  // direct solve
        const double current = norm2(residual(lambda, rhs, z));
        if (!(current <= previous)) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "multigrid diverged: residual grew from %.3e to %.3e in cycle %d", previous,
                          current, c + 1);
            throw SolverError(msg);
        }
        if (current <= floor) return;
        previous = current;
    }
}

std::vector<cplx> Multigrid::solve(cplx lambda, std::span<const cplx> rhs) const {
    std::vector<cplx> z(rhs.size());
    solve(lambda, rhs, z);
    return z;
}

}  // namespace bec
