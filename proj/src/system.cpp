#include "bec/discretization.hpp"

#include <algorithm>
#include <string>

namespace bec {

TimeStencil bdf_stencil(int order) {
    switch (order) {
        case 1: return {{1.0, -1.0}};
        case 2: return {{1.5, -2.0, 0.5}};
        default: throw DomainError("unsupported BDF order " + std::to_string(order) + " (expected 1 or 2)");
    }
}

AllAtOnceSystem::AllAtOnceSystem(std::shared_ptr<const SpatialPair> pair, TimeStencil stencil, std::size_t steps,
                                 double final_time, std::vector<double> rhs, std::vector<double> initial)
    : pair_(std::move(pair)),
      stencil_(std::move(stencil)),
      steps_(steps),
      final_time_(final_time),
      rhs_(std::move(rhs)),
      initial_(std::move(initial)) {
    require(pair_ != nullptr, "all-at-once system needs a spatial pair");
    require(steps_ >= 1, "all-at-once system needs N >= 1");
    require(stencil_.r.size() >= 2 && stencil_.r[0] > 0.0, "time stencil needs r_0 > 0 and p >= 1");
    if (!(final_time_ > 0.0)) throw DomainError("final time must be positive");
    require(pair_->M.rows() == pair_->K.rows() && pair_->M.cols() == pair_->K.cols(), "M and K sizes differ");
    require(rhs_.size() == size(), "rhs length " + std::to_string(rhs_.size()) + " != N*J = " + std::to_string(size()));
    require(initial_.size() == block_size(), "initial data length mismatch");
}

void AllAtOnceSystem::apply(std::span<const double> v, std::span<double> out) const {
    const std::size_t j = block_size();
    require(v.size() == size() && out.size() == size(), "apply_L: length mismatch");
    const double tau = this->tau();
    const auto& r = stencil_.r;
    std::vector<double> mv(j);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t n = 0; n < steps_; ++n) {
        auto vn = v.subspan(n * j, j);
        pair_->K.multiply<double>(vn, out.subspan(n * j, j), tau, 1.0);
        pair_->M.multiply<double>(vn, mv);
        // block n contributes r_k M v^n to block n + k
        const std::size_t last = std::min(stencil_.steps(), steps_ - 1 - n);
        for (std::size_t k = 0; k <= last; ++k) {
            double* dst = out.data() + (n + k) * j;
            const double rk = r[k];
            for (std::size_t i = 0; i < j; ++i) dst[i] += rk * mv[i];
        }
    }
}

std::vector<double> AllAtOnceSystem::apply(std::span<const double> v) const {
    std::vector<double> out(v.size());
    apply(v, out);
    return out;
}

ToeplitzSpec AllAtOnceSystem::time_matrix() const {
    ToeplitzSpec spec{std::vector<double>(steps_, 0.0), std::vector<double>(steps_, 0.0)};
    for (std::size_t k = 0; k <= stencil_.steps() && k < steps_; ++k) spec.first_column[k] = stencil_.r[k];
    spec.first_row[0] = stencil_.r[0];
    return spec;
}

AllAtOnceSystem assemble(std::shared_ptr<const SpatialPair> pair, const TimeStencil& stencil, double final_time,
                         std::size_t steps, const ProblemData& data) {
    require(pair != nullptr, "assemble: missing spatial pair");
    require(steps >= 1, "assemble: N must be at least 1");
    if (!(final_time > 0.0)) throw DomainError("assemble: final time must be positive");
    const Grid2D& grid = pair->grid;
    const std::size_t j = pair->size();
    const std::size_t p = stencil.steps();
    const double tau = final_time / static_cast<double>(steps);
    const auto& r = stencil.r;

    const std::vector<double> u0 = grid.sample(data.initial);
    const std::vector<double> mu0 = spmv(pair->M, u0);

    // Boundary samples g(., t_k) for k = 0..N; indices below zero reuse t_0.
    const bool has_boundary = static_cast<bool>(data.boundary) && !pair->boundary_nodes.empty();
    std::vector<std::vector<double>> g;
    if (has_boundary) {
        g.reserve(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * tau;
            g.push_back(pair->boundary_values([&](double x, double y) { return data.boundary(x, y, t); }));
        }
    }

    std::vector<double> rhs(steps * j, 0.0);
    std::vector<double> work(j);
    for (std::size_t n = 1; n <= steps; ++n) {
        std::span<double> block(rhs.data() + (n - 1) * j, j);
        const double t = static_cast<double>(n) * tau;
        if (data.source) {
            // load vector M f(., t_n)
            const auto fn = grid.sample([&](double x, double y) { return data.source(x, y, t); });
            pair->M.multiply<double>(fn, block, tau, 0.0);
        }
        // history that falls before t_1 moves to the right-hand side
        for (std::size_t k = 1; k <= p; ++k)
            if (n <= k)
                for (std::size_t i = 0; i < j; ++i) block[i] -= r[k] * mu0[i];
        if (has_boundary) {
            pair->K_boundary.multiply<double>(g[n], block, -tau, 1.0);
            for (std::size_t k = 0; k <= p; ++k) {
                const std::size_t idx = n >= k ? n - k : 0;
                pair->M_boundary.multiply<double>(g[idx], block, -r[k], 1.0);
            }
        }
    }
    return AllAtOnceSystem(std::move(pair), stencil, steps, final_time, std::move(rhs), u0);
}

}  // namespace bec
