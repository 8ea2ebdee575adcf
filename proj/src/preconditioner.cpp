#include "bec/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace bec {

double choose_epsilon(double tau) {
    if (!(tau > 0.0)) throw DomainError("choose_epsilon: tau must be positive");
    return std::min(0.5, 0.5 * tau);
}

namespace {

void check_epsilon(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("epsilon must lie in (0, 1], got " + std::to_string(eps));
}

cplx root_of_unity_power(std::size_t k, std::size_t n) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

std::vector<cplx> bec_eigenvalues(const TimeStencil& stencil, double eps, std::size_t n) {
    check_epsilon(eps);
    require(n >= 1, "bec_eigenvalues: N must be positive");
    std::vector<cplx> lambda(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j <= stencil.steps(); ++j)
            lambda[k] += stencil.r[j] * std::pow(eps, static_cast<double>(j) / static_cast<double>(n)) *
                         root_of_unity_power(k * j, n);
    return lambda;
}

std::vector<cplx> bec_eigenvalues_fft(const TimeStencil& stencil, double eps, std::size_t n) {
    check_epsilon(eps);
    require(n >= 1, "bec_eigenvalues_fft: N must be positive");
    require(stencil.steps() < n, "bec_eigenvalues_fft: needs p < N");
    std::vector<cplx> c(n, 0.0);
    for (std::size_t j = 0; j <= stencil.steps(); ++j)
        c[j] = stencil.r[j] * std::pow(eps, static_cast<double>(j) / static_cast<double>(n));
    FourierPlan(n, FourierDirection::Inverse).apply(c);
    const double root_n = std::sqrt(static_cast<double>(n));
    for (auto& x : c) x *= root_n;
    return c;
}

Eigen::MatrixXd reconstruct_R_eps(const TimeStencil& stencil, double eps, std::size_t n) {
    const auto lambda = bec_eigenvalues(stencil, eps, n);
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd f(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i)
        for (Eigen::Index k = 0; k < nn; ++k)
            f(i, k) = root_of_unity_power(static_cast<std::size_t>(i * k), n) / std::sqrt(static_cast<double>(n));
    Eigen::VectorXcd d(nn), lam(nn);
    for (Eigen::Index k = 0; k < nn; ++k) {
        d(k) = std::pow(eps, static_cast<double>(k) / static_cast<double>(n));
        lam(k) = lambda[static_cast<std::size_t>(k)];
    }
    const Eigen::MatrixXcd fd = f * d.asDiagonal();
    const Eigen::MatrixXcd r = d.cwiseInverse().asDiagonal() * f.adjoint() * lam.asDiagonal() * fd;
    return r.real();
}

std::string to_string(InnerSolverKind kind) {
    switch (kind) {
        case InnerSolverKind::Auto: return "auto";
        case InnerSolverKind::FstDirect: return "fst";
        case InnerSolverKind::Multigrid: return "multigrid";
        case InnerSolverKind::DenseDirect: return "dense";
    }
    return "?";
}

InnerSolverKind inner_solver_from_string(const std::string& name) {
    if (name == "auto") return InnerSolverKind::Auto;
    if (name == "fst") return InnerSolverKind::FstDirect;
    if (name == "multigrid" || name == "mg") return InnerSolverKind::Multigrid;
    if (name == "dense") return InnerSolverKind::DenseDirect;
    throw ConfigError("unknown inner solver '" + name + "' (expected auto, fst, multigrid or dense)");
}

FstBlockSolver::FstBlockSolver(const SpatialPair& pair, double tau)
    : m_(pair.grid.m),
      tau_(tau),
      rows_(pair.grid.m, Batch{pair.grid.m, 1, pair.grid.m}),
      cols_(pair.grid.m, Batch{pair.grid.m, pair.grid.m, 1}) {
    if (!pair.fst_diagonalizable())
        throw ConfigError("the fast sine transform solver needs a constant-coefficient heat pair");
    spectrum_ = *pair.spectrum;
}

void FstBlockSolver::transform(std::span<double> v) const {
    rows_.apply(v);
    cols_.apply(v);
}

void FstBlockSolver::solve(cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const {
    const std::size_t n = m_ * m_;
    require(rhs.size() == n && z.size() == n, "inner_solve_fst: length mismatch");
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = rhs[i].real();
        im[i] = rhs[i].imag();
    }
    transform(re);
    transform(im);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx denom = lambda * spectrum_.mass[i] + tau_ * spectrum_.stiffness[i];
        if (denom == cplx(0.0)) throw SolverError("inner_solve_fst: zero eigenvalue in block");
        const cplx q = cplx(re[i], im[i]) / denom;
        re[i] = q.real();
        im[i] = q.imag();
    }
    transform(re);
    transform(im);
    for (std::size_t i = 0; i < n; ++i) z[i] = {re[i], im[i]};
}

void FstBlockSolver::solve(std::size_t, cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const {
    solve(lambda, rhs, z);
}

MultigridBlockSolver::MultigridBlockSolver(const SpatialPair& pair, double tau, MultigridOptions options)
    : mg_(pair, tau, options) {}

void MultigridBlockSolver::solve(std::size_t, cplx lambda, std::span<const cplx> rhs, std::span<cplx> z) const {
    mg_.solve(lambda, rhs, z);
}

DenseBlockSolver::DenseBlockSolver(const SpatialPair& pair, double tau, std::span<const cplx> lambdas,
                                   std::size_t cap) {
    if (pair.size() > cap)
        throw ConfigError("dense inner solver limited to J <= " + std::to_string(cap) + " (J = " +
                          std::to_string(pair.size()) + ")");
    const Eigen::MatrixXcd m = pair.M.to_dense().cast<cplx>();
    const Eigen::MatrixXcd k = pair.K.to_dense().cast<cplx>();
    lu_.reserve(lambdas.size());
    for (const cplx lambda : lambdas) {
        lu_.emplace_back(Eigen::MatrixXcd(lambda * m + tau * k));
        if (!(lu_.back().rcond() > 1e-15)) throw SolverError("dense inner solver: singular block");
    }
}

void DenseBlockSolver::solve(std::size_t k, cplx, std::span<const cplx> rhs, std::span<cplx> z) const {
    require(k < lu_.size(), "dense inner solver: block index out of range");
    const auto n = static_cast<Eigen::Index>(rhs.size());
    require(z.size() == rhs.size() && n == lu_[k].rows(), "inner_solve_dense: length mismatch");
    Eigen::Map<Eigen::VectorXcd>(z.data(), n) = lu_[k].solve(Eigen::Map<const Eigen::VectorXcd>(rhs.data(), n));
}

std::vector<cplx> inner_solve_fst(cplx lambda, const SpatialPair& pair, double tau, std::span<const cplx> rhs) {
    std::vector<cplx> z(rhs.size());
    FstBlockSolver(pair, tau).solve(lambda, rhs, z);
    return z;
}

std::vector<cplx> inner_solve_multigrid(cplx lambda, const SpatialPair& pair, double tau, std::span<const cplx> rhs,
                                        int cycles, MultigridOptions options) {
    options.cycles = cycles;
    return Multigrid(pair, tau, options).solve(lambda, rhs);
}

std::vector<cplx> inner_solve_dense(cplx lambda, const SpatialPair& pair, double tau, std::span<const cplx> rhs,
                                    std::size_t cap) {
    const cplx one[] = {lambda};
    DenseBlockSolver solver(pair, tau, one, cap);
    std::vector<cplx> z(rhs.size());
    solver.solve(0, lambda, rhs, z);
    return z;
}

namespace {

std::unique_ptr<BlockSolver> make_inner(const SpatialPair& pair, double tau, const PreconditionerOptions& opt,
                                        std::span<const cplx> lambdas) {
    InnerSolverKind kind = opt.inner;
    if (kind == InnerSolverKind::Auto) {
        if (pair.fst_diagonalizable())
            kind = InnerSolverKind::FstDirect;
        else if (pair.grid.m <= opt.multigrid.coarsest || pair.grid.coarsenable())
            kind = InnerSolverKind::Multigrid;
        else
            kind = InnerSolverKind::DenseDirect;
    }
    switch (kind) {
        case InnerSolverKind::FstDirect: return std::make_unique<FstBlockSolver>(pair, tau);
        case InnerSolverKind::Multigrid: return std::make_unique<MultigridBlockSolver>(pair, tau, opt.multigrid);
        case InnerSolverKind::DenseDirect:
            return std::make_unique<DenseBlockSolver>(pair, tau, lambdas, opt.dense_cap);
        case InnerSolverKind::Auto: break;
    }
    throw ConfigError("unresolved inner solver");
}

}  // namespace

BECPreconditioner::BECPreconditioner(const AllAtOnceSystem& system, PreconditionerOptions options)
    : n_(system.steps()),
      j_(system.block_size()),
      options_(options),
      to_fourier_(system.steps(), FourierDirection::Inverse, Batch{system.block_size(), system.block_size(), 1}),
      from_fourier_(system.steps(), FourierDirection::Forward, Batch{system.block_size(), system.block_size(), 1}) {
    const double eps = options_.epsilon;
    check_epsilon(eps);
    if (eps < 1e-8) throw DomainError("epsilon below the supported floor of 1e-8");
    const double range = std::pow(eps, -static_cast<double>(n_ - 1) / static_cast<double>(n_));
    if (!(range < 1e12)) throw DomainError("eps^(-(N-1)/N) exceeds 1e12; D_eps scaling would lose all accuracy");

    lambda_ = bec_eigenvalues(system.stencil(), eps, n_);
    scale_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) scale_[k] = std::pow(eps, static_cast<double>(k) / static_cast<double>(n_));

    const std::size_t needed = options_.conjugate_reduction ? (n_ / 2 + 1) : n_;
    inner_ = make_inner(system.pair(), system.tau(), options_, std::span(lambda_).first(std::min(needed, n_)));
}

std::size_t BECPreconditioner::solves_per_apply() const noexcept {
    return options_.conjugate_reduction ? std::min(n_ / 2 + 1, n_) : n_;
}

void BECPreconditioner::reset_counters() const noexcept {
    block_solves_ = 0;
    applications_ = 0;
}

void BECPreconditioner::apply(std::span<const double> y, std::span<double> z) const {
    require(y.size() == size() && z.size() == size(), "apply_inverse: length mismatch");
    std::vector<cplx> w(size());
    for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t s = 0; s < j_; ++s) w[k * j_ + s] = scale_[k] * y[k * j_ + s];
    to_fourier_.apply(w);

    std::vector<cplx> zt(size());
    const std::size_t solved = solves_per_apply();
    const auto count = static_cast<long>(solved);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long kk = 0; kk < count; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        try {
            inner_->solve(k, lambda_[k], std::span<const cplx>(w).subspan(k * j_, j_), std::span(zt).subspan(k * j_, j_));
        } catch (...) {
#pragma omp critical(bec_block_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t k = solved; k < n_; ++k) {
        const cplx* src = zt.data() + (n_ - k) * j_;
        cplx* dst = zt.data() + k * j_;
        for (std::size_t s = 0; s < j_; ++s) dst[s] = std::conj(src[s]);
    }
    block_solves_ += solved;
    ++applications_;

    from_fourier_.apply(zt);
    double re2 = 0.0, im2 = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
        const double inv = 1.0 / scale_[k];
        for (std::size_t s = 0; s < j_; ++s) {
            const cplx v = inv * zt[k * j_ + s];
            z[k * j_ + s] = v.real();
            re2 += v.real() * v.real();
            im2 += v.imag() * v.imag();
        }
    }
    if (std::sqrt(im2) > options_.imaginary_tolerance * std::sqrt(re2 + im2))
        throw SolverError("apply_inverse: imaginary residue " + std::to_string(std::sqrt(im2)) +
                          " exceeds tolerance; conjugate symmetry lost");
}

std::vector<double> BECPreconditioner::apply(std::span<const double> y) const {
    std::vector<double> z(y.size());
    apply(y, z);
    return z;
}

}  // namespace bec
