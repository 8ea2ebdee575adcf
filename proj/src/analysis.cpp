#include "bec/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <cstdio>

namespace bec {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

MatrixXd inverse_sqrt(const MatrixXd& spd) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(spd);
    return es.operatorInverseSqrt();
}

MatrixXd symmetrized(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

/// Backward Euler, the case the closed forms are stated for.
bool one_step(const DenseProbe& probe) {
    const auto& r = probe.stencil.r;
    return r.size() == 2 && r[0] == 1.0 && r[1] == -1.0;
}

/// Eigenvalues predicted for P^-1 L.
std::vector<cplx> predicted_spectrum(const DenseProbe& probe) {
    const std::size_t n = probe.N;
    const double eps = probe.epsilon;
    const MatrixXd mh = inverse_sqrt(probe.M);
    std::vector<cplx> out;
    out.reserve(n * probe.J);
    if (one_step(probe)) {
        const MatrixXd s = symmetrized(mh * (probe.M + probe.tau * probe.K) * mh);
        const VectorXd lambda = Eigen::SelfAdjointEigenSolver<MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues();
        out.assign((n - 1) * probe.J, cplx(1.0, 0.0));
        for (double l : lambda) out.emplace_back(1.0 + eps / (std::pow(l, static_cast<double>(n)) - eps));
        return out;
    }
    // R kron M + tau I kron K decouples along the eigenvectors of M^-1/2 K M^-1/2.
    const MatrixXd kt = symmetrized(mh * probe.K * mh);
    const VectorXd mu = Eigen::SelfAdjointEigenSolver<MatrixXd>(kt, Eigen::EigenvaluesOnly).eigenvalues();
    const MatrixXd r = dense_time_matrix(probe.stencil, n, 0.0);
    const MatrixXd re = dense_time_matrix(probe.stencil, n, eps);
    const MatrixXd id = MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (double m : mu) {
        const MatrixXd t = (re + probe.tau * m * id).partialPivLu().solve(r + probe.tau * m * id);
        const VectorXcd ev = Eigen::EigenSolver<MatrixXd>(t, false).eigenvalues();
        out.insert(out.end(), ev.data(), ev.data() + ev.size());
    }
    return out;
}

/// Greedy nearest pairing; returns the largest pairing distance.
double match_multisets(std::vector<cplx> computed, const std::vector<cplx>& predicted) {
    double worst = 0.0;
    std::vector<bool> used(computed.size(), false);
    for (const cplx& p : predicted) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < computed.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(computed[i] - p);
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<cplx> spectrum_of(const MatrixXd& a) {
    const VectorXcd ev = Eigen::EigenSolver<MatrixXd>(a, false).eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

MatrixXd dense_time_matrix(const TimeStencil& stencil, std::size_t n, double epsilon) {
    const auto nn = static_cast<Eigen::Index>(n);
    MatrixXd r = MatrixXd::Zero(nn, nn);
    const std::size_t p = stencil.steps();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k <= p; ++k) {
            if (i >= k)
                r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - k)) += stencil.r[k];
            else if (epsilon != 0.0)
                r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n + i - k)) += epsilon * stencil.r[k];
        }
    return r;
}

DenseProbe make_probe(const AllAtOnceSystem& system, double epsilon, std::size_t cap) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    const std::size_t size = system.size();
    if (size > cap)
        throw ConfigError("dense probe of size " + std::to_string(size) + " exceeds cap " + std::to_string(cap));
    DenseProbe probe;
    probe.N = system.steps();
    probe.J = system.block_size();
    probe.tau = system.tau();
    probe.final_time = system.final_time();
    probe.epsilon = epsilon;
    probe.stencil = system.stencil();
    probe.symmetric_K = system.pair().symmetric_K;
    probe.M = system.pair().M.to_dense();
    probe.K = system.pair().K.to_dense();

    const auto n = static_cast<Eigen::Index>(size);
    probe.L.resize(n, n);
    std::vector<double> e(size, 0.0), col(size);
    for (std::size_t c = 0; c < size; ++c) {
        e[c] = 1.0;
        system.apply(e, col);
        e[c] = 0.0;
        probe.L.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const VectorXd>(col.data(), n);
    }
    const MatrixXd id = MatrixXd::Identity(static_cast<Eigen::Index>(probe.N), static_cast<Eigen::Index>(probe.N));
    probe.P = kron(dense_time_matrix(probe.stencil, probe.N, epsilon), probe.M) + probe.tau * kron(id, probe.K);
    probe.PinvL = probe.P.partialPivLu().solve(probe.L);
    return probe;
}

CheckReport check_inverse_formula(const DenseProbe& probe, double tolerance) {
    CheckReport rep;
    rep.name = "inverse_formula";
    const std::size_t p = probe.stencil.steps();
    const auto j = static_cast<Eigen::Index>(probe.J);
    const auto n = static_cast<Eigen::Index>(probe.N * probe.J);
    const auto pj = static_cast<Eigen::Index>(p) * j;
    if (probe.N < p + 2) {
        rep.skipped = rep.passed = true;
        rep.detail = "needs N >= p + 2";
        return rep;
    }
    const MatrixXd linv = probe.L.partialPivLu().inverse();
    const MatrixXd pinv = probe.P.partialPivLu().inverse();
    const double eps = probe.epsilon;

    MatrixXd z;
    if (one_step(probe)) {
        const MatrixXd a0 = probe.M + probe.tau * probe.K;
        const MatrixXd minv = probe.M.inverse();
        MatrixXd g = a0.partialPivLu().solve(probe.M);
        MatrixXd power = MatrixXd::Identity(j, j);
        for (std::size_t k = 0; k < probe.N; ++k) power = power * g;
        z = (MatrixXd::Identity(j, j) - eps * power) * minv / eps;
    } else {
        MatrixXd c = MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b)
                c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = eps * probe.stencil.r[p - b + a];
        const MatrixXd w = kron(c, probe.M);
        z = -w.inverse() - linv.block(n - pj, 0, pj, pj);
    }
    const MatrixXd formula =
        linv + linv.leftCols(pj) * z.partialPivLu().solve(linv.bottomRows(pj));
    rep.measured = (formula - pinv).norm() / pinv.norm();
    rep.bound = tolerance;
    rep.passed = rep.measured <= tolerance;
    rep.detail = format("relative Frobenius error %.3e (tolerance %.0e)", rep.measured, tolerance);
    return rep;
}

CheckReport check_spectrum(const DenseProbe& probe, double tolerance) {
    CheckReport rep;
    rep.name = "spectrum";
    if (!probe.symmetric_K) {
        rep.skipped = rep.passed = true;
        rep.detail = "needs symmetric K";
        return rep;
    }
    const auto computed = spectrum_of(probe.PinvL);
    const auto predicted = predicted_spectrum(probe);
    auto near_one = [&](const std::vector<cplx>& v) {
        return static_cast<std::size_t>(
            std::count_if(v.begin(), v.end(), [&](cplx z) { return std::abs(z - 1.0) <= tolerance; }));
    };
    const std::size_t units = near_one(computed);
    const std::size_t expected_units = near_one(predicted);
    const std::size_t floor_units = (probe.N - probe.stencil.steps()) * probe.J;
    rep.measured = match_multisets(computed, predicted);
    rep.bound = tolerance;
    rep.passed = rep.measured <= tolerance && units == expected_units && units >= floor_units;
    rep.detail = format("max pairing distance %.3e (tolerance %.0e); %zu eigenvalues at 1, predicted %zu (at least %zu)",
                        rep.measured, tolerance, units, expected_units, floor_units);
    return rep;
}

CheckReport check_clustering(const DenseProbe& probe, double eta) {
    CheckReport rep;
    rep.name = "clustering";
    if (!one_step(probe) || !(probe.epsilon < 1.0) || !(eta < 1.0) || eta < probe.epsilon) {
        rep.skipped = rep.passed = true;
        rep.detail = "needs p = 1 and eps <= eta < 1";
        return rep;
    }
    double worst = 0.0;
    for (const cplx& z : spectrum_of(probe.PinvL)) worst = std::max(worst, std::abs(z - 1.0));
    rep.measured = worst;
    rep.bound = probe.epsilon / (1.0 - eta);
    rep.passed = rep.measured <= rep.bound;
    rep.detail = format("max |lambda - 1| = %.3e, radius %.3e", rep.measured, rep.bound);
    return rep;
}

CheckReport check_rank_defect(const DenseProbe& probe, double relative_threshold) {
    CheckReport rep;
    rep.name = "rank_defect";
    const auto n = probe.PinvL.rows();
    const MatrixXd diff = probe.PinvL - MatrixXd::Identity(n, n);
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(diff).singularValues();
    const double cut = relative_threshold * sv(0);
    const auto rank = static_cast<std::size_t>((sv.array() > cut).count());
    const std::size_t expected = probe.stencil.steps() * probe.J;
    rep.measured = static_cast<double>(rank);
    rep.bound = static_cast<double>(expected);
    rep.passed = rank == expected;
    rep.detail = format("rank %zu, expected %zu", rank, expected);
    if (rank < static_cast<std::size_t>(n) && rank > 0)
        rep.detail += format("; sigma_r = %.3e, sigma_(r+1) = %.3e", sv(static_cast<Eigen::Index>(rank) - 1),
                             sv(static_cast<Eigen::Index>(rank)));
    return rep;
}

DiagonalizationReport check_diagonalization(const DenseProbe& probe, double tolerance) {
    DiagonalizationReport out;
    out.check.name = "diagonalization";
    if (!one_step(probe) || !probe.symmetric_K) {
        out.check.skipped = out.check.passed = true;
        out.check.detail = "needs p = 1 and symmetric K";
        return out;
    }
    const auto j = static_cast<Eigen::Index>(probe.J);
    const auto n = probe.L.rows();
    const double eps = probe.epsilon;
    const MatrixXd a0 = probe.M + probe.tau * probe.K;
    const MatrixXd mh = inverse_sqrt(probe.M);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(mh * a0 * mh));
    const VectorXd s = es.eigenvalues();
    const MatrixXd v = mh * es.eigenvectors();

    // d - 1 = eps / (s^N - eps), kept apart from d so tiny gaps survive rounding.
    VectorXd dm1(j);
    for (Eigen::Index i = 0; i < j; ++i) dm1(i) = eps / (std::pow(s(i), static_cast<double>(probe.N)) - eps);

    MatrixXd g = a0.partialPivLu().solve(probe.M);
    MatrixXd power = MatrixXd::Identity(j, j);
    for (std::size_t k = 0; k < probe.N; ++k) power = power * g;
    const MatrixXd z = (MatrixXd::Identity(j, j) - eps * power) * probe.M.inverse() / eps;

    MatrixXd e1 = MatrixXd::Zero(n, j);
    e1.topRows(j).setIdentity();
    const MatrixXd first_column = probe.L.partialPivLu().solve(e1);  // (L^-1) E_1
    MatrixXd x = first_column * z.partialPivLu().solve(v);
    for (Eigen::Index i = 0; i < j; ++i) {
        x.col(i) *= -1.0 / dm1(i);  // (I - D)^-1
        x.col(i).normalize();
    }
    MatrixXd vhat = MatrixXd::Zero(n, n);
    vhat.topLeftCorner(n - j, n - j).setIdentity();
    vhat.rightCols(j) = x;

    // L V^ - P V^ D^ = (L - P) V^ - P V^ (D^ - I)
    MatrixXd residual = (probe.L - probe.P) * vhat;
    residual.rightCols(j) -= probe.P * x * dm1.asDiagonal();
    const double rel = residual.norm() / (probe.L * vhat).norm();
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(vhat).singularValues();

    out.margin = dm1.minCoeff();
    out.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    out.check.measured = rel;
    out.check.bound = tolerance;
    out.check.passed = rel <= tolerance && out.margin > 0.0;
    out.check.detail =
        format("residual %.3e, min(d - 1) = %.3e, kappa(V) = %.3e", rel, out.margin, out.condition_number);
    return out;
}

double mass_constant(const MatrixXd& M) {
    const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(symmetrized(M), Eigen::EigenvaluesOnly).eigenvalues();
    if (!(ev(0) > 0.0)) throw DomainError("mass matrix is not positive definite");
    return std::sqrt(ev(ev.size() - 1) / ev(0));
}

CheckReport check_norm_bound(const DenseProbe& probe, double eta) {
    CheckReport rep;
    rep.name = "norm_bound";
    if (!one_step(probe) || !probe.symmetric_K || !(probe.epsilon < 1.0) || !(eta < 1.0) || eta < probe.epsilon) {
        rep.skipped = rep.passed = true;
        rep.detail = "needs p = 1, symmetric K and eps <= eta < 1";
        return rep;
    }
    const auto n = probe.PinvL.rows();
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(probe.PinvL - MatrixXd::Identity(n, n)).singularValues();
    const double c0 = mass_constant(probe.M);
    rep.measured = sv(0);
    rep.bound = probe.epsilon * c0 * std::sqrt(static_cast<double>(probe.N)) / (1.0 - eta);
    rep.passed = rep.measured <= rep.bound;
    rep.detail = format("||P^-1 L - I||_2 = %.3e, bound %.3e", rep.measured, rep.bound);
    return rep;
}

double rate_epsilon(double delta, double tau, double final_time, double c0) {
    const double a = delta * std::sqrt(tau);
    return a / (a + c0 * std::sqrt(final_time));
}

CheckReport check_gmres_rate(const AllAtOnceSystem& system, double delta, std::uint64_t seed, double tolerance) {
    CheckReport rep;
    rep.name = "gmres_rate";
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    const auto& r = system.stencil().r;
    if (r.size() != 2 || r[0] != 1.0 || r[1] != -1.0 || !system.pair().symmetric_K) {
        rep.skipped = rep.passed = true;
        rep.detail = "needs p = 1 and symmetric K";
        return rep;
    }
    if (system.block_size() > 4096) throw ConfigError("rate check needs J <= 4096 for the dense mass constant");
    const double c0 = mass_constant(system.pair().M.to_dense());
    PreconditionerOptions options;
    options.epsilon = rate_epsilon(delta, system.tau(), system.final_time(), c0);
    const BECPreconditioner prec(system, options);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> b(system.size());
    for (auto& e : b) e = normal(rng);

    GmresConfig config;
    config.tolerance = tolerance;
    config.restart = 200;
    config.max_iterations = 200;
    const auto result = gmres_solve([&](auto v, auto out) { system.apply(v, out); },
                                    [&](auto v, auto out) { prec.apply(v, out); }, b, config);
    const auto& h = result.second.history;
    const double rate = 2.0 * std::sqrt(delta) / (1.0 + delta);
    double worst = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k)
        worst = std::max(worst, h[k] / h[0] / std::pow(rate, static_cast<double>(k)));
    rep.measured = worst;
    rep.bound = 1.0;
    rep.passed = worst <= 1.0 + 1e-12;
    rep.detail = format("delta %.2f, eps = b_tau = %.3e, %zu iterations, max ratio to envelope %.3e", delta,
                        options.epsilon, result.second.iterations, worst);
    return rep;
}

std::vector<ComparisonRow> compare_bc_bec(const AllAtOnceSystem& system, const GmresConfig& config,
                                          const std::optional<std::vector<double>>& exact, InnerSolverKind inner) {
    std::vector<ComparisonRow> rows;
    for (const auto& [name, eps] : {std::pair<std::string, double>{"bc", 1.0}, {"bec", choose_epsilon(system.tau())}}) {
        PreconditionerOptions options;
        options.epsilon = eps;
        options.inner = inner;
        const BECPreconditioner prec(system, options);
        auto [u, report] = gmres_solve([&](auto v, auto out) { system.apply(v, out); },
                                       [&](auto v, auto out) { prec.apply(v, out); }, system.rhs(), config);
        const auto metrics = exact ? residual_metrics(system, u, std::span<const double>(*exact))
                                   : residual_metrics(system, u);
        report.res = metrics.res;
        report.error = metrics.error;
        rows.push_back({name, eps, std::move(report)});
    }
    return rows;
}

}  // namespace bec
