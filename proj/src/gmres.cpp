#include "bec/gmres.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace bec {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::pair<std::vector<double>, SolveReport> gmres_solve(const RealOperator& apply_a, const RealOperator& apply_pinv,
                                                        std::span<const double> b, const GmresConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    if (!(config.tolerance > 0.0 && config.tolerance < 1.0)) throw DomainError("GMRES tolerance must lie in (0, 1)");
    require(config.restart >= 1, "GMRES restart length must be at least 1");
    require(static_cast<bool>(apply_a), "GMRES needs an operator");
    const std::size_t n = b.size();
    require(config.initial_guess.empty() || config.initial_guess.size() == n, "GMRES initial guess length mismatch");

    std::vector<double> x = config.initial_guess.empty() ? std::vector<double>(n, 0.0) : config.initial_guess;
    std::vector<double> tmp(n), work(n);
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
        if (apply_pinv)
            apply_pinv(in, out);
        else
            std::copy(in.begin(), in.end(), out.begin());
    };
    // r = P^-1 (b - A x)
    auto residual = [&](std::span<double> r) {
        apply_a(x, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
        precondition(tmp, r);
    };

    SolveReport report;
    const std::size_t m = config.restart;
    std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));  // h[i][k]
    std::vector<double> cs(m), sn(m), g(m + 1), y(m);

    residual(v[0]);
    const double r0 = norm(v[0]);
    report.history.push_back(r0);
    if (r0 == 0.0) {
        report.converged = true;
    }
    const double target = config.tolerance * r0;

    while (!report.converged && report.iterations < config.max_iterations) {
        const double beta = norm(v[0]);
        if (beta <= target) {
            report.converged = true;
            break;
        }
        for (auto& e : v[0]) e /= beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        std::size_t k = 0;
        bool breakdown = false;
        for (; k < m && report.iterations < config.max_iterations; ++k) {
            apply_a(v[k], tmp);
            precondition(tmp, v[k + 1]);
            auto& w = v[k + 1];
            for (std::size_t i = 0; i <= k; ++i) {
                h[i][k] = dot(w, v[i]);
                for (std::size_t t = 0; t < n; ++t) w[t] -= h[i][k] * v[i][t];
            }
            h[k + 1][k] = norm(w);
            breakdown = h[k + 1][k] <= config.breakdown * r0;
            if (!breakdown)
                for (auto& e : w) e /= h[k + 1][k];

            for (std::size_t i = 0; i < k; ++i) {
                const double t0 = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t0;
            }
            const double rho = std::hypot(h[k][k], h[k + 1][k]);
            cs[k] = rho == 0.0 ? 1.0 : h[k][k] / rho;
            sn[k] = rho == 0.0 ? 0.0 : h[k + 1][k] / rho;
            h[k][k] = rho;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            ++report.iterations;
            report.history.push_back(std::abs(g[k + 1]));
            if (std::abs(g[k + 1]) <= target || breakdown) {
                ++k;
                break;
            }
        }

        // back substitution on the k x k triangle
        for (std::size_t i = k; i-- > 0;) {
            double s = g[i];
            for (std::size_t t = i + 1; t < k; ++t) s -= h[i][t] * y[t];
            if (h[i][i] == 0.0) throw SolverError("GMRES: singular Hessenberg system");
            y[i] = s / h[i][i];
        }
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t t = 0; t < n; ++t) x[t] += y[i] * v[i][t];

        if (report.history.back() <= target) {
            report.converged = true;
            break;
        }
        ++report.restarts;
        residual(v[0]);
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(x), std::move(report)};
}

ResidualMetrics residual_metrics(const AllAtOnceSystem& system, std::span<const double> u,
                                 std::optional<std::span<const double>> exact) {
    require(u.size() == system.size(), "residual_metrics: length mismatch");
    const auto lu = system.apply(u);
    const auto& f = system.rhs();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += (f[i] - lu[i]) * (f[i] - lu[i]);
        den += f[i] * f[i];
    }
    ResidualMetrics out;
    out.res = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    if (exact) {
        require(exact->size() == u.size(), "residual_metrics: exact solution length mismatch");
        double e = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - (*exact)[i]));
        out.error = e;
    }
    return out;
}

}  // namespace bec
