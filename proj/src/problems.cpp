#include "bec/problems.hpp"

#include <cmath>
#include <numbers>

namespace bec {

using std::numbers::pi;

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::HeatConst: return "heat-const";
        case ProblemKind::HeatVar: return "heat-var";
        case ProblemKind::ConvDiff: return "convdiff";
    }
    return "unknown";
}

ProblemKind problem_from_string(const std::string& name) {
    if (name == "heat-const") return ProblemKind::HeatConst;
    if (name == "heat-var") return ProblemKind::HeatVar;
    if (name == "convdiff") return ProblemKind::ConvDiff;
    throw ConfigError("unknown problem '" + name + "' (expected heat-const, heat-var or convdiff)");
}

SpatialPair heat_const_pair(std::size_t m) { return build_heat_q1(Grid2D::unit_square(m), heat_diffusion); }

SpatialPair heat_var_pair(std::size_t m) {
    return build_heat_fd(Grid2D::unit_square(m),
                         Coefficient([](double x, double y) { return heat_diffusion * std::sin(pi * x * y); }));
}

SpatialPair convdiff_pair(std::size_t m) {
    const WindField wind = [](double x, double y) -> std::array<double, 2> {
        return {2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - y * y)};
    };
    return build_convdiff(Grid2D::square(m, -1.0, 1.0), convdiff_viscosity, wind);
}

ProblemData heat_const_data() {
    ProblemData d;
    d.initial = [](double x, double y) { return x * (x - 1.0) * y * (y - 1.0); };
    return d;
}

double heat_var_solution(double x, double y, double t) { return std::exp(-t) * x * (1.0 - x) * y * (1.0 - y); }

ProblemData heat_var_data() {
    ProblemData d;
    d.initial = [](double x, double y) { return heat_var_solution(x, y, 0.0); };
    // f = u_t - div(a grad u) for a = alpha sin(pi x y)
    d.source = [](double x, double y, double t) {
        const double alpha = heat_diffusion;
        const double s = std::sin(pi * x * y);
        const double c = std::cos(pi * x * y);
        const double px = x * (1.0 - x);
        const double py = y * (1.0 - y);
        const double flux = px * (2.0 * s - pi * c * x * (1.0 - 2.0 * y)) + py * (2.0 * s - pi * c * y * (1.0 - 2.0 * x));
        return std::exp(-t) * (alpha * flux - px * py);
    };
    return d;
}

ProblemData convdiff_data() {
    ProblemData d;
    d.boundary = [](double x, double, double t) {
        const double phi = std::abs(x - 1.0) < 1e-12 ? 1.0 : 0.0;
        return (1.0 - std::exp(-10.0 * t)) * phi;
    };
    return d;
}

std::vector<double> sample_space_time(const Grid2D& grid, std::size_t steps, double final_time,
                                      const std::function<double(double, double, double)>& u) {
    const double tau = final_time / static_cast<double>(steps);
    std::vector<double> out;
    out.reserve(steps * grid.unknowns());
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t = static_cast<double>(n) * tau;
        const auto block = grid.sample([&](double x, double y) { return u(x, y, t); });
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

Problem make_problem(ProblemKind kind, int order, std::size_t steps, std::size_t m, double final_time) {
    const TimeStencil stencil = bdf_stencil(order);
    switch (kind) {
        case ProblemKind::HeatConst: {
            auto pair = std::make_shared<const SpatialPair>(heat_const_pair(m));
            return {kind, assemble(pair, stencil, final_time, steps, heat_const_data()), std::nullopt};
        }
        case ProblemKind::HeatVar: {
            auto pair = std::make_shared<const SpatialPair>(heat_var_pair(m));
            auto exact = sample_space_time(pair->grid, steps, final_time, heat_var_solution);
            return {kind, assemble(pair, stencil, final_time, steps, heat_var_data()), std::move(exact)};
        }
        case ProblemKind::ConvDiff: {
            auto pair = std::make_shared<const SpatialPair>(convdiff_pair(m));
            return {kind, assemble(pair, stencil, final_time, steps, convdiff_data()), std::nullopt};
        }
    }
    throw ConfigError("unknown problem kind");
}

}  // namespace bec
