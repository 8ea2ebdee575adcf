#pragma once

#include "bec/discretization.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bec {

enum class ProblemKind {
    HeatConst,  ///< Q1 heat equation, a = 1e-5, f = 0, u0 = x(x-1)y(y-1)
    HeatVar,    ///< finite-difference heat equation, a = 1e-5 sin(pi x y), known solution
    ConvDiff    ///< upwind convection-diffusion with circulating wind and a hot wall at x = 1
};

std::string to_string(ProblemKind kind);
ProblemKind problem_from_string(const std::string& name);

struct Problem {
    ProblemKind kind;
    AllAtOnceSystem system;
    /// u(x_i, y_j, t_n) stacked like the unknowns, when a closed form exists.
    std::optional<std::vector<double>> exact;
};

/// Diffusion coefficient scale shared by the two heat examples.
inline constexpr double heat_diffusion = 1e-5;
inline constexpr double convdiff_viscosity = 1.0 / 200.0;

SpatialPair heat_const_pair(std::size_t m);
SpatialPair heat_var_pair(std::size_t m);
SpatialPair convdiff_pair(std::size_t m);

ProblemData heat_const_data();
ProblemData heat_var_data();
ProblemData convdiff_data();

/// u = exp(-t) x(1-x) y(1-y).
double heat_var_solution(double x, double y, double t);

/// Example problem on an m x m interior grid with N steps of BDF(order) up to time T.
Problem make_problem(ProblemKind kind, int order, std::size_t steps, std::size_t m, double final_time = 1.0);

/// Samples u(., ., t_n) for n = 1..N on the interior nodes.
std::vector<double> sample_space_time(const Grid2D& grid, std::size_t steps, double final_time,
                                      const std::function<double(double, double, double)>& u);

}  // namespace bec
