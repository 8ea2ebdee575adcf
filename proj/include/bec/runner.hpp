#pragma once

#include "bec/analysis.hpp"
#include "bec/gmres.hpp"
#include "bec/preconditioner.hpp"
#include "bec/problems.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bec {

enum class PreconditionerKind { Bec, Bc, None };

std::string to_string(PreconditionerKind kind);
PreconditionerKind preconditioner_from_string(const std::string& name);

/// One experiment. The defaults reproduce Example 1 with BDF1 at N = 64, m = 63.
struct RunConfig {
    ProblemKind problem = ProblemKind::HeatConst;
    int scheme = 1;  ///< BDF order
    std::size_t steps = 64;
    std::size_t m = 63;
    double final_time = 1.0;
    PreconditionerKind preconditioner = PreconditionerKind::Bec;
    std::optional<double> epsilon;  ///< empty means min(0.5, 0.5 tau)
    InnerSolverKind inner = InnerSolverKind::Auto;
    int mg_cycles = 1;
    double mg_omega = 0.8;
    double tolerance = 1e-7;
    std::size_t restart = 50;
    std::size_t max_iterations = 2000;
    std::string output;        ///< results CSV path (empty: none)
    std::string field_output;  ///< final-time field CSV path (empty: none)
    std::uint64_t seed = 0;
};

/// Throws ConfigError when the configuration is inconsistent.
void validate(const RunConfig& config);

/// Epsilon the run will use (1 for BC, 0 when unpreconditioned).
double resolved_epsilon(const RunConfig& config);

/// One row of a results table, with the paper's columns.
struct ResultRecord {
    std::string problem;
    std::string scheme;
    std::string preconditioner;
    std::string inner;
    std::size_t steps = 0;
    std::size_t m = 0;
    std::size_t J = 0;
    std::size_t dof = 0;
    double epsilon = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double cpu = 0.0;
    double res = 0.0;
    std::optional<double> error;

    bool operator==(const ResultRecord&) const = default;
};

struct RunOutcome {
    ResultRecord record;
    SolveReport report;
    std::vector<double> solution;
    Grid2D grid;
};

/// Assemble, solve and (when paths are set) write the record and the field dump.
RunOutcome run(const RunConfig& config);

/// For every (N, m) cell runs BEC and BC with otherwise identical settings. Empty axes
/// fall back to the base configuration's value.
std::vector<ResultRecord> sweep(const RunConfig& base, const std::vector<std::size_t>& steps,
                                const std::vector<std::size_t>& sizes);

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_csv(std::istream& in);
void write_csv(const std::string& path, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_csv(const std::string& path);

/// Text table with BEC and BC side by side for each (N, m).
std::string format_table(const std::vector<ResultRecord>& records);

/// x, y, u rows for the last time block.
void write_field_csv(std::ostream& out, const Grid2D& grid, std::span<const double> solution);

struct VerifyConfig {
    std::vector<std::size_t> steps{3, 4, 8};
    std::vector<std::size_t> sizes{2, 3, 7};
    std::vector<double> epsilons{1.0, 0.5, 0.1, 0.01};
    std::vector<int> schemes{1, 2};
    std::vector<double> deltas{0.5, 0.9};
    bool rate_instance = true;  ///< also run the rate check at N = 16, m = 15
    std::size_t cap = 2000;
    std::uint64_t seed = 0;
};

struct VerifyRow {
    std::string pair;
    int scheme = 1;
    std::size_t steps = 0;
    std::size_t m = 0;
    double epsilon = 0.0;
    CheckReport check;
};

struct VerifyResult {
    std::vector<VerifyRow> rows;
    std::vector<std::string> notices;
    double seconds = 0.0;

    std::size_t failures() const;
    bool passed() const { return failures() == 0; }
};

/// Throws ConfigError for epsilon outside (0, 1] or an empty axis.
void validate(const VerifyConfig& config);

/// Every analysis check over the finite-difference and Q1 desk pairs (a = 1, T = 1).
VerifyResult verify(const VerifyConfig& config);

std::string format_verify_table(const VerifyResult& result);
void write_verify_csv(std::ostream& out, const VerifyResult& result);

}  // namespace bec
