#include "bec/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bec {

namespace {

std::string scheme_name(int order) { return "bdf" + std::to_string(order); }

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

const char* const csv_header = "problem,scheme,preconditioner,inner,N,m,J,DoF,epsilon,Iter,converged,CPU,RES,E";

}  // namespace

std::string to_string(PreconditionerKind kind) {
    switch (kind) {
        case PreconditionerKind::Bec: return "bec";
        case PreconditionerKind::Bc: return "bc";
        case PreconditionerKind::None: return "none";
    }
    return "unknown";
}

PreconditionerKind preconditioner_from_string(const std::string& name) {
    if (name == "bec") return PreconditionerKind::Bec;
    if (name == "bc") return PreconditionerKind::Bc;
    if (name == "none") return PreconditionerKind::None;
    throw ConfigError("unknown preconditioner '" + name + "' (expected bec, bc or none)");
}

void validate(const RunConfig& c) {
    if (c.scheme != 1 && c.scheme != 2) throw ConfigError("scheme must be bdf1 or bdf2");
    if (c.steps < 1) throw ConfigError("N must be at least 1");
    if (c.m < 1) throw ConfigError("m must be at least 1");
    if (!(c.final_time > 0.0)) throw ConfigError("T must be positive");
    if (c.epsilon) {
        if (!(*c.epsilon > 0.0 && *c.epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
        if (c.preconditioner == PreconditionerKind::Bc && *c.epsilon != 1.0)
            throw ConfigError("the bc preconditioner fixes epsilon = 1");
    }
    if (c.inner == InnerSolverKind::FstDirect && c.problem != ProblemKind::HeatConst)
        throw ConfigError("inner_solver fst requires the constant-coefficient heat problem");
    if (c.inner == InnerSolverKind::Multigrid && c.m > 7 && !power_of_two(c.m + 1))
        throw ConfigError("inner_solver multigrid requires m = 2^k - 1");
    if (!(c.tolerance > 0.0 && c.tolerance < 1.0)) throw ConfigError("gmres tolerance must lie in (0, 1)");
    if (c.restart < 1) throw ConfigError("gmres restart must be at least 1");
    if (c.max_iterations < 1) throw ConfigError("gmres maxiter must be at least 1");
    if (c.mg_cycles < 1) throw ConfigError("mg_cycles must be at least 1");
    if (!(c.mg_omega > 0.0 && c.mg_omega <= 1.0)) throw ConfigError("mg_omega must lie in (0, 1]");
}

double resolved_epsilon(const RunConfig& c) {
    switch (c.preconditioner) {
        case PreconditionerKind::None: return 0.0;
        case PreconditionerKind::Bc: return 1.0;
        case PreconditionerKind::Bec:
            return c.epsilon ? *c.epsilon : choose_epsilon(c.final_time / static_cast<double>(c.steps));
    }
    return 0.0;
}

RunOutcome run(const RunConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    Problem problem = make_problem(config.problem, config.scheme, config.steps, config.m, config.final_time);
    const AllAtOnceSystem& system = problem.system;

    GmresConfig gmres;
    gmres.tolerance = config.tolerance;
    gmres.restart = config.restart;
    gmres.max_iterations = config.max_iterations;

    const double eps = resolved_epsilon(config);
    std::unique_ptr<BECPreconditioner> prec;
    RealOperator apply_pinv;
    std::string inner = "-";
    if (config.preconditioner != PreconditionerKind::None) {
        PreconditionerOptions options;
        options.epsilon = eps;
        options.inner = config.inner;
        options.multigrid.cycles = config.mg_cycles;
        options.multigrid.omega = config.mg_omega;
        prec = std::make_unique<BECPreconditioner>(system, options);
        inner = to_string(prec->inner_kind());
        apply_pinv = [p = prec.get()](std::span<const double> v, std::span<double> out) { p->apply(v, out); };
    }
    auto [u, report] = gmres_solve([&](auto v, auto out) { system.apply(v, out); }, apply_pinv, system.rhs(), gmres);
    const auto metrics = problem.exact ? residual_metrics(system, u, std::span<const double>(*problem.exact))
                                       : residual_metrics(system, u);
    report.res = metrics.res;
    report.error = metrics.error;
    const double cpu = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ResultRecord rec;
    rec.problem = to_string(config.problem);
    rec.scheme = scheme_name(config.scheme);
    rec.preconditioner = to_string(config.preconditioner);
    rec.inner = inner;
    rec.steps = config.steps;
    rec.m = config.m;
    rec.J = system.block_size();
    rec.dof = system.size();
    rec.epsilon = eps;
    rec.iterations = report.iterations;
    rec.converged = report.converged;
    rec.cpu = cpu;
    rec.res = report.res;
    rec.error = report.error;

    RunOutcome out{rec, std::move(report), std::move(u), system.pair().grid};
    if (!config.output.empty()) write_csv(config.output, {out.record});
    if (!config.field_output.empty()) {
        std::ofstream f(config.field_output);
        if (!f) throw ConfigError("cannot open field output '" + config.field_output + "'");
        write_field_csv(f, out.grid, out.solution);
    }
    return out;
}

std::vector<ResultRecord> sweep(const RunConfig& base, const std::vector<std::size_t>& steps,
                                const std::vector<std::size_t>& sizes) {
    const std::vector<std::size_t> ns = steps.empty() ? std::vector<std::size_t>{base.steps} : steps;
    const std::vector<std::size_t> ms = sizes.empty() ? std::vector<std::size_t>{base.m} : sizes;
    std::vector<ResultRecord> out;
    for (std::size_t n : ns)
        for (std::size_t m : ms)
            for (PreconditionerKind kind : {PreconditionerKind::Bec, PreconditionerKind::Bc}) {
                RunConfig c = base;
                c.steps = n;
                c.m = m;
                c.preconditioner = kind;
                if (kind == PreconditionerKind::Bc) c.epsilon.reset();
                c.output.clear();
                c.field_output.clear();
                out.push_back(run(c).record);
            }
    return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
    out << csv_header << '\n';
    for (const auto& r : records) {
        out << r.problem << ',' << r.scheme << ',' << r.preconditioner << ',' << r.inner << ',' << r.steps << ','
            << r.m << ',' << r.J << ',' << r.dof << ',' << number(r.epsilon) << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << ',' << number(r.cpu) << ',' << number(r.res) << ','
            << (r.error ? number(*r.error) : std::string()) << '\n';
    }
}

namespace {

template <class T>
T parse_field(const std::string& text, const char* column) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size())
        throw ConfigError(std::string("results CSV: bad ") + column + " value '" + text + "'");
    return value;
}

}  // namespace

std::vector<ResultRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw ConfigError("results CSV: unexpected header");
    std::vector<ResultRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 14) throw ConfigError("results CSV: expected 14 fields, got " + std::to_string(f.size()));
        ResultRecord r;
        r.problem = f[0];
        r.scheme = f[1];
        r.preconditioner = f[2];
        r.inner = f[3];
        r.steps = parse_field<std::size_t>(f[4], "N");
        r.m = parse_field<std::size_t>(f[5], "m");
        r.J = parse_field<std::size_t>(f[6], "J");
        r.dof = parse_field<std::size_t>(f[7], "DoF");
        r.epsilon = parse_field<double>(f[8], "epsilon");
        r.iterations = parse_field<std::size_t>(f[9], "Iter");
        r.converged = f[10] == "1";
        r.cpu = parse_field<double>(f[11], "CPU");
        r.res = parse_field<double>(f[12], "RES");
        if (!f[13].empty()) r.error = parse_field<double>(f[13], "E");
        out.push_back(std::move(r));
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<ResultRecord>& records) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output '" + path + "'");
    write_csv(f, records);
}

std::vector<ResultRecord> read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open '" + path + "'");
    return read_csv(f);
}

std::string format_table(const std::vector<ResultRecord>& records) {
    std::map<std::pair<std::size_t, std::size_t>, std::map<std::string, const ResultRecord*>> cells;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.steps, r.m);
        if (!cells.count(key)) order.push_back(key);
        cells[key][r.preconditioner] = &r;
    }
    const bool with_error = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.error.has_value(); });
    const char* metric = with_error ? "E" : "RES";
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%6s %6s %10s | %5s %8s %10s | %5s %8s %10s\n", "N", "J+1", "DoF", "Iter", "CPU",
                  metric, "Iter", "CPU", metric);
    out += "                         |       GMRES-BEC           |       GMRES-BC\n";
    out += buf;
    auto column = [&](const ResultRecord* r) {
        if (!r) return std::string("    -        -          -");
        const double v = with_error ? r->error.value_or(NAN) : r->res;
        char c[80];
        std::snprintf(c, sizeof c, "%5zu%s %8.2f %10.2e", r->iterations, r->converged ? " " : "*", r->cpu, v);
        return std::string(c);
    };
    for (const auto& key : order) {
        const auto& row = cells[key];
        const ResultRecord* any = row.begin()->second;
        auto find = [&](const char* name) -> const ResultRecord* {
            auto it = row.find(name);
            return it == row.end() ? nullptr : it->second;
        };
        std::snprintf(buf, sizeof buf, "%6zu %6zu %10zu | ", key.first, key.second + 1, any->dof);
        out += buf + column(find("bec")) + " | " + column(find("bc")) + "\n";
    }
    return out;
}

void write_field_csv(std::ostream& out, const Grid2D& grid, std::span<const double> solution) {
    const std::size_t j = grid.unknowns();
    require(solution.size() >= j && solution.size() % j == 0, "field dump: solution length mismatch");
    const auto last = solution.subspan(solution.size() - j, j);
    out << "x,y,u\n";
    for (std::size_t jy = 0; jy < grid.m; ++jy)
        for (std::size_t ix = 0; ix < grid.m; ++ix)
            out << number(grid.x(ix)) << ',' << number(grid.y(jy)) << ',' << number(last[grid.index(ix, jy)]) << '\n';
}

std::size_t VerifyResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const VerifyRow& r) { return !r.check.passed; }));
}

void validate(const VerifyConfig& c) {
    if (c.steps.empty() || c.sizes.empty() || c.epsilons.empty() || c.schemes.empty())
        throw ConfigError("verify needs non-empty N, m, epsilon and scheme lists");
    for (double e : c.epsilons)
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("epsilon " + number(e) + " outside (0, 1]");
    for (double d : c.deltas)
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("delta " + number(d) + " outside (0, 1)");
    for (int s : c.schemes)
        if (s != 1 && s != 2) throw ConfigError("scheme must be bdf1 or bdf2");
    for (std::size_t m : c.sizes)
        if (m < 1) throw ConfigError("m must be at least 1");
}

VerifyResult verify(const VerifyConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    VerifyResult result;
    struct Desk {
        std::string name;
        SpatialPair (*build)(std::size_t);
    };
    const Desk desks[] = {
        {"fd", [](std::size_t m) { return build_heat_fd(Grid2D::unit_square(m), 1.0); }},
        {"q1", [](std::size_t m) { return build_heat_q1(Grid2D::unit_square(m), 1.0); }},
    };
    const double final_time = 1.0;
    // finite-difference pairs only, so c0 = 1
    auto add_rate = [&](const AllAtOnceSystem& system, std::size_t m, double delta) {
        const double eps = rate_epsilon(delta, system.tau(), final_time, 1.0);
        result.rows.push_back({"fd", 1, system.steps(), m, eps, check_gmres_rate(system, delta, config.seed)});
    };
    for (std::size_t n : config.steps) {
        if (n == 1) {
            result.notices.push_back("N = 1 skipped: R_eps degenerates to a single entry");
            continue;
        }
        for (int scheme : config.schemes) {
            const std::size_t p = static_cast<std::size_t>(scheme);
            if (n < p + 2) {
                result.notices.push_back("N = " + std::to_string(n) + " skipped for " + scheme_name(scheme) +
                                         ": needs N >= p + 2");
                continue;
            }
            for (const auto& desk : desks)
                for (std::size_t m : config.sizes) {
                    auto pair = std::make_shared<const SpatialPair>(desk.build(m));
                    const AllAtOnceSystem system = assemble(pair, bdf_stencil(scheme), final_time, n, ProblemData{});
                    for (double eps : config.epsilons) {
                        const DenseProbe probe = make_probe(system, eps, config.cap);
                        auto add = [&](CheckReport c) { result.rows.push_back({desk.name, scheme, n, m, eps, std::move(c)}); };
                        add(check_inverse_formula(probe));
                        add(check_spectrum(probe));
                        add(check_rank_defect(probe));
                        add(check_diagonalization(probe).check);
                        add(check_norm_bound(probe, eps));
                        add(check_clustering(probe, eps));
                    }
                    if (desk.name == "fd" && scheme == 1)
                        for (double delta : config.deltas) add_rate(system, m, delta);
                }
        }
    }
    if (config.rate_instance) {
        auto pair = std::make_shared<const SpatialPair>(build_heat_fd(Grid2D::unit_square(15), 1.0));
        const AllAtOnceSystem system = assemble(pair, bdf_stencil(1), final_time, 16, ProblemData{});
        for (double delta : config.deltas) add_rate(system, 15, delta);
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string format_verify_table(const VerifyResult& result) {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-4s %-5s %3s %3s %9s %-16s %-6s %s\n", "pair", "bdf", "N", "m", "epsilon", "check",
                  "status", "detail");
    out += buf;
    for (const auto& r : result.rows) {
        const char* status = r.check.skipped ? "SKIP" : (r.check.passed ? "PASS" : "FAIL");
        std::snprintf(buf, sizeof buf, "%-4s %-5s %3zu %3zu %9.3g %-16s %-6s %s\n", r.pair.c_str(),
                      scheme_name(r.scheme).c_str(), r.steps, r.m, r.epsilon, r.check.name.c_str(), status,
                      r.check.detail.c_str());
        out += buf;
    }
    for (const auto& n : result.notices) out += "notice: " + n + "\n";
    std::snprintf(buf, sizeof buf, "%zu checks, %zu failed, %.2f s\n", result.rows.size(), result.failures(),
                  result.seconds);
    out += buf;
    return out;
}

void write_verify_csv(std::ostream& out, const VerifyResult& result) {
    out << "pair,scheme,N,m,J,epsilon,check,status,measured,bound,detail\n";
    for (const auto& r : result.rows) {
        const char* status = r.check.skipped ? "skip" : (r.check.passed ? "pass" : "fail");
        out << r.pair << ',' << scheme_name(r.scheme) << ',' << r.steps << ',' << r.m << ',' << r.m * r.m << ','
            << number(r.epsilon) << ',' << r.check.name << ',' << status << ',' << number(r.check.measured) << ','
            << number(r.check.bound) << ',' << quoted(r.check.detail) << '\n';
    }
}

}  // namespace bec
