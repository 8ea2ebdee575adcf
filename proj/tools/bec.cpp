#include "bec/runner.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int exit_solver_failure = 1;
constexpr int exit_config_error = 2;

double parse_epsilon(const std::string& text) {
    if (text == "auto") return 0.0;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw bec::ConfigError("epsilon must be 'auto' or a number, got '" + text + "'");
    }
}

void print_record(const bec::ResultRecord& r) {
    std::printf("%s %s %s (inner %s, epsilon %.3g): N=%zu J=%zu DoF=%zu Iter=%zu%s CPU=%.2fs RES=%.3e", r.problem.c_str(),
                r.scheme.c_str(), r.preconditioner.c_str(), r.inner.c_str(), r.epsilon, r.steps, r.J, r.dof,
                r.iterations, r.converged ? "" : " (not converged)", r.cpu, r.res);
    if (r.error) std::printf(" E=%.3e", *r.error);
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"All-at-once space-time solver with block epsilon-circulant preconditioning"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "flat key = value file; keys are the long option names");
    app.allow_config_extras(CLI::config_extras_mode::error);

    bec::RunConfig cfg;
    std::string problem = "heat-const", scheme = "bdf1", preconditioner = "bec", epsilon = "auto", inner = "auto";
    app.add_option("--problem", problem, "heat-const | heat-var | convdiff")->capture_default_str();
    app.add_option("--scheme", scheme, "bdf1 | bdf2")->capture_default_str();
    auto* opt_n = app.add_option("--N", cfg.steps, "time steps")->capture_default_str();
    app.add_option("--m", cfg.m, "interior points per dimension (J = m^2)")->capture_default_str();
    app.add_option("--T", cfg.final_time, "final time")->capture_default_str();
    app.add_option("--preconditioner", preconditioner, "bec | bc | none")->capture_default_str();
    auto* opt_eps = app.add_option("--epsilon", epsilon, "auto (min(0.5, 0.5 tau)) or a value in (0, 1]")
                        ->capture_default_str();
    app.add_option("--inner_solver", inner, "auto | fst | multigrid | dense")->capture_default_str();
    app.add_option("--mg_cycles", cfg.mg_cycles, "V-cycles per block solve")->capture_default_str();
    app.add_option("--mg_omega", cfg.mg_omega, "damped Jacobi weight")->capture_default_str();
    app.add_option("--tol", cfg.tolerance, "GMRES relative tolerance")->capture_default_str();
    app.add_option("--restart", cfg.restart, "GMRES restart length")->capture_default_str();
    app.add_option("--maxiter", cfg.max_iterations, "GMRES iteration limit")->capture_default_str();
    app.add_option("--output", cfg.output, "CSV output path");
    app.add_option("--field_output", cfg.field_output, "final-time field CSV (x, y, u)");
    app.add_option("--seed", cfg.seed, "seed for randomized checks")->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "solve one configuration");
    auto* sweep_cmd = app.add_subcommand("sweep", "BEC and BC over an N x m grid");
    std::vector<std::size_t> sweep_ns, sweep_ms;
    sweep_cmd->add_option("--Ns", sweep_ns, "time-step counts")->delimiter(',');
    sweep_cmd->add_option("--ms", sweep_ms, "grid sizes")->delimiter(',');

    auto* verify_cmd = app.add_subcommand("verify", "dense-oracle checks of the preconditioner theory");
    bec::VerifyConfig vcfg;
    verify_cmd->add_option("--Ns", vcfg.steps, "time-step counts")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--ms", vcfg.sizes, "grid sizes")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--epsilons", vcfg.epsilons, "epsilon values")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--schemes", vcfg.schemes, "BDF orders")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--deltas", vcfg.deltas, "rate-check deltas")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--cap", vcfg.cap, "largest dense N*J")->capture_default_str();
    bool no_rate_instance = false;
    verify_cmd->add_flag("--no-rate-instance", no_rate_instance, "skip the N = 16, m = 15 rate check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    try {
        cfg.problem = bec::problem_from_string(problem);
        if (scheme != "bdf1" && scheme != "bdf2") throw bec::ConfigError("scheme must be bdf1 or bdf2");
        cfg.scheme = scheme == "bdf1" ? 1 : 2;
        cfg.preconditioner = bec::preconditioner_from_string(preconditioner);
        cfg.inner = bec::inner_solver_from_string(inner);
        if (epsilon != "auto") cfg.epsilon = parse_epsilon(epsilon);

        if (*run_cmd) {
            const auto out = bec::run(cfg);
            print_record(out.record);
            return out.record.converged ? 0 : exit_solver_failure;
        }
        if (*sweep_cmd) {
            bec::validate(cfg);
            const auto records = bec::sweep(cfg, sweep_ns, sweep_ms);
            std::cout << bec::format_table(records);
            if (!cfg.output.empty()) bec::write_csv(cfg.output, records);
            const bool ok = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.converged; });
            return ok ? 0 : exit_solver_failure;
        }
        if (*verify_cmd) {
            if (opt_eps->count() > 0 && cfg.epsilon) vcfg.epsilons = {*cfg.epsilon};
            if (opt_n->count() > 0) vcfg.steps = {cfg.steps};
            vcfg.rate_instance = !no_rate_instance;
            vcfg.seed = cfg.seed;
            const auto result = bec::verify(vcfg);
            std::cout << bec::format_verify_table(result);
            if (!cfg.output.empty()) {
                std::ofstream f(cfg.output);
                if (!f) throw bec::ConfigError("cannot open output '" + cfg.output + "'");
                bec::write_verify_csv(f, result);
            }
            return result.passed() ? 0 : exit_solver_failure;
        }
    } catch (const bec::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return exit_solver_failure;
    } catch (const std::invalid_argument& e) {  // ConfigError, ContractError
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_solver_failure;
    }
    return 0;
}
