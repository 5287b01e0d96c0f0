#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracfie/cli.hpp"

int main(int argc, char** argv) {
    using namespace fracfie;

    CLI::App app{"fracfie: weighted fractional integral equations, hypotheses and MNC diagnostics"};
    app.set_version_flag("--version", std::string(toolkit_version));
    app.require_subcommand(1);

    cli::SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Picard iteration from y0 = 0");
    solve_cmd->add_option("--problem", solve.problem, "built-in name or problem JSON file")->required();
    solve_cmd->add_option("--grid", solve.grid, "grid node count (default 1025)");
    solve_cmd->add_option("--tol", solve.tol, "sup-norm step tolerance")->capture_default_str();
    solve_cmd->add_option("--max-iter", solve.max_iter, "iteration cap")->capture_default_str();
    solve_cmd->add_option("--out", solve.out, "SolveResult JSON file (default stdout)");
    solve_cmd->add_option("--csv", solve.csv, "residual history CSV (default <out>_residuals.csv)");

    cli::CheckOptions check;
    std::vector<double> scan;
    auto* check_cmd = app.add_subcommand("check", "verify the solvability hypotheses");
    check_cmd->add_option("--problem", check.problem, "built-in name or problem JSON file")->required();
    check_cmd->add_option("--mode", check.mode, "P-hat semantics: definition or paper")
        ->check(CLI::IsMember({"definition", "paper", "paper-as-stated"}))
        ->capture_default_str();
    check_cmd->add_option("--grid", check.grid, "grid node count");
    auto* e0_opt = check_cmd->add_option("--e0", check.e0, "test one ball radius");
    check_cmd->add_option("--scan", scan, "scan LO HI STEPS for feasible radii")->expected(3)->excludes(e0_opt);
    check_cmd->add_option("--out", check.out, "HypothesisReport JSON file (default stdout)");

    cli::MncOptions mnc;
    auto* mnc_cmd = app.add_subcommand("mnc", "Darbo iteration and contraction diagnostics");
    mnc_cmd->add_option("--problem", mnc.problem, "built-in name or problem JSON file")->required();
    mnc_cmd->add_option("--grid", mnc.grid, "grid node count");
    mnc_cmd->add_option("--family-size", mnc.family_size, "seed family size")->capture_default_str();
    mnc_cmd->add_option("--theta", mnc.theta, "modulus scale")->capture_default_str();
    mnc_cmd->add_option("--iters", mnc.iters, "Darbo generations")->capture_default_str();
    mnc_cmd->add_option("--seed", mnc.seed, "64-bit RNG seed")->capture_default_str();
    mnc_cmd->add_option("--hull-samples", mnc.hull_samples, "convex combinations per generation")->capture_default_str();
    mnc_cmd->add_option("--operator", mnc.op, "H or identity")->check(CLI::IsMember({"H", "identity"}))->capture_default_str();
    mnc_cmd->add_option("--family", mnc.family, "random or constants")
        ->check(CLI::IsMember({"random", "constants"}))
        ->capture_default_str();
    mnc_cmd->add_option("--e0", mnc.e0, "ball radius for the seed family");
    mnc_cmd->add_option("--out", mnc.out, "gamma sequence CSV (default stdout)");
    mnc_cmd->add_option("--report", mnc.report, "JSON summary file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_input_error;
    }

    if (*solve_cmd) return cli::cmd_solve(solve, std::cout, std::cerr);
    if (*check_cmd) {
        if (!scan.empty()) {
            if (scan[2] < 0) {
                std::cerr << "error: --scan STEPS must be positive\n";
                return cli::exit_input_error;
            }
            check.scan = solver::ScanRange{scan[0], scan[1], static_cast<std::size_t>(scan[2])};
        }
        return cli::cmd_check(check, std::cout, std::cerr);
    }
    return cli::cmd_mnc(mnc, std::cout, std::cerr);
}
