#pragma once

/**
 * @file cli.hpp
 * @brief The `solve`, `check` and `mnc` commands behind the fracfie tool.
 *
 * Each command takes a plain options struct and output streams so it can be
 * driven from the executable or from tests. Exit codes:
 *   0 success, 1 input error, 2 non-convergence, 3 infeasible hypotheses,
 *   4 diagnostic violation.
 */

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracfie/error.hpp"
#include "fracfie/mnc.hpp"
#include "fracfie/problems.hpp"
#include "fracfie/random.hpp"
#include "fracfie/report.hpp"
#include "fracfie/solver.hpp"

namespace fracfie::cli {

enum ExitCode : int {
    exit_success = 0,
    exit_input_error = 1,
    exit_not_converged = 2,
    exit_infeasible = 3,
    exit_diagnostic_violation = 4,
};

struct SolveOptions {
    std::string problem;
    std::optional<std::size_t> grid;
    double tol = 1e-10;
    std::size_t max_iter = 200;
    std::optional<std::string> out;  ///< SolveResult JSON; stdout when absent
    std::optional<std::string> csv;  ///< residual history; derived from `out` when absent
};

struct CheckOptions {
    std::string problem;
    std::string mode = "definition";
    std::optional<std::size_t> grid;
    std::optional<double> e0;
    std::optional<solver::ScanRange> scan;
    std::optional<std::string> out;
};

struct MncOptions {
    std::string problem;
    std::optional<std::size_t> grid;
    std::size_t family_size = 8;
    double theta = 0.05;
    int iters = 6;
    std::uint64_t seed = 1;
    std::size_t hull_samples = 16;
    std::string op = "H";           ///< H or identity
    std::string family = "random";  ///< random or constants
    std::optional<double> e0;
    std::optional<std::string> out;     ///< γ sequence CSV; stdout when absent
    std::optional<std::string> report;  ///< JSON summary
};

namespace detail {

inline nlohmann::json manifest(const std::string& command, const std::string& problem, std::size_t grid_n) {
    return {{"tool", "fracfie"}, {"version", toolkit_version}, {"command", command}, {"problem", problem},
            {"grid_n", grid_n}};
}

/// Writes `text` to `path` when given, else to `fallback`.
inline void emit(const std::optional<std::string>& path, std::ostream& fallback, const std::string& text) {
    if (!path) {
        fallback << text;
        return;
    }
    std::ofstream file(*path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + *path + "'");
    file << text;
}

inline std::string csv_path_for(const std::string& json_path) {
    std::filesystem::path p(json_path);
    p.replace_extension();
    return p.string() + "_residuals.csv";
}

inline solver::FieProblem load(const std::string& name, std::optional<std::size_t> grid) {
    solver::FieProblem p = problems::resolve_problem(name);
    if (grid) {
        if (*grid < 3) throw InputError("--grid must be at least 3");
        p.grid_n = *grid;
    }
    return p;
}

/// Runs a command body, mapping toolkit errors onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_not_converged;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace detail

inline int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto problem = detail::load(o.problem, o.grid);
        const auto result = solver::picard_solve(problem, solver::zero_iterate(problem),
                                                 solver::SolveOptions{o.tol, o.max_iter, 1e6});

        const std::optional<std::string> csv = o.csv ? o.csv : (o.out ? std::optional(detail::csv_path_for(*o.out)) : std::nullopt);
        nlohmann::json m = detail::manifest("solve", o.problem, problem.grid_n);
        m["tol"] = o.tol;
        m["max_iter"] = o.max_iter;
        m["outputs"] = {{"json", o.out ? *o.out : "-"}, {"csv", csv ? *csv : ""}};

        nlohmann::json doc = result;
        doc["manifest"] = m;
        doc["problem"] = problem.name;
        detail::emit(o.out, out, doc.dump(2) + "\n");
        if (csv) {
            std::ostringstream text;
            text << "# " << m.dump() << '\n';
            solver::write_residual_csv(text, result);
            detail::emit(csv, out, text.str());
        }
        err << problem.name << ": " << (result.converged ? "converged" : "not converged") << " after "
            << result.iterations << " iterations, residual " << format_number(result.final_residual) << '\n';
        return result.converged ? exit_success : exit_not_converged;
    });
}

inline int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto problem = detail::load(o.problem, o.grid);
        const auto mode = solver::parse_mode(o.mode);
        const auto scan = o.scan.value_or(solver::ScanRange{});
        const auto report = solver::build_hypothesis_report(problem, mode, o.e0, scan);

        nlohmann::json m = detail::manifest("check", o.problem, problem.grid_n);
        m["mode"] = solver::to_string(mode);
        m["e0"] = optional_json(o.e0);
        m["scan"] = o.e0 ? nlohmann::json(nullptr)
                         : nlohmann::json{{"lo", scan.lo}, {"hi", scan.hi}, {"steps", scan.steps}};
        m["outputs"] = {{"json", o.out ? *o.out : "-"}};
        nlohmann::json doc = report;
        doc["manifest"] = m;
        detail::emit(o.out, out, doc.dump(2) + "\n");

        if (report.e0_feasible_interval)
            err << problem.name << ": feasible e0 in [" << format_number(report.e0_feasible_interval->lo) << ", "
                << format_number(report.e0_feasible_interval->hi) << "]\n";
        else if (report.at_e0)
            err << problem.name << ": e0 = " << format_number(*o.e0) << (report.feasible() ? " passes" : " fails")
                << " (lhs " << format_number(report.at_e0->lhs) << ")\n";
        else
            err << problem.name << ": no feasible e0 in scan\n";
        return report.feasible() ? exit_success : exit_infeasible;
    });
}

/// Output of the mnc command before serialization.
struct MncRun {
    double e0 = 0.0;
    std::vector<double> sequence;
    bool nonincreasing = false;
    std::optional<solver::ContractionEstimate> contraction;
    mnc::ModulusProfile seed_profile;
};

inline MncRun run_mnc(const MncOptions& o, const solver::FieProblem& problem) {
    MncRun run;
    if (o.e0)
        run.e0 = *o.e0;
    else if (problem.e0)
        run.e0 = *problem.e0;
    else
        throw InputError("problem '" + problem.name + "' has no e0; pass --e0");
    if (!(run.e0 > 0.0)) throw InputError("e0 must be positive");
    if (o.iters < 1) throw InputError("--iters must be at least 1");
    if (o.family_size == 0) throw InputError("--family-size must be positive");

    Rng rng(o.seed);
    const std::size_t n = problem.grid_n;
    mnc::FunctionFamily seed = [&] {
        if (o.family == "random") return mnc::random_smooth_family(problem.interval(), n, o.family_size, run.e0, rng);
        if (o.family == "constants") return mnc::constant_family(problem.interval(), n, o.family_size, run.e0);
        throw InputError("unknown family '" + o.family + "' (expected random or constants)");
    }();

    mnc::FamilyOperator op;
    if (o.op == "H") {
        auto H = std::make_shared<solver::FixedPointOperator>(problem, n);
        op = [H](const GridFunction& y) { return (*H)(y); };
        run.contraction = solver::contraction_estimate(problem, seed, o.theta);
    } else if (o.op == "identity") {
        op = [](const GridFunction& y) { return y; };
    } else {
        throw InputError("unknown operator '" + o.op + "' (expected H or identity)");
    }

    run.sequence = mnc::darbo_iteration_diagnostic(op, seed, o.iters, o.theta, o.hull_samples, rng.next());
    run.nonincreasing = mnc::is_nonincreasing(run.sequence, mnc::default_slack);
    run.seed_profile = mnc::gamma0_estimate(seed, {4.0 * o.theta, 2.0 * o.theta, o.theta});
    return run;
}

inline int cmd_mnc(const MncOptions& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto problem = detail::load(o.problem, o.grid);
        const MncRun run = run_mnc(o, problem);

        nlohmann::json m = detail::manifest("mnc", o.problem, problem.grid_n);
        m["seed"] = o.seed;
        m["family"] = o.family;
        m["family_size"] = o.family_size;
        m["theta"] = o.theta;
        m["iters"] = o.iters;
        m["hull_samples"] = o.hull_samples;
        m["operator"] = o.op;
        m["e0"] = run.e0;
        m["outputs"] = {{"csv", o.out ? *o.out : "-"}, {"json", o.report ? *o.report : ""}};

        std::ostringstream csv;
        csv << "# " << m.dump() << '\n' << "q,gamma\n";
        for (std::size_t q = 0; q < run.sequence.size(); ++q) csv << q + 1 << ',' << format_number(run.sequence[q]) << '\n';
        detail::emit(o.out, out, csv.str());

        if (o.report) {
            nlohmann::json doc{{"manifest", m},
                               {"gamma_sequence", run.sequence},
                               {"nonincreasing", run.nonincreasing},
                               {"seed_profile", run.seed_profile},
                               {"seed_hausdorff", 0.5 * run.seed_profile.extrapolated_gamma0},
                               {"contraction", run.contraction ? nlohmann::json(*run.contraction) : nlohmann::json(nullptr)}};
            detail::emit(o.report, out, doc.dump(2) + "\n");
        }
        err << problem.name << ": gamma sequence " << (run.nonincreasing ? "nonincreasing" : "INCREASES") << '\n';
        return run.nonincreasing ? exit_success : exit_diagnostic_violation;
    });
}

} // namespace fracfie::cli
