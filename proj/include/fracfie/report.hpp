#pragma once

// JSON and CSV writers for solver, hypothesis and MNC results.

#include <array>
#include <charconv>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracfie/grid.hpp"
#include "fracfie/mnc.hpp"
#include "fracfie/solver.hpp"

namespace fracfie {

inline constexpr const char* toolkit_version = "0.1.0";

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const GridFunction& f) {
    j = {{"interval", {f.interval().a, f.interval().b}},
         {"n", f.size()},
         {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

namespace mnc {

inline void to_json(nlohmann::json& j, const ModulusProfile& p) {
    j = {{"thetas", p.thetas}, {"values", p.values}, {"extrapolated_gamma0", p.extrapolated_gamma0}};
}

inline void to_json(nlohmann::json& j, const AxiomCheck& c) {
    j = {{"axiom", c.axiom}, {"description", c.description}, {"status", to_string(c.status)},
         {"proxy", c.proxy},  {"lhs", c.lhs},                 {"rhs", c.rhs},
         {"witness", c.witness}};
}

inline void to_json(nlohmann::json& j, const AxiomReport& r) {
    j = {{"theta", r.theta}, {"passed", r.passed()}, {"checks", r.checks}};
}

} // namespace mnc

namespace solver {

inline void to_json(nlohmann::json& j, const IterationRecord& r) {
    j = {{"iteration", r.iteration}, {"step_diff", r.step_diff}, {"residual", r.residual}};
}

inline void to_json(nlohmann::json& j, const SolveResult& r) {
    j = {{"converged", r.converged},
         {"iterations", r.iterations},
         {"final_residual", r.final_residual},
         {"solution_sup_norm", r.solution.sup_norm()},
         {"residual_history", r.residual_history},
         {"solution", r.solution}};
}

inline void to_json(nlohmann::json& j, const AssumptionV& v) {
    j = {{"e0", v.e0},        {"P1", v.P1},         {"P_hat", v.P_hat},
         {"K1", v.K1},        {"K2", v.K2},         {"S1_at_e0", v.S1_at_e0},
         {"warp_span", v.warp_span}, {"kernel_term", v.kernel_term}, {"lhs", v.lhs},
         {"holds", v.holds}};
}

inline void to_json(nlohmann::json& j, const HypothesisReport& r) {
    nlohmann::json interval = nullptr;
    if (r.e0_feasible_interval) interval = {{"lo", r.e0_feasible_interval->lo}, {"hi", r.e0_feasible_interval->hi}};
    j = {{"problem", r.problem},
         {"mode", to_string(r.mode)},
         {"P1", r.P1},
         {"P1_estimate", r.P1_estimate},
         {"P1_declared", optional_json(r.P1_declared)},
         {"P_hat", r.P_hat},
         {"K1", r.K1},
         {"K2", r.K2},
         {"S1_at_e0", r.S1_at_e0},
         {"e0_feasible_interval", interval},
         {"at_e0", r.at_e0 ? nlohmann::json(*r.at_e0) : nlohmann::json(nullptr)},
         {"feasible", r.feasible()}};
}

inline void to_json(nlohmann::json& j, const ContractionEstimate& c) {
    j = {{"gamma_before", c.gamma_before}, {"gamma_after", c.gamma_after}, {"ratio", c.ratio()},
         {"P1", c.P1},                     {"e0", c.e0},                   {"gamma_P", c.gamma_P},
         {"kernel_term", optional_json(c.kernel_term)}, {"offset", c.offset}, {"bound", c.bound}};
}

/// Residual history as CSV: iteration,step_diff,residual.
inline void write_residual_csv(std::ostream& out, const SolveResult& r) {
    out << "iteration,step_diff,residual\n";
    for (const auto& rec : r.residual_history)
        out << rec.iteration << ',' << format_number(rec.step_diff) << ',' << format_number(rec.residual) << '\n';
}

} // namespace solver

} // namespace fracfie
