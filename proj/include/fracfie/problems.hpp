#pragma once

/**
 * @file problems.hpp
 * @brief Built-in equations and the JSON problem-file format.
 *
 * A problem file is one JSON object:
 *
 *   {
 *     "name": "my-problem",
 *     "delta": 0.5,                       // 0 < delta < 1
 *     "P": "(y+1)/(4+xi^2)",              // in xi, y
 *     "S": "y^2/(1+xi^2)",                // in xi, y
 *     "U": "xi",                          // in xi, strictly increasing
 *     "dU": "1",                          // optional; numeric derivative of U otherwise
 *     "w": "1",                           // in xi, nonvanishing
 *     "S1": "r^2",                        // optional envelope in r
 *     "grid_n": 1025,                     // optional, >= 33
 *     "e0": 0.4                           // optional ball radius
 *   }
 *
 * Unknown keys are rejected.
 */

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracfie/error.hpp"
#include "fracfie/expression.hpp"
#include "fracfie/fraccalc.hpp"
#include "fracfie/solver.hpp"
#include "fracfie/special.hpp"

namespace fracfie::problems {

using solver::FieProblem;

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"example1", "example2"};
    return names;
}

/// The two worked equations on [0, 1] with U = id and w = 1:
///   example1: δ = 1/2, P = (y + 1)/(4 + ξ²), S = y²/(1 + ξ²)
///   example2: δ = 1/3, P = (y + 1)/(9 + ξ⁴), S = sqrt(y⁴/(1 + y⁴))
/// Both use S1(r) = r². The declared P1 and the P̂(e0) substitution are the
/// values the worked bounds rely on.
inline FieProblem builtin(const std::string& name) {
    using fraccalc::KernelSpec;
    if (name == "example1") {
        FieProblem p(
            "example1", [](double xi, double y) { return (y + 1.0) / (4.0 + std::pow(xi, 2.0)); },
            [](double xi, double y) { return std::pow(y, 2.0) / (1.0 + std::pow(xi, 2.0)); }, KernelSpec::plain(0.5));
        p.S1 = [](double r) { return r * r; };
        p.declared_p1 = 0.25;
        p.stated_p_hat = [](double e0) { return e0 / 4.0; };
        p.e0 = special::gamma(1.5) / 2.0;
        return p;
    }
    if (name == "example2") {
        FieProblem p(
            "example2", [](double xi, double y) { return (y + 1.0) / (9.0 + std::pow(xi, 4.0)); },
            [](double, double y) {
                const double y4 = std::pow(y, 4.0);
                return std::sqrt(y4 / (1.0 + y4));
            },
            KernelSpec::plain(1.0 / 3.0));
        p.S1 = [](double r) { return r * r; };
        p.declared_p1 = 1.0 / 9.0;
        p.stated_p_hat = [](double e0) { return e0 / 9.0; };
        p.e0 = 7.0 * special::gamma(4.0 / 3.0) / 9.0;
        return p;
    }
    throw InputError("unknown built-in problem '" + name + "' (available: example1, example2)");
}

/// Parsed contents of a problem file.
struct ProblemConfig {
    std::string name;
    double delta = 0.5;
    std::map<std::string, std::string> expressions;  ///< P, S, U, w, and optionally dU, S1
    std::size_t grid_n = 1025;
    std::optional<double> e0;
};

namespace detail {

inline const std::set<std::string>& allowed_keys() {
    static const std::set<std::string> keys{"name", "delta", "P", "S", "U", "dU", "w", "S1", "grid_n", "e0"};
    return keys;
}

inline expr::Expression compile_field(const ProblemConfig& cfg, const std::string& key,
                                      std::initializer_list<expr::Variable> allowed) {
    const std::string path = "$." + key;
    expr::Expression e = [&] {
        try {
            return expr::parse_expression(cfg.expressions.at(key));
        } catch (const ParseError& err) {
            throw SchemaError(path, err.what());
        }
    }();
    for (auto v : {expr::Variable::xi, expr::Variable::y, expr::Variable::r}) {
        if (!e.uses(v)) continue;
        bool ok = false;
        for (auto a : allowed) ok = ok || a == v;
        if (!ok) throw SchemaError(path, std::string("variable '") + expr::name(v) + "' is not allowed here");
    }
    return e;
}

// Second-order differences, one-sided within a step of the ends of [0, 1].
inline fraccalc::RealFunction numeric_derivative(fraccalc::RealFunction f) {
    return [f = std::move(f)](double x) {
        constexpr double h = 1e-6;
        if (x - h < 0.0) return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
        if (x + h > 1.0) return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h);
        return (f(x + h) - f(x - h)) / (2.0 * h);
    };
}

} // namespace detail

/// Validates a JSON document against the problem-file schema.
inline ProblemConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("$", "problem file must hold a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!detail::allowed_keys().count(key)) throw SchemaError("$." + key, "unknown key");

    ProblemConfig cfg;
    auto require_string = [&](const std::string& key, bool required) {
        if (!doc.contains(key)) {
            if (required) throw SchemaError("$." + key, "missing required field");
            return;
        }
        if (!doc[key].is_string()) throw SchemaError("$." + key, "expected an expression string");
        const std::string s = doc[key].get<std::string>();
        if (s.empty()) throw SchemaError("$." + key, "expression is empty");
        cfg.expressions[key] = s;
    };

    if (!doc.contains("name")) throw SchemaError("$.name", "missing required field");
    if (!doc["name"].is_string()) throw SchemaError("$.name", "expected a string");
    cfg.name = doc["name"].get<std::string>();

    if (!doc.contains("delta")) throw SchemaError("$.delta", "missing required field");
    if (!doc["delta"].is_number()) throw SchemaError("$.delta", "expected a number");
    cfg.delta = doc["delta"].get<double>();
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw SchemaError("$.delta", "must satisfy 0 < delta < 1");

    for (const char* key : {"P", "S", "U", "w"}) require_string(key, true);
    for (const char* key : {"dU", "S1"}) require_string(key, false);

    if (doc.contains("grid_n")) {
        if (!doc["grid_n"].is_number_integer()) throw SchemaError("$.grid_n", "expected an integer");
        const auto n = doc["grid_n"].get<long long>();
        if (n < 33) throw SchemaError("$.grid_n", "must be at least 33");
        cfg.grid_n = static_cast<std::size_t>(n);
    }
    if (doc.contains("e0")) {
        if (!doc["e0"].is_number()) throw SchemaError("$.e0", "expected a number");
        const double e0 = doc["e0"].get<double>();
        if (!(e0 > 0.0) || !std::isfinite(e0)) throw SchemaError("$.e0", "must be positive");
        cfg.e0 = e0;
    }
    return cfg;
}

/// Builds a FieProblem from a validated configuration.
inline FieProblem build_problem(const ProblemConfig& cfg) {
    using expr::Variable;
    const auto P = detail::compile_field(cfg, "P", {Variable::xi, Variable::y});
    const auto S = detail::compile_field(cfg, "S", {Variable::xi, Variable::y});
    const auto U = detail::compile_field(cfg, "U", {Variable::xi});
    const auto w = detail::compile_field(cfg, "w", {Variable::xi});

    fraccalc::RealFunction u = [U](double x) { return U(x); };
    fraccalc::RealFunction du;
    if (cfg.expressions.count("dU")) {
        const auto dU = detail::compile_field(cfg, "dU", {Variable::xi});
        du = [dU](double x) { return dU(x); };
    } else {
        du = detail::numeric_derivative(u);
    }

    fraccalc::KernelSpec kernel(cfg.delta, fraccalc::WarpFunction(u, du),
                                fraccalc::WeightFunction([w](double x) { return w(x); }), Interval(0.0, 1.0));
    FieProblem problem(
        cfg.name, [P](double xi, double y) { return P(xi, y); }, [S](double xi, double y) { return S(xi, y); },
        std::move(kernel));
    if (cfg.expressions.count("S1")) {
        const auto S1 = detail::compile_field(cfg, "S1", {Variable::r});
        problem.S1 = [S1](double r) { return S1.evaluate({0.0, 0.0, r}); };
    }
    problem.grid_n = cfg.grid_n;
    problem.e0 = cfg.e0;
    return problem;
}

inline FieProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return build_problem(parse_config(doc));
}

/// A built-in name, or else a path to a problem file.
inline FieProblem resolve_problem(const std::string& name_or_path) {
    for (const auto& n : builtin_names())
        if (n == name_or_path) return builtin(n);
    if (std::filesystem::exists(name_or_path)) return load_problem(name_or_path);
    throw InputError("unknown problem '" + name_or_path +
                     "': not a built-in (example1, example2) and no such file");
}

} // namespace fracfie::problems
