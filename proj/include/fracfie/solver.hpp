#pragma once

/**
 * @file solver.hpp
 * @brief Nonlinear fractional integral equation
 *
 *   y(ξ) = P(ξ, y(ξ)) + w(ξ)^{-1}/Γ(δ) ∫_0^ξ (U(ξ) - U(η))^{δ-1} U'(η) w(η) S(ξ, y(η)) dη,  ξ ∈ [0, 1],
 *
 * its fixed-point operator H, Picard iteration, and numerical checks of the
 * solvability hypotheses: Lipschitz constant P1 of P in y, P̂ = sup |P(ξ, 0)|,
 * weight bounds K1 >= |w|, K2 >= |1/w|, and the ball condition
 *
 *   P1 e0 + P̂ + K1 K2 S1(e0) (U(1) - U(0))^δ / Γ(δ + 1) <= e0.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracfie/error.hpp"
#include "fracfie/fraccalc.hpp"
#include "fracfie/grid.hpp"
#include "fracfie/mnc.hpp"
#include "fracfie/parallel.hpp"
#include "fracfie/special.hpp"

namespace fracfie::solver {

using BivariateFunction = std::function<double(double, double)>;
using Envelope = std::function<double(double)>;

/// One instance of the integral equation on [0, 1].
struct FieProblem {
    std::string name;
    BivariateFunction P;
    BivariateFunction S;
    fraccalc::KernelSpec kernel;
    /// Nondecreasing bound |S(ξ, y)| <= S1(|y|); required by the ball condition.
    std::optional<Envelope> S1;
    /// Lipschitz constant of P in y when known analytically.
    std::optional<double> declared_p1;
    /// The P̂(e0) substitution used by the worked examples in place of sup |P(ξ, 0)|.
    std::optional<Envelope> stated_p_hat;
    /// Radius of the invariant ball when one is known for the problem.
    std::optional<double> e0;
    std::size_t grid_n = 1025;

    FieProblem(std::string problem_name, BivariateFunction p, BivariateFunction s, fraccalc::KernelSpec spec)
        : name(std::move(problem_name)), P(std::move(p)), S(std::move(s)), kernel(std::move(spec)) {
        if (!P || !S) throw DomainError("problem needs callable P and S");
        if (!(kernel.interval == Interval(0.0, 1.0))) throw DomainError("problem interval must be [0, 1]");
        if (!(kernel.delta > 0.0 && kernel.delta < 1.0))
            throw DomainError("problem order must satisfy 0 < delta < 1, got " + std::to_string(kernel.delta));
    }

    double delta() const noexcept { return kernel.delta; }
    Interval interval() const noexcept { return kernel.interval; }
};

/// H assembled once for a grid size; the product-integration weights are
/// reused across applications.
class FixedPointOperator {
public:
    FixedPointOperator(const FieProblem& problem, std::size_t n)
        : problem_(problem), rule_(problem.kernel, n) {
        if (n < 2) throw DomainError("grid needs at least 2 nodes");
    }

    std::size_t size() const noexcept { return rule_.size(); }
    const FieProblem& problem() const noexcept { return problem_; }

    GridFunction operator()(const GridFunction& y) const {
        if (y.size() != rule_.size() || !(y.interval() == rule_.interval()))
            throw DomainError("iterate does not live on the operator grid");
        const std::size_t n = y.size();
        std::vector<double> out(n);
        parallel_for(0, n, [&](std::size_t i) {
            const double xi = rule_.node(i);
            const double p = problem_.P(xi, y[i]);
            if (!std::isfinite(p)) throw EvaluationError("P is not finite", i);
            const double integral = rule_.apply_row(i, [&](std::size_t j) {
                const double s = problem_.S(xi, y[j]);
                if (!std::isfinite(s)) throw EvaluationError("S is not finite", i);
                return s;
            });
            out[i] = p + integral;
            if (!std::isfinite(out[i])) throw EvaluationError("H(y) is not finite", i);
        }, 16);
        return GridFunction(y.interval(), std::move(out));
    }

private:
    FieProblem problem_;
    fraccalc::ProductIntegrationRule rule_;
};

/// (H y) at every node of y's grid.
inline GridFunction apply_H(const FieProblem& problem, const GridFunction& y) {
    return FixedPointOperator(problem, y.size())(y);
}

/// ‖y - H y‖_∞
inline double residual(const FieProblem& problem, const GridFunction& y) {
    return sup_distance(y, apply_H(problem, y));
}

struct IterationRecord {
    std::size_t iteration = 0;
    double step_diff = 0.0;  ///< ‖y_k - y_{k-1}‖_∞
    double residual = 0.0;   ///< ‖y_k - H y_k‖_∞
};

struct SolveOptions {
    double tol = 1e-10;
    std::size_t max_iter = 200;
    double blowup = 1e6;
};

struct SolveResult {
    GridFunction solution;
    std::vector<IterationRecord> residual_history;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

/// Successive approximation y_k = H y_{k-1} until the sup-norm step falls
/// to `tol`. Every record carries the residual of its iterate, which is the
/// next step, so the final residual costs one extra application of H.
inline SolveResult picard_solve(const FieProblem& problem, const GridFunction& y0, const SolveOptions& options = {}) {
    if (!(options.tol > 0.0)) throw DomainError("tolerance must be positive");
    if (options.max_iter < 1) throw DomainError("max_iter must be at least 1");
    const FixedPointOperator H(problem, y0.size());

    GridFunction current = y0;
    GridFunction image = H(current);
    std::vector<IterationRecord> history;
    for (std::size_t k = 1; k <= options.max_iter; ++k) {
        GridFunction next = std::move(image);
        if (next.sup_norm() > options.blowup)
            throw DivergenceError("iterate norm exceeded blow-up bound at iteration " + std::to_string(k), k);
        image = H(next);
        const IterationRecord record{k, sup_distance(next, current), sup_distance(next, image)};
        history.push_back(record);
        current = std::move(next);
        if (record.step_diff <= options.tol)
            return SolveResult{std::move(current), std::move(history), k, record.residual, true};
    }
    const double final_residual = history.back().residual;
    return SolveResult{std::move(current), std::move(history), options.max_iter, final_residual, false};
}

/// Zero initial iterate on the problem grid (or an explicit node count).
inline GridFunction zero_iterate(const FieProblem& problem, std::optional<std::size_t> n = std::nullopt) {
    return GridFunction::constant(problem.interval(), n.value_or(problem.grid_n), 0.0);
}

namespace detail {

inline double radical_inverse(std::size_t index, std::size_t base) {
    double result = 0.0;
    double f = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= static_cast<double>(base);
    }
    return result;
}

} // namespace detail

/// Lower estimate of P1: max |P(ξ, y) - P(ξ, y')| / |y - y'| over a Halton
/// point set (bases 2, 3, 5) in [0, 1] x [-e0, e0]^2, with the same (y, y')
/// pairs also evaluated on the edges ξ = 0 and ξ = 1.
inline double estimate_lipschitz_P(const FieProblem& problem, double e0, std::size_t samples = 4096) {
    if (!(e0 > 0.0) || !std::isfinite(e0)) throw DomainError("e0 must be positive");
    if (samples < 100) throw DomainError("estimate_lipschitz_P needs at least 100 samples");
    double best = 0.0;
    auto probe = [&](double xi, double y, double y2) {
        if (std::abs(y - y2) < 1e-9 * e0) return;
        const double q = std::abs(problem.P(xi, y) - problem.P(xi, y2)) / std::abs(y - y2);
        if (std::isfinite(q)) best = std::max(best, q);
    };
    for (std::size_t k = 1; k <= samples; ++k) {
        const double xi = detail::radical_inverse(k, 2);
        const double y = -e0 + 2.0 * e0 * detail::radical_inverse(k, 3);
        const double y2 = -e0 + 2.0 * e0 * detail::radical_inverse(k, 5);
        probe(xi, y, y2);
        probe(0.0, y, y2);
        probe(1.0, y, y2);
    }
    return best;
}

/// P̂ = max over the problem grid of |P(ξ, 0)|.
inline double compute_P_hat(const FieProblem& problem) {
    double m = 0.0;
    for (std::size_t i = 0; i < problem.grid_n; ++i) {
        const double v = problem.P(GridFunction::node(problem.interval(), problem.grid_n, i), 0.0);
        if (!std::isfinite(v)) throw EvaluationError("P(xi, 0) is not finite", i);
        m = std::max(m, std::abs(v));
    }
    return m;
}

struct WeightBounds {
    double K1 = 0.0;
    double K2 = 0.0;
};

/// Grid suprema of |w| and |1/w|.
inline WeightBounds bound_weight(const FieProblem& problem) {
    WeightBounds b;
    for (std::size_t i = 0; i < problem.grid_n; ++i) {
        const double w = problem.kernel.weight(GridFunction::node(problem.interval(), problem.grid_n, i));
        if (!std::isfinite(w)) throw EvaluationError("weight is not finite", i);
        if (w == 0.0) throw EvaluationError("weight vanishes", i);
        b.K1 = std::max(b.K1, std::abs(w));
        b.K2 = std::max(b.K2, std::abs(1.0 / w));
    }
    return b;
}

/// Which P̂ enters the ball condition: the supremum definition, or the
/// problem's stated P̂(e0) substitution.
enum class PHatMode { definition, paper_as_stated };

inline const char* to_string(PHatMode mode) {
    return mode == PHatMode::definition ? "definition" : "paper-as-stated";
}

inline PHatMode parse_mode(const std::string& s) {
    if (s == "definition") return PHatMode::definition;
    if (s == "paper" || s == "paper-as-stated") return PHatMode::paper_as_stated;
    throw InputError("unknown mode '" + s + "' (expected definition or paper)");
}

/// Ball condition evaluated at one e0, with every term.
struct AssumptionV {
    double e0 = 0.0;
    double P1 = 0.0;
    double P_hat = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double S1_at_e0 = 0.0;
    double warp_span = 0.0;  ///< U(1) - U(0)
    double kernel_term = 0.0;
    double lhs = 0.0;
    bool holds = false;

    explicit operator bool() const noexcept { return holds; }
};

/// Caches the e0-independent pieces of the ball condition.
class AssumptionVEvaluator {
public:
    static constexpr double default_slack = 1e-12;

    AssumptionVEvaluator(const FieProblem& problem, PHatMode mode, double slack = default_slack)
        : problem_(problem), mode_(mode), slack_(slack) {
        if (!problem.S1)
            throw InputError("problem '" + problem.name + "' declares no S1 envelope; the ball condition needs one");
        if (mode == PHatMode::paper_as_stated && !problem.stated_p_hat)
            throw InputError("problem '" + problem.name + "' has no stated P-hat substitution for paper mode");
        bounds_ = bound_weight(problem);
        if (mode == PHatMode::definition) p_hat_ = compute_P_hat(problem);
        warp_span_ = problem.kernel.warp(1.0) - problem.kernel.warp(0.0);
        kernel_factor_ = bounds_.K1 * bounds_.K2 * std::pow(warp_span_, problem.delta()) /
                         special::gamma(problem.delta() + 1.0);
    }

    AssumptionV operator()(double e0) const {
        if (!(e0 > 0.0) || !std::isfinite(e0)) throw DomainError("e0 must be positive and finite");
        AssumptionV v;
        v.e0 = e0;
        v.P1 = problem_.declared_p1 ? *problem_.declared_p1 : estimate_lipschitz_P(problem_, e0);
        v.P_hat = mode_ == PHatMode::definition ? p_hat_ : (*problem_.stated_p_hat)(e0);
        v.K1 = bounds_.K1;
        v.K2 = bounds_.K2;
        v.S1_at_e0 = (*problem_.S1)(e0);
        v.warp_span = warp_span_;
        v.kernel_term = kernel_factor_ * v.S1_at_e0;
        v.lhs = v.P1 * e0 + v.P_hat + v.kernel_term;
        v.holds = v.lhs <= e0 + slack_;
        return v;
    }

private:
    const FieProblem& problem_;
    PHatMode mode_;
    double slack_;
    WeightBounds bounds_;
    double p_hat_ = 0.0;
    double warp_span_ = 0.0;
    double kernel_factor_ = 0.0;
};

inline AssumptionV check_assumption_V(const FieProblem& problem, double e0, PHatMode mode) {
    return AssumptionVEvaluator(problem, mode)(e0);
}

struct ScanRange {
    double lo = 1e-6;
    double hi = 10.0;
    std::size_t steps = 20000;
};

struct FeasibleInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Smallest interval containing every feasible scanned e0, with each end
/// bisected against its infeasible scan neighbour (when there is one) to
/// below 1e-9.
inline std::optional<FeasibleInterval> feasible_e0_interval(const FieProblem& problem, PHatMode mode,
                                                            const ScanRange& scan = {}) {
    if (!(scan.lo > 0.0) || !(scan.lo < scan.hi)) throw DomainError("scan needs 0 < lo < hi");
    if (scan.steps < 100) throw DomainError("scan needs at least 100 steps");
    const AssumptionVEvaluator check(problem, mode);
    auto at = [&](std::size_t k) {
        return k == scan.steps ? scan.hi
                               : scan.lo + (scan.hi - scan.lo) * static_cast<double>(k) / static_cast<double>(scan.steps);
    };

    std::optional<std::size_t> first;
    std::size_t last = 0;
    for (std::size_t k = 0; k <= scan.steps; ++k) {
        if (check(at(k)).holds) {
            if (!first) first = k;
            last = k;
        }
    }
    if (!first) return std::nullopt;

    auto refine = [&](double feasible, double infeasible) {
        while (std::abs(feasible - infeasible) > 1e-13 * std::max(1.0, std::abs(feasible))) {
            const double mid = 0.5 * (feasible + infeasible);
            if (mid == feasible || mid == infeasible) break;
            (check(mid).holds ? feasible : infeasible) = mid;
        }
        return feasible;
    };

    FeasibleInterval result{at(*first), at(last)};
    if (*first > 0) result.lo = refine(at(*first), at(*first - 1));
    if (last < scan.steps) result.hi = refine(at(last), at(last + 1));
    return result;
}

/// Measured and derived constants of the solvability hypotheses.
struct HypothesisReport {
    std::string problem;
    PHatMode mode = PHatMode::definition;
    double P1 = 0.0;
    double P1_estimate = 0.0;
    std::optional<double> P1_declared;
    double P_hat = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double S1_at_e0 = 0.0;
    std::optional<AssumptionV> at_e0;
    std::optional<FeasibleInterval> e0_feasible_interval;

    /// True when a supplied e0 passes, or a scan found a feasible e0.
    bool feasible() const { return at_e0 ? at_e0->holds : e0_feasible_interval.has_value(); }
};

/// Assembles a HypothesisReport either at a given e0 or from a scan.
inline HypothesisReport build_hypothesis_report(const FieProblem& problem, PHatMode mode, std::optional<double> e0,
                                                const ScanRange& scan = {}) {
    HypothesisReport r;
    r.problem = problem.name;
    r.mode = mode;
    r.P1_declared = problem.declared_p1;
    const AssumptionVEvaluator check(problem, mode);
    if (!e0) {
        r.e0_feasible_interval = feasible_e0_interval(problem, mode, scan);
    }
    // Constants are reported at the supplied e0, else at the top of the
    // feasible interval, else at the top of the scan.
    const double reference = e0 ? *e0 : (r.e0_feasible_interval ? r.e0_feasible_interval->hi : scan.hi);
    const AssumptionV v = check(reference);
    if (e0) r.at_e0 = v;
    r.P1 = v.P1;
    r.P1_estimate = estimate_lipschitz_P(problem, reference);
    r.P_hat = v.P_hat;
    r.K1 = v.K1;
    r.K2 = v.K2;
    r.S1_at_e0 = v.S1_at_e0;
    return r;
}

/// One application of H to a family, with the terms of the bound
///   γ(H Ω, ϑ) <= P1 γ(Ω, ϑ) + γ_P(e0, ϑ) + kernel term(ϑ).
struct ContractionEstimate {
    double gamma_before = 0.0;
    double gamma_after = 0.0;
    double P1 = 0.0;
    double e0 = 0.0;
    double gamma_P = 0.0;                   ///< γ_P(e0, ϑ)
    std::optional<double> kernel_term;      ///< needs S1
    double offset = 0.0;                    ///< γ_P + kernel term
    double bound = 0.0;                     ///< P1 γ_before + offset

    double ratio() const { return gamma_before > 0.0 ? gamma_after / gamma_before : 0.0; }
};

/// γ_P(e0, ϑ) = sup |P(ξ2, y) - P(ξ1, y)| over |ξ2 - ξ1| <= ϑ on the grid and
/// |y| <= e0 sampled at `y_samples` points.
inline double p_modulus_in_xi(const FieProblem& problem, double e0, double theta, std::size_t n,
                              std::size_t y_samples = 65) {
    double m = 0.0;
    for (std::size_t s = 0; s < y_samples; ++s) {
        const double y = -e0 + 2.0 * e0 * static_cast<double>(s) / static_cast<double>(y_samples - 1);
        const auto slice = GridFunction::sample(problem.interval(), n, [&](double xi) { return problem.P(xi, y); });
        m = std::max(m, mnc::modulus_of_continuity(slice, theta));
    }
    return m;
}

inline ContractionEstimate contraction_estimate(const FieProblem& problem, const mnc::FunctionFamily& seed,
                                                double theta) {
    const std::size_t n = seed.front().size();
    const FixedPointOperator H(problem, n);
    std::vector<GridFunction> mapped;
    mapped.reserve(seed.size());
    for (const auto& f : seed.members()) mapped.push_back(H(f));

    ContractionEstimate c;
    c.gamma_before = mnc::family_modulus(seed, theta);
    c.gamma_after = mnc::family_modulus(mnc::FunctionFamily(std::move(mapped)), theta);
    c.e0 = std::max(seed.bound(), std::numeric_limits<double>::min());
    c.P1 = problem.declared_p1 ? *problem.declared_p1 : estimate_lipschitz_P(problem, c.e0);
    c.gamma_P = p_modulus_in_xi(problem, c.e0, theta, n);
    c.offset = c.gamma_P;
    if (problem.S1) {
        const auto bounds = bound_weight(problem);
        const double u0 = problem.kernel.warp(0.0);
        const auto growth = GridFunction::sample(problem.interval(), n, [&](double xi) {
            return std::pow(std::max(0.0, problem.kernel.warp(xi) - u0), problem.delta());
        });
        c.kernel_term = bounds.K1 * bounds.K2 * (*problem.S1)(c.e0) / special::gamma(problem.delta() + 1.0) *
                        mnc::modulus_of_continuity(growth, theta);
        c.offset += *c.kernel_term;
    }
    c.bound = c.P1 * c.gamma_before + c.offset;
    return c;
}

} // namespace fracfie::solver
