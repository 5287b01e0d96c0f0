#pragma once

/**
 * @file mnc.hpp
 * @brief Measure-of-noncompactness diagnostics on finite families of sampled
 *        functions in C[a, b].
 *
 * For a family J and scale ϑ the uniform modulus of continuity is
 *   γ(J, ϑ) = sup_{ζ ∈ J} sup_{|β1 - β2| <= ϑ} |ζ(β1) - ζ(β2)|,
 * γ0(J) = lim_{ϑ -> 0} γ(J, ϑ) is the MNC on C[a, b], and the Hausdorff MNC
 * is half of γ0. On a grid only node pairs are visible, so ϑ must be at
 * least one grid spacing and γ0 is obtained by extrapolating a profile.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracfie/error.hpp"
#include "fracfie/grid.hpp"
#include "fracfie/random.hpp"

namespace fracfie::mnc {

/// Default absolute slack for floating-point inequality diagnostics.
inline constexpr double default_slack = 1e-9;

/// Non-empty finite set of grid functions sharing one grid.
class FunctionFamily {
public:
    explicit FunctionFamily(std::vector<GridFunction> members) : members_(std::move(members)) {
        if (members_.empty()) throw DomainError("function family must be non-empty");
        for (const auto& m : members_)
            if (!m.same_grid(members_.front())) throw DomainError("family members must share one grid");
    }

    std::size_t size() const noexcept { return members_.size(); }
    const std::vector<GridFunction>& members() const noexcept { return members_; }
    const GridFunction& operator[](std::size_t i) const { return members_[i]; }
    const GridFunction& front() const noexcept { return members_.front(); }

    double spacing() const noexcept { return members_.front().spacing(); }

    /// max_ζ ‖ζ‖_∞
    double bound() const {
        double m = 0.0;
        for (const auto& f : members_) m = std::max(m, f.sup_norm());
        return m;
    }

    FunctionFamily merged(const FunctionFamily& other) const {
        std::vector<GridFunction> all = members_;
        all.insert(all.end(), other.members_.begin(), other.members_.end());
        return FunctionFamily(std::move(all));
    }

    /// Whether every member of this family appears (value-for-value) in `other`.
    bool subset_of(const FunctionFamily& other) const {
        for (const auto& f : members_) {
            const bool found = std::any_of(other.members_.begin(), other.members_.end(), [&](const GridFunction& g) {
                return g.same_grid(f) && std::equal(f.values().begin(), f.values().end(), g.values().begin());
            });
            if (!found) return false;
        }
        return true;
    }

private:
    std::vector<GridFunction> members_;
};

/// Member of the class 𝔄: α : R+ -> R+ with α(x) >= 1. Checked on every call.
class AlphaFunction {
public:
    explicit AlphaFunction(std::function<double(double)> f) : f_(std::move(f)) {}

    static AlphaFunction one() {
        return AlphaFunction([](double) { return 1.0; });
    }

    double operator()(double x) const {
        const double v = f_(x);
        if (!std::isfinite(v) || v < 1.0)
            throw DomainError("alpha(" + std::to_string(x) + ") = " + std::to_string(v) + " violates alpha >= 1");
        return v;
    }

private:
    std::function<double(double)> f_;
};

/// Member of the class 𝔅: σ : R+ -> [0, 1). Checked on every call.
class SigmaFunction {
public:
    explicit SigmaFunction(std::function<double(double)> f) : f_(std::move(f)) {}

    static SigmaFunction constant(double c) {
        if (!(c >= 0.0 && c < 1.0)) throw DomainError("constant sigma must lie in [0, 1)");
        return SigmaFunction([c](double) { return c; });
    }

    double operator()(double x) const {
        const double v = f_(x);
        if (!(v >= 0.0 && v < 1.0))
            throw DomainError("sigma(" + std::to_string(x) + ") = " + std::to_string(v) + " outside [0, 1)");
        return v;
    }

private:
    std::function<double(double)> f_;
};

/// γ(J, ϑ) tabulated over a decreasing list of ϑ plus the extrapolated γ0.
struct ModulusProfile {
    std::vector<double> thetas;
    std::vector<double> values;
    double extrapolated_gamma0 = 0.0;
};

namespace detail {

inline std::size_t max_offset(const GridFunction& f, double theta) {
    if (!std::isfinite(theta) || !(theta > 0.0)) throw DomainError("theta must be positive and finite");
    const double ratio = theta / f.spacing();
    // Relative fuzz so that ϑ equal to a multiple of the spacing counts that pair.
    const auto k = static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
    if (k < 1)
        throw DomainError("theta " + std::to_string(theta) + " is below the grid spacing " +
                          std::to_string(f.spacing()));
    return std::min(k, f.size() - 1);
}

} // namespace detail

/// γ(ζ, ϑ): largest |ζ(β1) - ζ(β2)| over node pairs at distance <= ϑ.
/// Sliding-window max minus min, O(n).
inline double modulus_of_continuity(const GridFunction& f, double theta) {
    const std::size_t k = detail::max_offset(f, theta);
    const auto v = f.values();
    std::deque<std::size_t> hi;
    std::deque<std::size_t> lo;
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        while (!hi.empty() && v[hi.back()] <= v[i]) hi.pop_back();
        while (!lo.empty() && v[lo.back()] >= v[i]) lo.pop_back();
        hi.push_back(i);
        lo.push_back(i);
        if (hi.front() + k < i) hi.pop_front();
        if (lo.front() + k < i) lo.pop_front();
        best = std::max(best, v[hi.front()] - v[lo.front()]);
    }
    return best;
}

/// γ(J, ϑ) = max over members of the member modulus.
inline double family_modulus(const FunctionFamily& family, double theta) {
    double m = 0.0;
    for (const auto& f : family.members()) m = std::max(m, modulus_of_continuity(f, theta));
    return m;
}

/// Tabulates γ(J, ϑ) over `thetas` (strictly decreasing, at least two) and
/// extrapolates linearly in ϑ from the two smallest scales to ϑ = 0, clamped
/// to [0, min value].
inline ModulusProfile gamma0_estimate(const FunctionFamily& family, std::vector<double> thetas) {
    if (thetas.size() < 2) throw DomainError("gamma0_estimate needs at least two theta values");
    for (std::size_t i = 1; i < thetas.size(); ++i)
        if (!(thetas[i] < thetas[i - 1])) throw DomainError("theta values must be strictly decreasing");

    ModulusProfile profile;
    profile.values.reserve(thetas.size());
    for (double t : thetas) profile.values.push_back(family_modulus(family, t));
    profile.thetas = std::move(thetas);

    const std::size_t last = profile.thetas.size() - 1;
    const double t1 = profile.thetas[last - 1];
    const double t2 = profile.thetas[last];
    const double v1 = profile.values[last - 1];
    const double v2 = profile.values[last];
    const double slope = (v1 - v2) / (t1 - t2);
    const double floor_value = *std::min_element(profile.values.begin(), profile.values.end());
    profile.extrapolated_gamma0 = std::clamp(v2 - slope * t2, 0.0, floor_value);
    return profile;
}

/// Hausdorff MNC estimate: half the extrapolated γ0.
inline double hausdorff_mnc(const FunctionFamily& family, std::vector<double> thetas) {
    return 0.5 * gamma0_estimate(family, std::move(thetas)).extrapolated_gamma0;
}

/// Generalized Darbo condition
///   (ψ(PG) + l)^{α(ψ(PG))} <= σ(ψ(G)) ψ(G) + l,  l > 1,
/// with the exponent evaluated at ψ(PG).
inline bool check_generalized_darbo(double psi_pg, double psi_g, const AlphaFunction& alpha,
                                    const SigmaFunction& sigma, double l, double slack = 0.0) {
    if (!std::isfinite(l) || !(l > 1.0)) throw DomainError("generalized Darbo condition needs l > 1");
    if (!std::isfinite(psi_pg) || !std::isfinite(psi_g) || psi_pg < 0.0 || psi_g < 0.0)
        throw DomainError("measure values must be finite and nonnegative");
    const double lhs = std::pow(psi_pg + l, alpha(psi_pg));
    const double rhs = sigma(psi_g) * psi_g + l;
    return lhs <= rhs + slack;
}

/// Random convex combination of the members (Dirichlet(1) weights).
inline GridFunction random_convex_combination(const FunctionFamily& family, Rng& rng) {
    std::vector<double> lambda(family.size());
    double total = 0.0;
    for (auto& x : lambda) total += (x = rng.exponential());
    const auto& first = family.front();
    std::vector<double> values(first.size(), 0.0);
    for (std::size_t m = 0; m < family.size(); ++m) {
        const double c = lambda[m] / total;
        const auto v = family[m].values();
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += c * v[i];
    }
    return GridFunction(first.interval(), std::move(values));
}

/// Family plus `samples` random convex combinations: a finite stand-in for Conv.
inline FunctionFamily hull_proxy(const FunctionFamily& family, std::size_t samples, Rng& rng) {
    std::vector<GridFunction> members = family.members();
    members.reserve(members.size() + samples);
    for (std::size_t s = 0; s < samples; ++s) members.push_back(random_convex_combination(family, rng));
    return FunctionFamily(std::move(members));
}

/// `count` random Lipschitz members of the ball ‖y‖ <= radius:
///   y(ξ) = radius (c0 + c1 sin(k1 π ξ + φ1) + c2 cos(k2 π ξ + φ2)),
/// with integer k in [1, 3] and |c0| + |c1| + |c2| <= 1.
inline FunctionFamily random_smooth_family(Interval interval, std::size_t n, std::size_t count, double radius,
                                           Rng& rng) {
    if (count == 0) throw DomainError("family size must be positive");
    std::vector<GridFunction> members;
    members.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
        std::array<double, 3> c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double scale = rng.uniform(0.5, 1.0) / (std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]));
        for (auto& x : c) x *= scale * radius;
        const double k1 = 1.0 + std::floor(3.0 * rng.uniform());
        const double k2 = 1.0 + std::floor(3.0 * rng.uniform());
        const double p1 = 2.0 * std::numbers::pi * rng.uniform();
        const double p2 = 2.0 * std::numbers::pi * rng.uniform();
        members.push_back(GridFunction::sample(interval, n, [&](double x) {
            return c[0] + c[1] * std::sin(k1 * std::numbers::pi * x + p1) + c[2] * std::cos(k2 * std::numbers::pi * x + p2);
        }));
    }
    return FunctionFamily(std::move(members));
}

/// `count` constant functions evenly spread over [-radius, radius].
inline FunctionFamily constant_family(Interval interval, std::size_t n, std::size_t count, double radius) {
    if (count == 0) throw DomainError("family size must be positive");
    std::vector<GridFunction> members;
    for (std::size_t m = 0; m < count; ++m) {
        const double v = count == 1 ? 0.0 : -radius + 2.0 * radius * static_cast<double>(m) / static_cast<double>(count - 1);
        members.push_back(GridFunction::constant(interval, n, v));
    }
    return FunctionFamily(std::move(members));
}

using FamilyOperator = std::function<GridFunction(const GridFunction&)>;

/// Runs L_1 = Conv(seed), L_{q+1} = Conv(op L_q) with Conv replaced by
/// hull_proxy, and returns γ(L_q, ϑ) for q = 1..q_max. Every member of L_q is
/// mapped, so the family grows by `hull_samples` per generation.
inline std::vector<double> darbo_iteration_diagnostic(const FamilyOperator& op, const FunctionFamily& seed,
                                                      int q_max, double theta, std::size_t hull_samples,
                                                      std::uint64_t rng_seed) {
    if (q_max < 1) throw DomainError("q_max must be at least 1");
    Rng rng(rng_seed);
    std::vector<double> sequence;
    sequence.reserve(static_cast<std::size_t>(q_max));

    FunctionFamily current = hull_proxy(seed, hull_samples, rng);
    sequence.push_back(family_modulus(current, theta));
    for (int q = 2; q <= q_max; ++q) {
        std::vector<GridFunction> mapped;
        mapped.reserve(current.size());
        for (const auto& f : current.members()) mapped.push_back(op(f));
        current = hull_proxy(FunctionFamily(std::move(mapped)), hull_samples, rng);
        sequence.push_back(family_modulus(current, theta));
    }
    return sequence;
}

/// True when each entry exceeds its predecessor by at most `slack`.
inline bool is_nonincreasing(const std::vector<double>& sequence, double slack = default_slack) {
    for (std::size_t i = 1; i < sequence.size(); ++i)
        if (sequence[i] > sequence[i - 1] + slack) return false;
    return true;
}

enum class AxiomStatus { pass, fail, not_decidable };

inline const char* to_string(AxiomStatus s) {
    switch (s) {
    case AxiomStatus::pass: return "pass";
    case AxiomStatus::fail: return "fail";
    case AxiomStatus::not_decidable: return "not_decidable";
    }
    return "unknown";
}

/// One axiom's verdict. For inequality checks lhs <= rhs + slack is the test
/// and `witness` names the worst case found.
struct AxiomCheck {
    std::string axiom;
    std::string description;
    AxiomStatus status = AxiomStatus::not_decidable;
    bool proxy = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string witness;
};

struct AxiomReport {
    double theta = 0.0;
    std::vector<AxiomCheck> checks;

    bool passed() const {
        return std::none_of(checks.begin(), checks.end(),
                            [](const AxiomCheck& c) { return c.status == AxiomStatus::fail; });
    }

    const AxiomCheck& find(const std::string& axiom) const {
        for (const auto& c : checks)
            if (c.axiom == axiom) return c;
        throw InputError("no check for axiom " + axiom);
    }
};

struct AxiomOptions {
    std::vector<double> mixing{0.0, 0.25, 0.5, 0.75, 1.0};
    std::size_t random_mixing = 4;
    std::size_t hull_samples = 16;
    std::uint64_t seed = 1;
    double slack = default_slack;
};

/// Checks the computable MNC axioms for ψ = γ(·, ϑ) on finite proxies, with
/// J expected to be a sub-family of J_sup.
inline AxiomReport verify_mnc_axioms(const FunctionFamily& family, const FunctionFamily& superset, double theta,
                                     const AxiomOptions& options = {}) {
    AxiomReport report;
    report.theta = theta;
    Rng rng(options.seed);
    const double g_small = family_modulus(family, theta);
    const double g_large = family_modulus(superset, theta);

    report.checks.push_back({"i", "psi(V) = 0 implies V relatively compact", AxiomStatus::pass, true, 0.0, 0.0,
                             "finite families are always relatively compact"});

    {
        // Constant functions at each member's first value: a kernel element.
        std::vector<GridFunction> constants;
        for (const auto& f : family.members())
            constants.push_back(GridFunction::constant(f.interval(), f.size(), f[0]));
        const double g0 = family_modulus(FunctionFamily(std::move(constants)), theta);
        report.checks.push_back({"ii", "ker psi is non-empty", g0 <= options.slack ? AxiomStatus::pass : AxiomStatus::fail,
                                 true, g0, 0.0, "family of constants"});
    }

    {
        AxiomCheck c{"iii", "V subset of V1 implies psi(V) <= psi(V1)", AxiomStatus::pass, false, g_small, g_large, ""};
        if (!family.subset_of(superset)) {
            c.status = AxiomStatus::fail;
            c.witness = "precondition violated: J is not a sub-family of J_sup";
        } else if (g_small > g_large + options.slack) {
            c.status = AxiomStatus::fail;
            c.witness = "modulus of J exceeds modulus of J_sup";
        }
        report.checks.push_back(std::move(c));
    }

    report.checks.push_back({"iv", "psi(closure V) = psi(V)", AxiomStatus::pass, true, g_small, g_small,
                             "finite families are closed"});

    {
        const double g_hull = family_modulus(hull_proxy(superset, options.hull_samples, rng), theta);
        const bool ok = std::abs(g_hull - g_large) <= options.slack;
        report.checks.push_back({"v", "psi(Conv V) = psi(V)", ok ? AxiomStatus::pass : AxiomStatus::fail, true, g_hull,
                                 g_large,
                                 std::to_string(options.hull_samples) + " random convex combinations of J_sup"});
    }

    {
        std::vector<double> mixing = options.mixing;
        for (std::size_t s = 0; s < options.random_mixing; ++s) mixing.push_back(rng.uniform());
        AxiomCheck c{"vi", "psi(A V + (1-A) V1) <= A psi(V) + (1-A) psi(V1)", AxiomStatus::pass, false,
                     0.0, 0.0, ""};
        double worst_margin = -std::numeric_limits<double>::infinity();
        for (double a : mixing) {
            std::vector<GridFunction> combos;
            combos.reserve(family.size() * superset.size());
            for (const auto& f : family.members())
                for (const auto& g : superset.members()) combos.push_back(linear_combination(a, f, 1.0 - a, g));
            const double lhs = family_modulus(FunctionFamily(std::move(combos)), theta);
            const double rhs = a * g_small + (1.0 - a) * g_large;
            if (lhs - rhs > worst_margin) {
                worst_margin = lhs - rhs;
                c.lhs = lhs;
                c.rhs = rhs;
                c.witness = "A = " + std::to_string(a);
            }
        }
        if (worst_margin > options.slack) c.status = AxiomStatus::fail;
        report.checks.push_back(std::move(c));
    }

    report.checks.push_back({"vii", "nested closed sequence with psi -> 0 has non-empty intersection",
                             AxiomStatus::not_decidable, true, 0.0, 0.0,
                             "requires infinite nested sequences; not decidable on finite samples"});
    return report;
}

} // namespace fracfie::mnc
