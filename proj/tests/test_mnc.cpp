#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fracfie/mnc.hpp"
#include "fracfie/problems.hpp"
#include "fracfie/solver.hpp"
#include "oracles.hpp"

using namespace fracfie;
using namespace fracfie::mnc;

namespace {

const Interval unit{0.0, 1.0};

GridFunction sampled(std::size_t n, double (*f)(double)) { return GridFunction::sample(unit, n, f); }

double id(double x) { return x; }
double square(double x) { return x * x; }
double sin5(double x) { return std::sin(5.0 * x); }

std::size_t offsets(const GridFunction& f, double theta) {
    return static_cast<std::size_t>(std::floor(theta / f.spacing() * (1.0 + 1e-12)));
}

FunctionFamily rough_family(std::size_t n, std::size_t count, double radius, Rng& rng) {
    std::vector<GridFunction> members;
    for (std::size_t m = 0; m < count; ++m) {
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-radius, radius);
        members.emplace_back(unit, std::move(v));
    }
    return FunctionFamily(std::move(members));
}

} // namespace

TEST(Modulus, Examples) {
    EXPECT_NEAR(modulus_of_continuity(sampled(1001, id), 0.1), 0.1, 1e-12);
    EXPECT_EQ(modulus_of_continuity(GridFunction::constant(unit, 1001, -3.0), 0.1), 0.0);
    const auto sq = sampled(1001, square);
    EXPECT_NEAR(oracle::brute_modulus({sq.values().begin(), sq.values().end()}, offsets(sq, 0.1)), 0.19, 1e-12);
    EXPECT_NEAR(modulus_of_continuity(sq, 0.1), 0.19, 1e-12);
}

TEST(Modulus, MatchesBruteForce) {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform() * 300);
        std::vector<double> v(n);
        double walk = 0.0;
        for (auto& x : v) x = (walk += rng.uniform(-1.0, 1.0));
        const GridFunction f(unit, v);
        for (double theta : {f.spacing(), 0.01, 0.05, 0.3, 1.0}) {
            if (theta < f.spacing()) continue;
            EXPECT_EQ(modulus_of_continuity(f, theta), oracle::brute_modulus(v, offsets(f, theta)))
                << "n = " << n << ", theta = " << theta;
        }
    }
}

TEST(Modulus, NondecreasingInTheta) {
    const auto f = sampled(1001, sin5);
    double previous = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double m = modulus_of_continuity(f, 0.005 * k);
        EXPECT_GE(m, previous);
        previous = m;
    }
}

TEST(Modulus, Subadditive) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(401);
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        const GridFunction f(unit, v);
        for (int a = 1; a < 30; a += 4)
            for (int b = 1; b < 30; b += 5) {
                const double t1 = a * f.spacing(), t2 = b * f.spacing();
                EXPECT_LE(modulus_of_continuity(f, t1 + t2),
                          modulus_of_continuity(f, t1) + modulus_of_continuity(f, t2) + 1e-15);
            }
    }
}

TEST(Modulus, RejectsThetaBelowSpacing) {
    const auto f = sampled(101, id);
    EXPECT_THROW(modulus_of_continuity(f, 0.005), DomainError);
    EXPECT_THROW(modulus_of_continuity(f, 0.0), DomainError);
    EXPECT_NO_THROW(modulus_of_continuity(f, 0.01));
}

TEST(FamilyModulus, Examples) {
    const FunctionFamily both({sampled(1001, id), sampled(1001, square)});
    EXPECT_NEAR(family_modulus(both, 0.1), 0.19, 1e-12);
    EXPECT_NEAR(family_modulus(FunctionFamily({sampled(1001, id)}), 0.1), 0.1, 1e-12);
    EXPECT_EQ(family_modulus(constant_family(unit, 1001, 5, 2.0), 0.1), 0.0);
    EXPECT_THROW(FunctionFamily({}), DomainError);
}

TEST(FamilyModulus, UnionIsMax) {
    Rng rng(9);
    for (int trial = 0; trial < 25; ++trial) {
        const auto a = random_smooth_family(unit, 257, 3, 1.0, rng);
        const auto b = rough_family(257, 2, 0.5, rng);
        for (double theta : {0.01, 0.1, 0.4})
            EXPECT_EQ(family_modulus(a.merged(b), theta), std::max(family_modulus(a, theta), family_modulus(b, theta)));
    }
}

TEST(Gamma0, LipschitzBound) {
    // Members sin(Lβ)/k are L/k-Lipschitz; the family is L-Lipschitz.
    const double L = 7.0;
    std::vector<GridFunction> members;
    for (int k = 1; k <= 4; ++k)
        members.push_back(GridFunction::sample(unit, 2001, [&](double x) { return std::sin(L * x + k) / k; }));
    const auto profile = gamma0_estimate(FunctionFamily(members), {0.2, 0.1, 0.05});
    for (std::size_t i = 0; i < profile.thetas.size(); ++i) EXPECT_LE(profile.values[i], L * profile.thetas[i] + 1e-12);
    EXPECT_LE(profile.extrapolated_gamma0, 0.05 * L);
}

TEST(Gamma0, ConstantsProfileIsZero) {
    const auto profile = gamma0_estimate(constant_family(unit, 513, 6, 1.0), {0.2, 0.1, 0.05});
    for (double v : profile.values) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(profile.extrapolated_gamma0, 0.0);
    EXPECT_EQ(hausdorff_mnc(constant_family(unit, 513, 6, 1.0), {0.2, 0.1}), 0.0);
}

TEST(Gamma0, ProfileMatchesBruteForce) {
    const FunctionFamily fam({sampled(1001, id), sampled(1001, sin5)});
    const std::vector<double> thetas{0.2, 0.1, 0.05};
    const auto profile = gamma0_estimate(fam, thetas);
    ASSERT_EQ(profile.values.size(), 3u);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        double expected = 0.0;
        for (const auto& f : fam.members())
            expected = std::max(expected, oracle::brute_modulus({f.values().begin(), f.values().end()},
                                                                offsets(f, thetas[i])));
        EXPECT_EQ(profile.values[i], expected);
    }
    EXPECT_GE(profile.extrapolated_gamma0, 0.0);
    EXPECT_LE(profile.extrapolated_gamma0, *std::min_element(profile.values.begin(), profile.values.end()));
}

TEST(Gamma0, ProfileInvariants) {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto fam = random_smooth_family(unit, 513, 5, 1.0, rng).merged(rough_family(513, 1, 0.1, rng));
        const auto p = gamma0_estimate(fam, {0.3, 0.1, 0.03, 0.01});
        for (std::size_t i = 1; i < p.values.size(); ++i) EXPECT_LE(p.values[i], p.values[i - 1]);
        EXPECT_GE(p.extrapolated_gamma0, 0.0);
        EXPECT_LE(p.extrapolated_gamma0, p.values.back());
    }
}

TEST(Gamma0, RejectsBadThetas) {
    const auto fam = constant_family(unit, 101, 2, 1.0);
    EXPECT_THROW(gamma0_estimate(fam, {0.1}), DomainError);
    EXPECT_THROW(gamma0_estimate(fam, {0.1, 0.2}), DomainError);
    EXPECT_THROW(gamma0_estimate(fam, {0.1, 0.001}), DomainError);
}

TEST(Hausdorff, HalfOfGamma0) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fam = random_smooth_family(unit, 513, 4, 2.0, rng);
        const std::vector<double> thetas{0.2, 0.1, 0.05};
        EXPECT_EQ(hausdorff_mnc(fam, thetas), 0.5 * gamma0_estimate(fam, thetas).extrapolated_gamma0);
    }
    const FunctionFamily pair({sampled(1001, id), sampled(1001, square)});
    // Extrapolating 0.19 at 0.1 and 0.0975 at 0.05 linearly gives 0.005.
    EXPECT_NEAR(hausdorff_mnc(pair, {0.2, 0.1, 0.05}), 0.5 * 0.005, 1e-12);
}

TEST(Darbo, Examples) {
    const auto one = AlphaFunction::one();
    EXPECT_TRUE(check_generalized_darbo(0.5, 1.0, one, SigmaFunction::constant(0.9), 2.0));
    EXPECT_TRUE(check_generalized_darbo(0.0, 0.0, one, SigmaFunction::constant(0.3), 2.0));
    const AlphaFunction linear([](double x) { return 1.0 + x; });
    EXPECT_NEAR(std::pow(2.5, 1.5), 3.9528, 1e-4);
    EXPECT_FALSE(check_generalized_darbo(0.5, 1.0, linear, SigmaFunction::constant(0.9), 2.0));
}

TEST(Darbo, ReducesToLinearContraction) {
    Rng rng(17);
    const auto one = AlphaFunction::one();
    for (int trial = 0; trial < 10000; ++trial) {
        const double pg = rng.uniform(0.0, 10.0), g = rng.uniform(0.0, 10.0);
        const double varpi = rng.uniform(0.0, 1.0);
        const double l = 1.0 + rng.uniform(0.0, 9.0) + 1e-12;
        EXPECT_EQ(check_generalized_darbo(pg, g, one, SigmaFunction::constant(varpi), l), pg <= varpi * g);
    }
}

TEST(Darbo, RejectsBadArguments) {
    const auto one = AlphaFunction::one();
    const auto sigma = SigmaFunction::constant(0.5);
    EXPECT_THROW(check_generalized_darbo(0.1, 0.1, one, sigma, 1.0), DomainError);
    EXPECT_THROW(check_generalized_darbo(-0.1, 0.1, one, sigma, 2.0), DomainError);
    EXPECT_THROW(SigmaFunction::constant(1.0), DomainError);
    EXPECT_THROW(check_generalized_darbo(0.1, 0.1, AlphaFunction([](double) { return 0.5; }), sigma, 2.0), DomainError);
    EXPECT_THROW(check_generalized_darbo(0.1, 0.1, one, SigmaFunction([](double) { return 1.2; }), 2.0), DomainError);
}

TEST(DarboDiagnostic, IdentityGivesConstantSequence) {
    Rng rng(2);
    const auto seed = random_smooth_family(unit, 257, 6, 1.0, rng);
    const auto seq = darbo_iteration_diagnostic([](const GridFunction& f) { return f; }, seed, 6, 0.05, 16, 99);
    ASSERT_EQ(seq.size(), 6u);
    for (double g : seq) EXPECT_EQ(g, seq.front());
    EXPECT_TRUE(is_nonincreasing(seq));
}

TEST(DarboDiagnostic, ConstantMapVanishesFromSecondGeneration) {
    Rng rng(8);
    const auto seed = random_smooth_family(unit, 257, 6, 1.0, rng);
    const auto target = GridFunction::constant(unit, 257, 0.3);
    const auto seq = darbo_iteration_diagnostic([&](const GridFunction&) { return target; }, seed, 5, 0.05, 16, 1);
    EXPECT_GT(seq[0], 0.0);
    for (std::size_t q = 1; q < seq.size(); ++q) EXPECT_EQ(seq[q], 0.0);
}

TEST(DarboDiagnostic, LinearContractionIsNonincreasing) {
    Rng rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        const auto seed = random_smooth_family(unit, 257, 8, 1.0, rng);
        const auto seq = darbo_iteration_diagnostic(
            [](const GridFunction& f) { return linear_combination(0.5, f, 0.0, f); }, seed, 6, 0.05, 16, rng.next());
        EXPECT_TRUE(is_nonincreasing(seq, default_slack));
        EXPECT_NEAR(seq.back(), seq.front() / 32.0, 1e-15);
    }
}

TEST(DarboDiagnostic, ExampleOneFixture) {
    // Regression fixture for the first built-in equation, seed family of 8
    // smooth members of the e0 ball. The finite-ϑ modulus drops on the first
    // application of H and then climbs back towards the modulus of the fixed
    // point itself, so this sequence is not monotone.
    const auto problem = problems::builtin("example1");
    Rng rng(1);
    const auto seed = random_smooth_family(unit, problem.grid_n, 8, *problem.e0, rng);
    const solver::FixedPointOperator H(problem, problem.grid_n);
    const auto seq = darbo_iteration_diagnostic([&](const GridFunction& f) { return H(f); }, seed, 6, 0.05, 16, rng.next());
    const std::vector<double> frozen{0.1152478369785902,  0.026795400720273033, 0.027691168560464496,
                                     0.036806752639477858, 0.041488583964354897, 0.043589898003699779};
    ASSERT_EQ(seq.size(), frozen.size());
    for (std::size_t q = 0; q < seq.size(); ++q) EXPECT_NEAR(seq[q], frozen[q], 1e-12 * frozen[q]) << "q = " << q + 1;
    EXPECT_FALSE(is_nonincreasing(seq));

    const auto fixed = solver::picard_solve(problem, solver::zero_iterate(problem)).solution;
    EXPECT_NEAR(seq.back(), modulus_of_continuity(fixed, 0.05), 2e-3);
}

TEST(DarboDiagnostic, Nonincreasing) {
    EXPECT_TRUE(is_nonincreasing({3.0, 2.0, 2.0, 1.0}));
    EXPECT_TRUE(is_nonincreasing({1.0, 1.0 + 1e-10}));
    EXPECT_FALSE(is_nonincreasing({1.0, 1.0 + 1e-8}));
    EXPECT_TRUE(is_nonincreasing({}));
}

TEST(Hull, ProxyKeepsMembersAndModulus) {
    Rng rng(14);
    const auto fam = random_smooth_family(unit, 257, 5, 1.0, rng);
    const auto hull = hull_proxy(fam, 16, rng);
    EXPECT_EQ(hull.size(), 21u);
    EXPECT_TRUE(fam.subset_of(hull));
    EXPECT_NEAR(family_modulus(hull, 0.1), family_modulus(fam, 0.1), 1e-15);
    EXPECT_LE(hull.bound(), fam.bound() + 1e-15);
}

TEST(Axioms, NestedFamiliesPass) {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inner = random_smooth_family(unit, 257, 3, 1.0, rng);
        const auto outer = inner.merged(rough_family(257, 2, 0.2, rng));
        const auto report = verify_mnc_axioms(inner, outer, 0.05);
        EXPECT_TRUE(report.passed());
        EXPECT_EQ(report.find("iii").status, AxiomStatus::pass);
        EXPECT_EQ(report.find("vi").status, AxiomStatus::pass);
        EXPECT_EQ(report.find("vii").status, AxiomStatus::not_decidable);
        EXPECT_EQ(report.checks.size(), 7u);
    }
}

TEST(Axioms, MixingEndpointsAreEqualities) {
    Rng rng(32);
    const auto inner = random_smooth_family(unit, 257, 3, 1.0, rng);
    const auto outer = inner.merged(random_smooth_family(unit, 257, 3, 1.0, rng));
    for (double a : {0.0, 1.0}) {
        AxiomOptions options;
        options.mixing = {a};
        options.random_mixing = 0;
        const auto& vi = verify_mnc_axioms(inner, outer, 0.05, options).find("vi");
        EXPECT_EQ(vi.lhs, vi.rhs) << "A = " << a;
    }
}

TEST(Axioms, NonNestedPairFailsMonotonicity) {
    Rng rng(33);
    const auto a = random_smooth_family(unit, 257, 3, 1.0, rng);
    const auto b = random_smooth_family(unit, 257, 3, 1.0, rng);
    const auto report = verify_mnc_axioms(a, b, 0.05);
    EXPECT_EQ(report.find("iii").status, AxiomStatus::fail);
    EXPECT_FALSE(report.passed());
}

TEST(Axioms, UnknownAxiom) {
    const auto fam = constant_family(unit, 33, 2, 1.0);
    EXPECT_THROW(verify_mnc_axioms(fam, fam, 0.1).find("viii"), InputError);
}
