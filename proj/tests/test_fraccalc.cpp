#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fracfie/fraccalc.hpp"
#include "fracfie/random.hpp"
#include "oracles.hpp"

using namespace fracfie;
using namespace fracfie::fraccalc;

namespace {

const Interval unit{0.0, 1.0};

GridFunction ones(std::size_t n) { return GridFunction::constant(unit, n, 1.0); }

KernelSpec weighted(double delta, RealFunction w) {
    return KernelSpec(delta, WarpFunction::identity(), WeightFunction(std::move(w)), unit);
}

double max_error(const GridFunction& f, const std::function<double(double)>& exact, double from = 0.0) {
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.node(i) >= from) e = std::max(e, std::abs(f[i] - exact(f.node(i))));
    return e;
}

double power_rule_error(double delta, std::size_t n) {
    const auto J = weighted_fractional_integral(ones(n), KernelSpec::plain(delta));
    return max_error(J, [&](double z) { return std::pow(z, delta) / std::tgamma(delta + 1.0); });
}

} // namespace

TEST(FractionalIntegral, OrderOneIsPlainIntegral) {
    const auto J = weighted_fractional_integral(ones(1025), KernelSpec::plain(1.0));
    EXPECT_LT(max_error(J, [](double z) { return z; }), 1e-14);
}

TEST(FractionalIntegral, HalfOrderOfOne) {
    const auto J = weighted_fractional_integral(ones(1025), KernelSpec::plain(0.5));
    EXPECT_EQ(J[0], 0.0);
    EXPECT_NEAR(J[1024], 1.1283791671, 1e-10);
    EXPECT_NEAR(J[1024], oracle::rl_integral(1.0, 0.5, [](double) { return 1.0; }), 1e-13);
}

TEST(FractionalIntegral, ExponentialWeight) {
    const auto J = weighted_fractional_integral(ones(1025), weighted(1.0, [](double x) { return std::exp(x); }));
    EXPECT_LT(max_error(J, [](double z) { return 1.0 - std::exp(-z); }), 1e-7);
}

TEST(FractionalIntegral, QuadraticWarp) {
    // U'(0) = 0 is rejected, so the derivative is nudged off zero; the rule
    // itself only uses U at the nodes.
    const KernelSpec spec(1.0, WarpFunction([](double x) { return x * x; }, [](double x) { return 2.0 * x + 1e-300; }),
                          WeightFunction::unit(), unit);
    const auto J = weighted_fractional_integral(ones(513), spec);
    EXPECT_LT(max_error(J, [](double z) { return z * z; }), 1e-14);
}

TEST(FractionalIntegral, LinearIntegrandAgainstQuadratureOracle) {
    const auto h = GridFunction::sample(unit, 1025, [](double x) { return x; });
    const auto J = weighted_fractional_integral(h, KernelSpec::plain(0.5));
    const double c = std::tgamma(2.0) / std::tgamma(2.5);
    for (std::size_t i : {0u, 1u, 100u, 511u, 1024u}) {
        const double z = J.node(i);
        const double expected = oracle::rl_integral(z, 0.5, [](double x) { return x; });
        EXPECT_NEAR(expected, c * std::pow(z, 1.5), 1e-14);
        EXPECT_NEAR(J[i], expected, 1e-13) << "z = " << z;
    }
}

TEST(FractionalIntegral, WarpedWeightedAgainstQuadratureOracle) {
    auto U = [](double x) { return x + 0.5 * x * x; };
    auto dU = [](double x) { return 1.0 + x; };
    auto w = [](double x) { return 1.0 / (1.0 + x * x); };
    auto h = [](double x) { return std::cos(2.0 * x); };
    const KernelSpec spec(0.3, WarpFunction(U, dU), WeightFunction(w), unit);
    double previous = 1.0;
    for (std::size_t n : {257u, 513u, 1025u}) {
        const auto J = weighted_fractional_integral(GridFunction::sample(unit, n, h), spec);
        double e = 0.0;
        for (std::size_t i = 0; i < n; i += (n - 1) / 8)
            e = std::max(e, std::abs(J[i] - oracle::weighted_fractional_integral(J.node(i), 0.0, 0.3, h, w, U, dU)));
        EXPECT_LT(e, previous / 3.0) << "n = " << n;
        previous = e;
    }
    EXPECT_LT(previous, 1e-6);
}

TEST(FractionalIntegral, PowerRuleErrorNonincreasingUnderRefinement) {
    for (double delta : {1.0 / 3.0, 0.5}) {
        const double coarse = power_rule_error(delta, 1025);
        const double fine = power_rule_error(delta, 2049);
        EXPECT_LE(coarse, 1e-3);
        EXPECT_LE(fine, coarse) << "delta = " << delta;
    }
}

TEST(FractionalIntegral, StartsAtZero) {
    const auto h = GridFunction::sample(unit, 65, [](double x) { return 3.0 + x; });
    EXPECT_EQ(weighted_fractional_integral(h, KernelSpec::plain(0.7))[0], 0.0);
}

TEST(FractionalIntegral, Linearity) {
    Rng rng(7);
    const std::size_t n = 513;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform(-1.0, 1.0);
        b[i] = rng.uniform(-1.0, 1.0);
    }
    const GridFunction h1(unit, a), h2(unit, b);
    const auto spec = weighted(0.4, [](double x) { return 2.0 + std::sin(x); });
    const double alpha = 1.75, beta = -0.6;
    const auto lhs = weighted_fractional_integral(linear_combination(alpha, h1, beta, h2), spec);
    const auto rhs = linear_combination(alpha, weighted_fractional_integral(h1, spec), beta,
                                        weighted_fractional_integral(h2, spec));
    EXPECT_LT(sup_distance(lhs, rhs), 1e-14);
}

TEST(FractionalIntegral, Positivity) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(257);
        for (auto& x : v) x = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 5.0);
        const double delta = rng.uniform(0.05, 1.95);
        const double shift = rng.uniform(0.1, 2.0);
        const auto J = weighted_fractional_integral(GridFunction(unit, v),
                                                    weighted(delta, [shift](double x) { return shift + x * x; }));
        for (double y : J.values()) EXPECT_GE(y, 0.0);
    }
}

TEST(FractionalIntegral, SemigroupConvergesAtFirstOrder) {
    auto h = [](double x) { return std::cos(3.0 * x) + x; };
    std::vector<double> errors;
    for (std::size_t n : {257u, 513u, 1025u, 2049u}) {
        const auto g = GridFunction::sample(unit, n, h);
        const auto half = KernelSpec::plain(0.5);
        errors.push_back(sup_distance(weighted_fractional_integral(weighted_fractional_integral(g, half), half),
                                      weighted_fractional_integral(g, KernelSpec::plain(1.0))));
    }
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double order = std::log2(errors[k - 1] / errors[k]);
        EXPECT_GE(order, 0.95) << "refinement " << k;
    }
    EXPECT_LT(errors.back(), 1e-4);
}

TEST(FractionalIntegral, RejectsBadSpecs) {
    EXPECT_THROW(KernelSpec::plain(0.0), DomainError);
    EXPECT_THROW(KernelSpec::plain(-0.5), DomainError);
    EXPECT_THROW(KernelSpec::plain(2.5), DomainError);
    const KernelSpec decreasing(0.5, WarpFunction([](double x) { return -x; }, [](double) { return -1.0; }),
                                WeightFunction::unit(), unit);
    EXPECT_THROW(weighted_fractional_integral(ones(33), decreasing), DomainError);
    const KernelSpec vanishing = weighted(0.5, [](double x) { return x - 0.5; });
    EXPECT_THROW(weighted_fractional_integral(ones(33), vanishing), EvaluationError);
    EXPECT_THROW(weighted_fractional_integral(GridFunction::constant({0.0, 2.0}, 33, 1.0), KernelSpec::plain(0.5)),
                 DomainError);
}

TEST(IteratedIntegral, Examples) {
    const auto spec = KernelSpec::plain(1.0);
    EXPECT_LT(max_error(iterated_weighted_integral(ones(1025), spec, 1), [](double z) { return z; }), 1e-14);
    EXPECT_LT(max_error(iterated_weighted_integral(ones(1025), spec, 2), [](double z) { return z * z / 2.0; }), 1e-14);
    EXPECT_LT(max_error(iterated_weighted_integral(ones(1025), spec, 3), [](double z) { return z * z * z / 6.0; }),
              1e-6);
}

TEST(IteratedIntegral, MatchesIntegerOrderProductRule) {
    const auto spec = weighted(2.0, [](double x) { return 1.0 + x; });
    const auto one = ones(2049);
    EXPECT_LT(sup_distance(weighted_fractional_integral(one, spec), iterated_weighted_integral(one, spec, 2)), 5e-4);
}

TEST(IteratedIntegral, AgreementTightensUnderRefinement) {
    auto h = [](double x) { return std::exp(x) - x; };
    const KernelSpec spec(1.0, WarpFunction([](double x) { return std::sinh(x); }, [](double x) { return std::cosh(x); }),
                          WeightFunction([](double x) { return 1.0 + x; }), unit);
    for (int order : {1, 2}) {
        const auto s = spec.with_delta(order);
        double previous = 1.0;
        for (std::size_t n : {129u, 257u, 513u}) {
            const auto g = GridFunction::sample(unit, n, h);
            const double d = sup_distance(weighted_fractional_integral(g, s), iterated_weighted_integral(g, s, order));
            EXPECT_LT(d, previous) << "order " << order << ", n = " << n;
            previous = d;
        }
    }
}

TEST(IteratedIntegral, RejectsUnsupportedDepth) {
    EXPECT_THROW(iterated_weighted_integral(ones(9), KernelSpec::plain(1.0), 0), DomainError);
    EXPECT_THROW(iterated_weighted_integral(ones(9), KernelSpec::plain(1.0), 4), DomainError);
}

TEST(Derivative, Examples) {
    const auto plain = KernelSpec::plain(1.0);
    const auto id = GridFunction::sample(unit, 101, [](double x) { return x; });
    EXPECT_LT(max_error(weighted_derivative_1(id, plain), [](double) { return 1.0; }), 1e-12);
    EXPECT_LT(max_error(weighted_derivative_1(GridFunction::constant(unit, 101, 4.2), plain), [](double) { return 0.0; }),
              1e-12);
    const auto exp_weight = weighted(1.0, [](double x) { return std::exp(x); });
    EXPECT_LT(max_error(weighted_derivative_1(ones(1025), exp_weight), [](double) { return 1.0; }), 1e-5);
}

TEST(Derivative, SecondOrderAccurate) {
    auto h = [](double x) { return std::sin(2.0 * x); };
    const auto spec = KernelSpec::plain(1.0);
    const double e1 = max_error(weighted_derivative_1(GridFunction::sample(unit, 201, h), spec),
                                [](double x) { return 2.0 * std::cos(2.0 * x); });
    const double e2 = max_error(weighted_derivative_1(GridFunction::sample(unit, 401, h), spec),
                                [](double x) { return 2.0 * std::cos(2.0 * x); });
    EXPECT_GT(std::log2(e1 / e2), 1.9);
}

TEST(Derivative, NeedsThreeNodes) {
    EXPECT_THROW(weighted_derivative_1(ones(2), KernelSpec::plain(1.0)), DomainError);
}

TEST(FractionalDerivative, HalfDerivativeOfSquareRoot) {
    // J^{1/2} of z^{1/2} is Γ(3/2) z, so the half derivative is the constant
    // Γ(3/2). The first cells carry the O(√Δ) start-up error of product
    // integration on √z; accuracy is asserted away from the origin.
    const double expected = std::tgamma(1.5);
    EXPECT_NEAR(oracle::rl_integral(0.7, 0.5, [](double x) { return std::sqrt(x); }), expected * 0.7, 1e-14);
    double previous = 1.0;
    for (std::size_t n : {257u, 513u, 1025u}) {
        const auto d = weighted_fractional_derivative(GridFunction::sample(unit, n, [](double x) { return std::sqrt(x); }),
                                                      KernelSpec::plain(0.5));
        const double e = max_error(d, [&](double) { return expected; }, 0.1);
        EXPECT_LT(e, previous);
        previous = e;
    }
    EXPECT_LT(previous, 1e-4);
}

TEST(FractionalDerivative, OfZeroIsZero) {
    const auto d = weighted_fractional_derivative(GridFunction::constant(unit, 129, 0.0), KernelSpec::plain(0.5));
    EXPECT_EQ(d.sup_norm(), 0.0);
}

TEST(FractionalDerivative, InvertsFractionalIntegral) {
    auto h = [](double x) { return std::cos(3.0 * x) + x; };
    const auto spec = KernelSpec::plain(0.5);
    const auto g = GridFunction::sample(unit, 1025, h);
    const auto back = weighted_fractional_derivative(weighted_fractional_integral(g, spec), spec);
    EXPECT_LT(max_error(back, h, 0.1), 1e-4);
}

TEST(FractionalDerivative, RejectsOrderOneAndAbove) {
    EXPECT_THROW(weighted_fractional_derivative(ones(33), KernelSpec::plain(1.0)), DomainError);
    EXPECT_THROW(weighted_fractional_derivative(ones(33), KernelSpec::plain(1.5)), DomainError);
}

TEST(ProductRule, RowWeightsIntegrateKernelExactly) {
    // Row i against g ≡ 1 is ∫ (U(z) - u)^{δ-1} du = (U(z) - U(a))^δ / δ.
    const KernelSpec spec(0.25, WarpFunction([](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }),
                          WeightFunction::unit(), unit);
    const ProductIntegrationRule rule(spec, 1025);
    for (std::size_t i = 1; i < rule.size(); i += 97) {
        double s = 0.0;
        for (double w : rule.row(i)) s += w;
        const double exact = std::pow(std::exp(rule.node(i)) - 1.0, 0.25) / 0.25;
        EXPECT_NEAR(s, exact, 1e-13 * exact) << "row " << i;
    }
}
