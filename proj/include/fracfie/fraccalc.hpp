#pragma once

/**
 * @file fraccalc.hpp
 * @brief Weighted fractional integrals and derivatives with respect to a warp
 *        function U, on uniform grids.
 *
 *   (J^δ_w h)(z) = w(z)^{-1} / Γ(δ) ∫_a^z (U(z) - U(η))^{δ-1} w(η) h(η) U'(η) dη
 *
 * The singular integral is evaluated by product integration in the warped
 * variable u = U(η): the smooth factor g = w·h is interpolated piecewise
 * linearly on the image nodes u_j = U(ξ_j), and the kernel (U(z) - u)^{δ-1}
 * is integrated exactly against each hat function. No kernel sample is ever
 * taken at the singular point, and U is never inverted.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracfie/error.hpp"
#include "fracfie/grid.hpp"
#include "fracfie/parallel.hpp"
#include "fracfie/special.hpp"

namespace fracfie::fraccalc {

using RealFunction = std::function<double(double)>;

/// Strictly increasing differentiable change of variable U and its derivative.
class WarpFunction {
public:
    WarpFunction(RealFunction u, RealFunction du) : u_(std::move(u)), du_(std::move(du)) {
        if (!u_ || !du_) throw DomainError("warp function and derivative must be callable");
    }

    static WarpFunction identity() {
        return WarpFunction([](double x) { return x; }, [](double) { return 1.0; });
    }

    double operator()(double x) const { return u_(x); }
    double derivative(double x) const { return du_(x); }

    /// Throws DomainError unless U' > 0 and U strictly increases across the
    /// nodes of `interval` sampled at n points.
    void validate(Interval interval, std::size_t n) const {
        double previous = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = GridFunction::node(interval, n, i);
            const double d = du_(x);
            const double v = u_(x);
            if (!std::isfinite(v) || !std::isfinite(d)) throw EvaluationError("warp is not finite", i);
            if (!(d > 0.0))
                throw DomainError("warp derivative must be positive; got " + std::to_string(d) +
                                  " at node " + std::to_string(i));
            if (i > 0 && !(v > previous))
                throw DomainError("warp is not strictly increasing at node " + std::to_string(i));
            previous = v;
        }
    }

private:
    RealFunction u_;
    RealFunction du_;
};

/// Nonvanishing weight w with bounded reciprocal.
class WeightFunction {
public:
    explicit WeightFunction(RealFunction w) : w_(std::move(w)) {
        if (!w_) throw DomainError("weight function must be callable");
    }

    static WeightFunction unit() {
        return WeightFunction([](double) { return 1.0; });
    }

    double operator()(double x) const { return w_(x); }

    void validate(Interval interval, std::size_t n) const {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = w_(GridFunction::node(interval, n, i));
            if (!std::isfinite(v)) throw EvaluationError("weight is not finite", i);
            if (v == 0.0 || !std::isfinite(1.0 / v)) throw EvaluationError("weight vanishes", i);
        }
    }

private:
    RealFunction w_;
};

/// Order, warp, weight and interval of a weighted fractional operator.
struct KernelSpec {
    double delta;
    WarpFunction warp;
    WeightFunction weight;
    Interval interval;

    KernelSpec(double order, WarpFunction u, WeightFunction w, Interval iv)
        : delta(order), warp(std::move(u)), weight(std::move(w)), interval(iv) {
        if (!std::isfinite(order) || !(order > 0.0) || order > 2.0)
            throw DomainError("kernel order must satisfy 0 < delta <= 2, got " + std::to_string(order));
    }

    /// Riemann-Liouville kernel: U = id, w = 1.
    static KernelSpec plain(double order, Interval iv = {0.0, 1.0}) {
        return KernelSpec(order, WarpFunction::identity(), WeightFunction::unit(), iv);
    }

    KernelSpec with_delta(double order) const { return KernelSpec(order, warp, weight, interval); }
};

namespace detail {

// 6-point Gauss-Legendre on [0, 1].
inline constexpr std::array<double, 6> gl_nodes{
    0.5 - 0.5 * 0.9324695142031520278, 0.5 - 0.5 * 0.6612093864662645137, 0.5 - 0.5 * 0.2386191860831969086,
    0.5 + 0.5 * 0.2386191860831969086, 0.5 + 0.5 * 0.6612093864662645137, 0.5 + 0.5 * 0.9324695142031520278,
};
inline constexpr std::array<double, 6> gl_weights{
    0.5 * 0.1713244923791703450, 0.5 * 0.3607615730481386076, 0.5 * 0.4679139345726910474,
    0.5 * 0.4679139345726910474, 0.5 * 0.3607615730481386076, 0.5 * 0.1713244923791703450,
};

/// Moments of s^{δ-1} against the two hat functions of one segment, where s
/// is the distance to the evaluation point and runs over [B, B + L].
/// Returns {weight for the far node (s = B + L), weight for the near node (s = B)}.
inline std::pair<double, double> segment_weights(double near, double length, double delta) {
    const double far = near + length;
    if (near < 8.0 * length) {
        // Closed form; cancellation is bounded by (far / length)^2 <= 81.
        const double p_far = std::pow(far, delta) / delta;
        const double p_near = std::pow(near, delta) / delta;
        const double q_far = std::pow(far, delta + 1.0) / (delta + 1.0);
        const double q_near = std::pow(near, delta + 1.0) / (delta + 1.0);
        const double dp = p_far - p_near;
        const double dq = q_far - q_near;
        return {(dq - near * dp) / length, (far * dp - dq) / length};
    }
    // Away from the singularity the kernel is analytic on the segment with
    // its nearest singularity at least 8 lengths away; Gauss-Legendre is
    // accurate to round-off and avoids the closed form's cancellation.
    double far_w = 0.0;
    double near_w = 0.0;
    for (std::size_t k = 0; k < gl_nodes.size(); ++k) {
        const double t = gl_nodes[k];
        const double kernel = std::pow(near + length * t, delta - 1.0) * gl_weights[k];
        far_w += kernel * t;
        near_w += kernel * (1.0 - t);
    }
    return {length * far_w, length * near_w};
}

} // namespace detail

/// Product-integration weights for one KernelSpec on an n-node uniform grid.
///
/// Row i holds W_ij, j = 0..i, such that
///   ∫_{U(a)}^{U(ξ_i)} (U(ξ_i) - u)^{δ-1} g(u) du ≈ Σ_j W_ij g(u_j)
/// with g piecewise linear on the image nodes. Storage is the lower triangle,
/// n(n+1)/2 doubles.
class ProductIntegrationRule {
public:
    ProductIntegrationRule(const KernelSpec& spec, std::size_t n)
        : interval_(spec.interval), n_(n), delta_(spec.delta), inv_gamma_(1.0 / special::gamma(spec.delta)) {
        if (n < 2) throw DomainError("product integration needs at least 2 nodes");
        spec.warp.validate(interval_, n);
        spec.weight.validate(interval_, n);

        images_.resize(n);
        weight_.resize(n);
        inv_weight_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = GridFunction::node(interval_, n, i);
            images_[i] = spec.warp(x);
            weight_[i] = spec.weight(x);
            inv_weight_[i] = 1.0 / weight_[i];
        }

        weights_.assign(n * (n + 1) / 2, 0.0);
        parallel_for(1, n, [this](std::size_t i) {
            double* row = weights_.data() + offset(i);
            for (std::size_t j = 0; j < i; ++j) {
                const double near = images_[i] - images_[j + 1];
                const double length = images_[j + 1] - images_[j];
                const auto [far_w, near_w] = detail::segment_weights(near, length, delta_);
                row[j] += far_w;
                row[j + 1] += near_w;
            }
        }, 16);
    }

    std::size_t size() const noexcept { return n_; }
    double delta() const noexcept { return delta_; }
    const Interval& interval() const noexcept { return interval_; }
    double node(std::size_t i) const { return GridFunction::node(interval_, n_, i); }
    double weight_at(std::size_t i) const { return weight_[i]; }
    double inverse_weight_at(std::size_t i) const { return inv_weight_[i]; }
    double inverse_gamma() const noexcept { return inv_gamma_; }
    std::span<const double> images() const noexcept { return images_; }

    std::span<const double> row(std::size_t i) const { return {weights_.data() + offset(i), i + 1}; }

    /// w(ξ_i)^{-1}/Γ(δ) Σ_j W_ij w(ξ_j) g(j): the weighted operator applied to
    /// a per-row integrand g(j). Row 0 is the empty integral and returns 0.
    template <typename Integrand>
    double apply_row(std::size_t i, Integrand&& g) const {
        if (i == 0) return 0.0;
        const auto r = row(i);
        // Neumaier-compensated sum.
        double sum = 0.0;
        double carry = 0.0;
        for (std::size_t j = 0; j <= i; ++j) {
            const double term = r[j] * weight_[j] * g(j);
            const double t = sum + term;
            carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        }
        return inv_weight_[i] * inv_gamma_ * (sum + carry);
    }

    /// J^δ_w applied to grid values h.
    std::vector<double> integrate(std::span<const double> h) const {
        if (h.size() != n_) throw DomainError("integrate: value count does not match rule size");
        std::vector<double> out(n_, 0.0);
        parallel_for(1, n_, [&](std::size_t i) { out[i] = apply_row(i, [&](std::size_t j) { return h[j]; }); }, 16);
        return out;
    }

private:
    static std::size_t offset(std::size_t i) noexcept { return i * (i + 1) / 2; }

    Interval interval_;
    std::size_t n_;
    double delta_;
    double inv_gamma_;
    std::vector<double> images_;
    std::vector<double> weight_;
    std::vector<double> inv_weight_;
    std::vector<double> weights_;
};

inline void require_same_interval(const GridFunction& h, const KernelSpec& spec) {
    if (!(h.interval() == spec.interval))
        throw DomainError("grid function interval does not match kernel interval");
}

/// J^δ_w h at every node of h's grid (product-trapezoidal scheme).
inline GridFunction weighted_fractional_integral(const GridFunction& h, const KernelSpec& spec) {
    require_same_interval(h, spec);
    const ProductIntegrationRule rule(spec, h.size());
    return GridFunction(h.interval(), rule.integrate(h.values()));
}

/// Integer-order J^n_w h, n in {1, 2, 3}, by literally nesting n cumulative
/// trapezoidal integrals in the original variable with the U' factor:
///   w(z)^{-1} ∫_a^z U'(y1) ∫_a^{y1} U'(y2) ... ∫_a^{y_{n-1}} w h U' dy_n ... dy1.
/// Independent of the product-integration route.
inline GridFunction iterated_weighted_integral(const GridFunction& h, const KernelSpec& spec, int n) {
    if (n < 1 || n > 3) throw DomainError("iterated_weighted_integral supports n in {1,2,3}, got " + std::to_string(n));
    require_same_interval(h, spec);
    const std::size_t size = h.size();
    const double step = h.spacing();

    std::vector<double> du(size);
    std::vector<double> integrand(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double x = h.node(i);
        du[i] = spec.warp.derivative(x);
        integrand[i] = spec.weight(x) * h[i] * du[i];
    }

    std::vector<double> level(size, 0.0);
    for (int depth = 0; depth < n; ++depth) {
        level.assign(size, 0.0);
        for (std::size_t i = 1; i < size; ++i)
            level[i] = level[i - 1] + 0.5 * step * (integrand[i - 1] + integrand[i]);
        for (std::size_t i = 0; i < size; ++i) integrand[i] = du[i] * level[i];
    }

    std::vector<double> out(size);
    for (std::size_t i = 0; i < size; ++i) out[i] = level[i] / spec.weight(h.node(i));
    return GridFunction(h.interval(), std::move(out));
}

/// D¹_w h = w^{-1} (d/dz)(w h) / U', second-order differences throughout
/// (central inside, three-point one-sided at the ends).
inline GridFunction weighted_derivative_1(const GridFunction& h, const KernelSpec& spec) {
    require_same_interval(h, spec);
    const std::size_t n = h.size();
    if (n < 3) throw DomainError("weighted_derivative_1 needs at least 3 nodes");
    const double step = h.spacing();

    std::vector<double> wh(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = spec.weight(h.node(i));
        wh[i] = w[i] * h[i];
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d;
        if (i == 0)
            d = (-3.0 * wh[0] + 4.0 * wh[1] - wh[2]) / (2.0 * step);
        else if (i + 1 == n)
            d = (3.0 * wh[n - 1] - 4.0 * wh[n - 2] + wh[n - 3]) / (2.0 * step);
        else
            d = (wh[i + 1] - wh[i - 1]) / (2.0 * step);
        const double du = spec.warp.derivative(h.node(i));
        if (!(du > 0.0)) throw DomainError("warp derivative must be positive at node " + std::to_string(i));
        out[i] = d / (w[i] * du);
    }
    return GridFunction(h.interval(), std::move(out));
}

/// D^δ_w h = D¹_w (J^{1-δ}_w h) for 0 < δ < 1.
inline GridFunction weighted_fractional_derivative(const GridFunction& h, const KernelSpec& spec) {
    if (!(spec.delta > 0.0 && spec.delta < 1.0))
        throw DomainError("weighted_fractional_derivative supports 0 < delta < 1, got " + std::to_string(spec.delta));
    const KernelSpec complement = spec.with_delta(1.0 - spec.delta);
    return weighted_derivative_1(weighted_fractional_integral(h, complement), spec);
}

} // namespace fracfie::fraccalc
