#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracfie/error.hpp"

namespace fracfie {

/// Closed interval [a, b] with a < b.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    Interval() = default;
    Interval(double lo, double hi) : a(lo), b(hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw DomainError("interval requires finite a < b");
    }

    double length() const noexcept { return b - a; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Real function sampled on the uniform grid a + i (b - a) / (n - 1), i = 0..n-1.
class GridFunction {
public:
    GridFunction(Interval interval, std::vector<double> values)
        : interval_(interval), values_(std::move(values)) {
        if (values_.size() < 2) throw DomainError("grid function needs at least 2 nodes");
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]))
                throw EvaluationError("non-finite grid value", i);
    }

    /// n copies of `value`.
    static GridFunction constant(Interval interval, std::size_t n, double value) {
        return GridFunction(interval, std::vector<double>(n, value));
    }

    /// Samples f at the n uniform nodes of `interval`.
    template <typename F>
    static GridFunction sample(Interval interval, std::size_t n, F&& f) {
        if (n < 2) throw DomainError("grid function needs at least 2 nodes");
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = f(node(interval, n, i));
        return GridFunction(interval, std::move(v));
    }

    static double node(Interval interval, std::size_t n, std::size_t i) {
        if (i + 1 == n) return interval.b;
        return interval.a + static_cast<double>(i) * (interval.length() / static_cast<double>(n - 1));
    }

    const Interval& interval() const noexcept { return interval_; }
    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return interval_.length() / static_cast<double>(values_.size() - 1); }
    double node(std::size_t i) const { return node(interval_, values_.size(), i); }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double at(std::size_t i) const { return values_.at(i); }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool same_grid(const GridFunction& other) const noexcept {
        return interval_ == other.interval_ && values_.size() == other.values_.size();
    }

private:
    Interval interval_;
    std::vector<double> values_;
};

/// ‖f - g‖_∞ over a shared grid.
inline double sup_distance(const GridFunction& f, const GridFunction& g) {
    if (!f.same_grid(g)) throw DomainError("sup_distance: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
    return m;
}

/// Pointwise α f + β g.
inline GridFunction linear_combination(double alpha, const GridFunction& f, double beta, const GridFunction& g) {
    if (!f.same_grid(g)) throw DomainError("linear_combination: grid mismatch");
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = alpha * f[i] + beta * g[i];
    return GridFunction(f.interval(), std::move(v));
}

} // namespace fracfie
