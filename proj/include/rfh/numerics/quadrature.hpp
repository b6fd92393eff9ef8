#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, plus a semi-infinite
// front end that maps [lower, inf) onto [0, 1) with x = lower + s*u/(1-u).

#include "rfh/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfh::numerics {

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int evaluations = 0;
};

/// Thrown when the error target is not met within the subdivision budget.
/// Carries the best partial estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadResult partial)
        : std::runtime_error(what), partial_(partial) {}

    const QuadResult& partial() const noexcept { return partial_; }

private:
    QuadResult partial_;
};

struct QuadOptions {
    double rel_tol = 1.0e-9;
    double abs_tol = 1.0e-15;
    int max_subdivisions = 4000;
    int initial_pieces = 8;
};

inline QuadOptions quad_options(const NumericPolicy& policy) {
    return {policy.quad_rel_tol, policy.quad_abs_tol, policy.quad_max_subdivisions, 8};
}

/// Options for an integral nested inside another: tighter, so the inner
/// adaptive noise stays below the outer error target.
inline QuadOptions inner_quad_options(const NumericPolicy& policy) {
    auto opts = quad_options(policy);
    opts.rel_tol = std::max(policy.quad_rel_tol * 0.05, 2.0e-13);
    opts.abs_tol = policy.quad_abs_tol * 0.05;
    return opts;
}

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const noexcept { return error < other.error; }
};

template <class F>
double checked_eval(F& f, double x) {
    const double y = static_cast<double>(f(x));
    if (!std::isfinite(y))
        throw QuadratureError("integrand returned a non-finite value at x = " + std::to_string(x),
                              QuadResult{});
    return y;
}

// QUADPACK qk15 error heuristic.
template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked_eval(f, center);

    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = checked_eval(f, center - dx);
        f2[j] = checked_eval(f, center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            gauss += kGaussWeights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = kronrod * half;
    abs_sum *= std::abs(half);
    asc *= std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0)
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * abs_sum, err);
    return {a, b, value, err};
}

} // namespace detail

/// Integrates f over the finite interval [a, b].
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
    if (a == b)
        return {};
    std::priority_queue<detail::Segment> heap;
    double total = 0.0;
    double total_err = 0.0;
    int evals = 0;
    const int pieces = std::max(1, opts.initial_pieces);
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + (b - a) * i / pieces;
        const double hi = (i + 1 == pieces) ? b : a + (b - a) * (i + 1) / pieces;
        auto seg = detail::gauss_kronrod_15(f, lo, hi);
        evals += 15;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    int subdivisions = 0;
    auto target = [&] { return std::max(opts.rel_tol * std::abs(total), opts.abs_tol); };
    while (total_err > target()) {
        if (subdivisions >= opts.max_subdivisions)
            throw QuadratureError("quadrature did not converge within " +
                                      std::to_string(opts.max_subdivisions) + " subdivisions",
                                  QuadResult{total, total_err, evals});
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Interval can no longer be split in floating point.
        if (!(mid > worst.a && mid < worst.b))
            break;
        heap.pop();
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Re-sum to shed drift from the incremental updates.
    double sum = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, evals};
}

/// Integrates f over [lower, inf). `scale` should be the natural length of
/// the integrand: half of the mapped interval covers [lower, lower + scale].
template <class F>
QuadResult integrate_from(F&& f, double lower, const QuadOptions& opts, double scale = 1.0) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("integrate_from: scale must be positive and finite");
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double x = lower + scale * u / one_minus;
        if (!std::isfinite(x))
            return 0.0;
        const double jac = scale / (one_minus * one_minus);
        const double y = static_cast<double>(f(x));
        if (y == 0.0)
            return 0.0;
        return y * jac;
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

template <class F>
QuadResult integrate_semi_infinite(F&& f, const NumericPolicy& policy, double scale = 1.0) {
    return integrate_from(std::forward<F>(f), 0.0, quad_options(policy), scale);
}

} // namespace rfh::numerics
