#pragma once

// Link capacity C = log2(1 + SINR) of the typical user under Rayleigh
// fading and PPP interference.

#include "rfh/analytic/geometry.hpp"
#include "rfh/core.hpp"
#include "rfh/numerics/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace rfh::analytic {

/// rho(x) = x^(2/alpha) * integral_{x^(-2/alpha)}^inf du / (1 + u^(alpha/2)).
///
/// With beta = alpha/2 the tail beyond u = 1 is rewritten through
/// u = s^(-1/(beta-1)), which turns it into the smooth finite integral
/// integral_0^{a^(1-beta)} q ds / (1 + s^(q beta)), q = 1/(beta-1).
inline double rho(double x, double alpha) {
    if (!(alpha > 2.0))
        throw std::domain_error("rho: alpha must exceed 2");
    if (x < 0.0)
        throw std::domain_error("rho: x must be non-negative");
    if (x == 0.0)
        return 0.0;
    const numerics::QuadOptions opts{1.0e-13, 1.0e-300, 200, 1};
    const double beta = 0.5 * alpha;
    const double q = 1.0 / (beta - 1.0);
    const double lower = std::pow(x, -2.0 / alpha);

    auto tail = [&](double a) { // integral_a^inf for a >= 1
        const double upper = std::pow(a, 1.0 - beta);
        return numerics::integrate([&](double s) { return q / (1.0 + std::pow(s, q * beta)); }, 0.0, upper,
                                   opts)
            .value;
    };
    double integral;
    if (lower >= 1.0) {
        integral = tail(lower);
    } else {
        integral = tail(1.0) +
                   numerics::integrate([&](double u) { return 1.0 / (1.0 + std::pow(u, beta)); }, lower, 1.0, opts)
                       .value;
    }
    return std::pow(x, 2.0 / alpha) * integral;
}

/// SINR threshold for rate t bits: 2^t - 1.
inline double sinr_threshold(double t) { return std::expm1(t * std::numbers::ln2); }

/// P(C >= t | R = r1).
inline double capacity_ccdf(double t, double r1, const NetworkParams& params) {
    if (t < 0.0)
        throw std::domain_error("capacity_ccdf: t must be non-negative");
    if (!(r1 > 0.0))
        throw std::domain_error("capacity_ccdf: r1 must be positive");
    if (t == 0.0)
        return 1.0;
    constexpr double pi = std::numbers::pi;
    const double s = sinr_threshold(t);
    const double noise = params.sigma2 > 0.0 ? s * std::pow(r1, params.alpha) * params.sigma2 / params.p_s : 0.0;
    return std::exp(-noise - pi * params.lambda_b * r1 * r1 * rho(s, params.alpha));
}

/// Memoizes rho(2^t - 1) by t and E[C | r1] by r1. Adaptive quadratures
/// over the same mapped interval revisit identical nodes, so repeated
/// throughput evaluations (sweeps over lambda_u) mostly hit the cache.
/// Not thread-safe; use one instance per thread.
class CapacityEvaluator {
public:
    CapacityEvaluator(const NetworkParams& params, const NumericPolicy& policy)
        : params_(params), policy_(policy) {}

    double ccdf(double t, double r1) {
        if (t == 0.0)
            return 1.0;
        constexpr double pi = std::numbers::pi;
        auto it = rho_by_t_.find(t);
        if (it == rho_by_t_.end())
            it = rho_by_t_.emplace(t, rho(sinr_threshold(t), params_.alpha)).first;
        const double noise = params_.sigma2 > 0.0
                                 ? sinr_threshold(t) * std::pow(r1, params_.alpha) * params_.sigma2 / params_.p_s
                                 : 0.0;
        return std::exp(-noise - pi * params_.lambda_b * r1 * r1 * it->second);
    }

    double expected_capacity(double r1) {
        auto it = capacity_by_r1_.find(r1);
        if (it != capacity_by_r1_.end())
            return it->second;
        auto f = [&](double t) { return ccdf(t, r1); };
        const double value = numerics::integrate_from(f, 0.0, numerics::inner_quad_options(policy_), 2.0).value;
        capacity_by_r1_.emplace(r1, value);
        return value;
    }

    /// True if `params` share every field the capacity depends on.
    bool compatible(const NetworkParams& params) const {
        return params.lambda_b == params_.lambda_b && params.alpha == params_.alpha &&
               params.sigma2 == params_.sigma2 && params.p_s == params_.p_s;
    }

private:
    NetworkParams params_;
    NumericPolicy policy_;
    std::unordered_map<double, double> rho_by_t_;
    std::unordered_map<double, double> capacity_by_r1_;
};

/// E[C | R = r1] = integral_0^inf P(C >= t | r1) dt, in bits.
inline double expected_capacity_given_r1(double r1, const NetworkParams& params, const NumericPolicy& policy) {
    if (!(r1 > 0.0))
        throw std::domain_error("expected_capacity_given_r1: r1 must be positive");
    return CapacityEvaluator(params, policy).expected_capacity(r1);
}

/// integral P(C >= t | r1) f_R1(r1) dr1: the coverage probability at rate t.
inline double coverage_probability(double t, const NetworkParams& params, const NumericPolicy& policy) {
    auto integrand = [&](double r1) {
        const double w = nearest_distance_pdf(r1, params);
        return w == 0.0 ? 0.0 : w * capacity_ccdf(t, r1, params);
    };
    return numerics::integrate_semi_infinite(integrand, policy, cell_length_scale(params)).value;
}

/// Interference-limited closed form of coverage_probability (sigma2 = 0).
inline double interference_limited_coverage(double t, double alpha) {
    return 1.0 / (1.0 + rho(sinr_threshold(t), alpha));
}

} // namespace rfh::analytic
