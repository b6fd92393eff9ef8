#pragma once

// Energy readiness of a typical user under the mean-field approximation:
// the nearest-BS harvest keeps its Erlang fading, the rest of the field is
// replaced by its Campbell mean.

#include "rfh/core.hpp"
#include "rfh/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rfh::analytic {

/// Number of harvesting slots before the k-th scheduled slot of a user
/// sharing its cell with n others, i.e. k(n+1)-1.
inline long harvesting_slots(long k, long n) { return k * (n + 1) - 1; }

/// Index of the Erlang CCDF sum for the selected reading.
inline long erlang_shape(long k, long n, ErlangIndexMode mode) {
    return mode == ErlangIndexMode::ShapeConsistent ? harvesting_slots(k, n) : k;
}

/// E_th r1^alpha / (a P_S) - 2 pi [k(n+1)-1] lambda_b r1^2 / (alpha - 2).
/// May be negative when the mean far-field harvest alone suffices.
inline double theta(long k, long n, double r1, const NetworkParams& params) {
    constexpr double pi = std::numbers::pi;
    const double near = params.e_th * std::pow(r1, params.alpha) / params.harvest_scale();
    const double far = 2.0 * pi * static_cast<double>(harvesting_slots(k, n)) * params.lambda_b * r1 *
                       r1 / (params.alpha - 2.0);
    return near - far;
}

namespace detail {

inline void check_indices(long k, long n, double r1) {
    if (k < 1)
        throw std::domain_error("round index k must be at least 1");
    if (n < 0)
        throw std::domain_error("other-user count n must be non-negative");
    if (!(r1 > 0.0))
        throw std::domain_error("distance r1 must be positive");
}

// k = 0 is the empty prefix: no harvest has happened yet.
inline double ready_prob_unchecked(long k, long n, double r1, const NetworkParams& params,
                                   ErlangIndexMode mode) {
    if (k == 0)
        return 0.0;
    const double th = theta(k, n, r1, params);
    if (th <= 0.0)
        return 1.0;
    const long m = erlang_shape(k, n, mode);
    if (m == 0)
        return 0.0; // no fading terms: the deterministic mean falls short
    return numerics::poisson_cdf_upper(m, th);
}

} // namespace detail

/// Probability that the energy harvested before the k-th scheduled slot
/// reaches E_th, given n other users and nearest-BS distance r1.
inline double energy_ready_prob(long k, long n, double r1, const NetworkParams& params,
                                const NumericPolicy& policy) {
    detail::check_indices(k, n, r1);
    return detail::ready_prob_unchecked(k, n, r1, params, policy.erlang_index_mode);
}

/// P(K = k): the user first becomes energy-ready at round k.
inline double rounds_pmf(long k, long n, double r1, const NetworkParams& params, const NumericPolicy& policy) {
    detail::check_indices(k, n, r1);
    const auto mode = policy.erlang_index_mode;
    const double diff = detail::ready_prob_unchecked(k, n, r1, params, mode) -
                        detail::ready_prob_unchecked(k - 1, n, r1, params, mode);
    return std::clamp(diff, 0.0, 1.0);
}

struct RoundsSeries {
    double delivery = 0.0;    ///< E[1/K]
    double mass = 0.0;        ///< sum of the (clamped) pmf terms visited
    double clamped_mass = 0.0; ///< magnitude of negative pmf differences removed
    long last_round = 0;
};

/// E[1/K] together with truncation diagnostics. The series stops once the
/// residual pmf mass is below series_tail_eps or k reaches k_max_cap.
/// Leading rounds whose cumulative readiness stays below
/// 1e-3 * series_tail_eps are skipped by bisection (the ready probability
/// is non-decreasing in k), which keeps far-field users with thousands of
/// charging rounds cheap.
inline RoundsSeries rounds_series(long n, double r1, const NetworkParams& params, const NumericPolicy& policy) {
    detail::check_indices(1, n, r1);
    const auto mode = policy.erlang_index_mode;
    auto ready = [&](long k) { return detail::ready_prob_unchecked(k, n, r1, params, mode); };
    const double floor = 1.0e-3 * policy.series_tail_eps;
    RoundsSeries out;
    double prev = 0.0;
    long first = 1;
    if (ready(1) <= floor) {
        // Bracket [lo, hi] with ready(lo) <= floor < ready(hi), galloping out
        // from where the Erlang sum first clears Theta by ~7 deviations.
        const long cap = policy.k_max_cap;
        const double a = theta(1, 0, r1, params);     // near-field requirement
        const double b = a - theta(1, 1, r1, params); // mean far-field harvest per slot
        constexpr double z = 7.0;
        const double root = (-z + std::sqrt(z * z + 4.0 * (1.0 + b) * a)) / (2.0 * (1.0 + b));
        const double m_guess = root * root;
        const double k_guess = std::floor((m_guess + 1.0) / static_cast<double>(n + 1));
        long lo = 1;
        long hi = cap;
        const long start =
            std::isfinite(k_guess) ? static_cast<long>(std::clamp(k_guess, 2.0, static_cast<double>(cap))) : 2;
        if (ready(start) <= floor) {
            lo = start;
            for (long step = 1; lo < cap; step *= 2) {
                const long next = std::min(cap, lo + step);
                if (ready(next) > floor) {
                    hi = next;
                    break;
                }
                lo = next;
            }
        } else {
            hi = start;
            for (long step = 1; hi - 1 > 1; step *= 2) {
                const long next = std::max(1L, hi - step);
                if (ready(next) <= floor) {
                    lo = next;
                    break;
                }
                hi = next;
            }
        }
        while (hi - lo > 1) {
            const long mid = lo + (hi - lo) / 2;
            (ready(mid) <= floor ? lo : hi) = mid;
        }
        first = hi;
        prev = ready(lo);
    }
    double reached = prev;
    for (long k = first; k <= policy.k_max_cap; ++k) {
        const double cur = ready(k);
        const double diff = cur - prev;
        prev = cur;
        if (diff < 0.0)
            out.clamped_mass += -diff;
        const double pmf = std::clamp(diff, 0.0, 1.0);
        out.delivery += pmf / static_cast<double>(k);
        out.mass += pmf;
        out.last_round = k;
        reached = std::max(reached, cur);
        if (1.0 - reached < policy.series_tail_eps)
            break;
    }
    return out;
}

/// P(Tr | N = n, R = r1) = sum_k P(K = k) / k.
inline double delivery_prob_given_n_r1(long n, double r1, const NetworkParams& params,
                                       const NumericPolicy& policy) {
    const auto series = rounds_series(n, r1, params, policy);
    double value = series.delivery;
    // Negative differences only arise from a non-monotone approximation;
    // renormalize the clamped pmf in that case.
    if (series.clamped_mass > 0.0 && series.mass > 0.0)
        value /= std::max(series.mass, 1.0);
    return std::clamp(value, 0.0, 1.0);
}

/// Smallest n at which Theta(1, n, r1) <= 0, so that every n beyond it is
/// ready in the first round and delivers with probability 1.
inline long saturating_user_count(double r1, const NetworkParams& params) {
    constexpr double pi = std::numbers::pi;
    const double near = params.e_th * std::pow(r1, params.alpha) / params.harvest_scale();
    const double per_slot = 2.0 * pi * params.lambda_b * r1 * r1 / (params.alpha - 2.0);
    const double slots = near / per_slot; // need n >= slots
    if (!std::isfinite(slots) || slots > 1.0e15)
        return std::numeric_limits<long>::max();
    long n = std::max(0L, static_cast<long>(std::ceil(slots)));
    while (n > 0 && theta(1, n - 1, r1, params) <= 0.0)
        --n;
    while (theta(1, n, r1, params) > 0.0)
        ++n;
    return n;
}

} // namespace rfh::analytic
