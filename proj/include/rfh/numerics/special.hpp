#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rfh::numerics {

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("log_gamma: argument must be positive and finite");
    return boost::math::lgamma(x);
}

/// ln of the Poisson pmf P(N = n) for N ~ Poisson(mean).
inline double poisson_log_pmf(long n, double mean) {
    if (mean <= 0.0)
        return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * std::log(mean) - mean - log_gamma(static_cast<double>(n) + 1.0);
}

inline double poisson_pmf(long n, double mean) { return std::exp(poisson_log_pmf(n, mean)); }

/// Sum_{j=0}^{m-1} e^-theta theta^j / j!, i.e. P(Erlang(m, 1) >= theta),
/// the regularized upper incomplete gamma Q(m, theta). Returns exactly 1
/// for theta <= 0.
inline double poisson_cdf_upper(long m, double theta) {
    if (m < 1)
        throw std::domain_error("poisson_cdf_upper: m must be at least 1");
    if (!(theta > 0.0))
        return 1.0;
    if (std::isinf(theta))
        return 0.0;
    return std::clamp(boost::math::gamma_q(static_cast<double>(m), theta), 0.0, 1.0);
}

struct PoissonSeries {
    double value = 0.0; ///< sum of pmf(n) * term(n) over visited n
    double mass = 0.0;  ///< total pmf mass visited
    long lowest = 0;
    long highest = 0;
};

/// Evaluates E[term(N)], N ~ Poisson(mean), visiting indices outward from
/// the mode until the unvisited mass drops below `tail_eps` or the upper
/// index would exceed `n_cap`. With term in [0, 1] the truncation error is
/// at most 1 - mass.
template <class Term>
PoissonSeries poisson_expectation(double mean, Term&& term, double tail_eps, long n_cap) {
    PoissonSeries out;
    if (mean <= 0.0) {
        out.value = term(0L);
        out.mass = 1.0;
        return out;
    }
    const long mode = std::min(static_cast<long>(std::floor(mean)), n_cap);
    const double p_mode = poisson_pmf(mode, mean);
    out.value = p_mode * term(mode);
    out.mass = p_mode;
    out.lowest = out.highest = mode;

    long down = mode;
    long up = mode;
    double p_down = p_mode; // pmf at `down`
    double p_up = p_mode;   // pmf at `up`
    while (1.0 - out.mass > tail_eps) {
        const double next_down = down > 0 ? p_down * static_cast<double>(down) / mean : 0.0;
        const double next_up = up < n_cap ? p_up * mean / static_cast<double>(up + 1) : 0.0;
        if (next_down == 0.0 && next_up == 0.0)
            break;
        if (next_down >= next_up) {
            --down;
            p_down = next_down;
            out.value += p_down * term(down);
            out.mass += p_down;
        } else {
            ++up;
            p_up = next_up;
            out.value += p_up * term(up);
            out.mass += p_up;
        }
    }
    out.lowest = down;
    out.highest = up;
    return out;
}

} // namespace rfh::numerics
