#pragma once

// Successful-information-delivery probability of a typical user.

#include "rfh/analytic/energy.hpp"
#include "rfh/analytic/geometry.hpp"
#include "rfh/core.hpp"
#include "rfh/numerics/quadrature.hpp"
#include "rfh/numerics/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rfh::analytic {

struct DeliveryBreakdown {
    double p_tr = 0.0;
    std::function<double(double)> p_tr_given_r1; ///< r1 in meters
    double expected_users_typical_cell = 0.0;    ///< E[N], other users in the typical user's cell
};

/// Density of the normalized area of the typical user's cell given its
/// normalized nearest-BS distance:
///   f(xi | r) = f_{R|X=xi}(r) f_X(xi) / Z(r),
/// where Z(r) is the mixture integral itself, so that the density
/// integrates to one under the fitted distance shape.
class ConditionalAreaDensity {
public:
    ConditionalAreaDensity(double r_norm, const DistanceShape& shape, const numerics::QuadOptions& opts)
        : r_norm_(r_norm), shape_(shape), opts_(opts) {
        if (!(r_norm > 0.0))
            throw std::domain_error("ConditionalAreaDensity: distance must be positive");
        norm_ = numerics::integrate_from([this](double xi) { return unnormalized(xi); }, 0.0, opts_,
                                         scale())
                    .value;
    }

    double unnormalized(double xi) const {
        return conditional_distance_pdf_in_cell(r_norm_, xi, shape_) * cell_area_pdf(xi);
    }

    double operator()(double xi) const { return norm_ > 0.0 ? unnormalized(xi) / norm_ : 0.0; }

    double normalization() const { return norm_; }

    /// Natural scale of the density: the cell must be large enough to hold r.
    double scale() const { return std::max(1.0, r_norm_ * r_norm_); }

    /// E[g(xi) | r] by quadrature.
    template <class G>
    double expect(G&& g) const {
        if (norm_ <= 0.0)
            return 0.0;
        auto integrand = [&](double xi) {
            const double w = unnormalized(xi);
            return w == 0.0 ? 0.0 : w * g(xi);
        };
        return numerics::integrate_from(integrand, 0.0, opts_, scale()).value / norm_;
    }

    double mean() const {
        return expect([](double xi) { return xi; });
    }

private:
    double r_norm_;
    DistanceShape shape_;
    numerics::QuadOptions opts_;
    double norm_ = 0.0;
};

/// P(N = n | R = r1): Poisson(lambda_u * area) mixed over the conditional
/// cell-area density.
inline double users_pmf_given_r1(long n, double r1, const NetworkParams& params, const NumericPolicy& policy) {
    if (n < 0)
        throw std::domain_error("users_pmf_given_r1: n must be non-negative");
    if (!(r1 > 0.0))
        throw std::domain_error("users_pmf_given_r1: r1 must be positive");
    const double ratio = params.lambda_u / params.lambda_b;
    if (ratio == 0.0)
        return n == 0 ? 1.0 : 0.0;
    const ConditionalAreaDensity area(r1 / cell_length_scale(params), policy.distance_shape,
                                      numerics::inner_quad_options(policy));
    const double value = area.expect([&](double xi) { return numerics::poisson_pmf(n, ratio * xi); });
    return std::clamp(value, 0.0, 1.0);
}

/// E[N | R = r1].
inline double expected_users_given_r1(double r1, const NetworkParams& params, const NumericPolicy& policy) {
    const double ratio = params.lambda_u / params.lambda_b;
    if (ratio == 0.0)
        return 0.0;
    const ConditionalAreaDensity area(r1 / cell_length_scale(params), policy.distance_shape,
                                      numerics::inner_quad_options(policy));
    return ratio * area.mean();
}

/// Lazily evaluated P(Tr | N = n, R = r1) for a fixed r1. Entries beyond
/// the saturating user count are exactly 1.
class DeliveryByUserCount {
public:
    DeliveryByUserCount(double r1, const NetworkParams& params, const NumericPolicy& policy)
        : r1_(r1), params_(params), policy_(policy), saturated_from_(saturating_user_count(r1, params)) {}

    double operator()(long n) {
        if (n >= saturated_from_)
            return 1.0;
        const auto idx = static_cast<std::size_t>(n);
        if (idx >= cache_.size())
            cache_.resize(idx + 1, -1.0);
        if (cache_[idx] < 0.0)
            cache_[idx] = delivery_prob_given_n_r1(n, r1_, params_, policy_);
        return cache_[idx];
    }

private:
    double r1_;
    NetworkParams params_;
    NumericPolicy policy_;
    long saturated_from_;
    std::vector<double> cache_;
};

/// P(Tr | R = r1) = sum_n P(Tr | n, r1) P(N = n | r1). The sum over n is
/// taken inside the area integral, where the Poisson weights are explicit
/// and truncated at series_tail_eps.
inline double delivery_prob_given_r1(double r1, const NetworkParams& params, const NumericPolicy& policy) {
    if (!(r1 > 0.0))
        throw std::domain_error("delivery_prob_given_r1: r1 must be positive");
    DeliveryByUserCount by_count(r1, params, policy);
    const double ratio = params.lambda_u / params.lambda_b;
    if (ratio == 0.0)
        return by_count(0);
    if (saturating_user_count(r1, params) == 0)
        return 1.0;
    const ConditionalAreaDensity area(r1 / cell_length_scale(params), policy.distance_shape,
                                      numerics::inner_quad_options(policy));
    const double value = area.expect([&](double xi) {
        return numerics::poisson_expectation(
                   ratio * xi, [&](long n) { return by_count(n); }, policy.series_tail_eps, policy.n_max_cap)
            .value;
    });
    return std::clamp(value, 0.0, 1.0);
}

/// P(Tr) and the mean number of other users in the typical user's cell.
inline DeliveryBreakdown delivery_prob(const NetworkParams& params, const NumericPolicy& policy) {
    const NetworkParams checked = validate(params);
    const double scale = cell_length_scale(checked);
    auto weighted = [&](double r1) {
        const double w = nearest_distance_pdf(r1, checked);
        return w == 0.0 ? 0.0 : w * delivery_prob_given_r1(r1, checked, policy);
    };
    DeliveryBreakdown out;
    out.p_tr = std::clamp(numerics::integrate_semi_infinite(weighted, policy, scale).value, 0.0, 1.0);

    auto users = [&](double r1) {
        const double w = nearest_distance_pdf(r1, checked);
        return w == 0.0 ? 0.0 : w * expected_users_given_r1(r1, checked, policy);
    };
    out.expected_users_typical_cell = numerics::integrate_semi_infinite(users, policy, scale).value;
    out.p_tr_given_r1 = [checked, policy](double r1) { return delivery_prob_given_r1(r1, checked, policy); };
    return out;
}

} // namespace rfh::analytic
