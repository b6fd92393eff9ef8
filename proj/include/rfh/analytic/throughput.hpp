#pragma once

#include "rfh/analytic/capacity.hpp"
#include "rfh/analytic/delivery.hpp"
#include "rfh/analytic/geometry.hpp"
#include "rfh/core.hpp"
#include "rfh/numerics/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rfh::analytic {

/// Throughput figures. Rates are bits per slot; t_total is per square meter.
struct ThroughputReport {
    double t_avg = 0.0;
    double lambda_b_active = 0.0;
    double t_total = 0.0;
};

/// T_avg = integral E[C | r1] P(Tr | r1) f_R1(r1) dr1. Pass an evaluator
/// to reuse capacity values across calls that differ only in lambda_u or
/// the energy parameters.
inline double avg_cell_throughput(const NetworkParams& params, const NumericPolicy& policy,
                                  CapacityEvaluator* capacity_cache = nullptr) {
    const NetworkParams checked = validate(params);
    if (capacity_cache && !capacity_cache->compatible(checked))
        throw std::invalid_argument("avg_cell_throughput: capacity cache built for different parameters");
    CapacityEvaluator local(checked, policy);
    CapacityEvaluator& capacity_of = capacity_cache ? *capacity_cache : local;
    auto integrand = [&](double r1) {
        const double w = nearest_distance_pdf(r1, checked);
        if (w == 0.0)
            return 0.0;
        const double capacity = capacity_of.expected_capacity(r1);
        if (capacity == 0.0)
            return 0.0;
        return w * capacity * delivery_prob_given_r1(r1, checked, policy);
    };
    return numerics::integrate_semi_infinite(integrand, policy, cell_length_scale(checked)).value;
}

/// Density of BSs whose cell holds at least one user:
/// lambda_b (1 - (1 + lambda_u / (3.5 lambda_b))^-3.5).
inline double active_bs_density(const NetworkParams& params) {
    const double ratio = params.lambda_u / params.lambda_b;
    return params.lambda_b * -std::expm1(-kCellAreaRate * std::log1p(ratio / kCellAreaRate));
}

inline ThroughputReport total_throughput(const NetworkParams& params, const NumericPolicy& policy,
                                         CapacityEvaluator* capacity_cache = nullptr) {
    ThroughputReport out;
    out.lambda_b_active = active_bs_density(validate(params));
    out.t_avg = out.lambda_b_active > 0.0 ? avg_cell_throughput(params, policy, capacity_cache) : 0.0;
    out.t_total = out.lambda_b_active * out.t_avg;
    return out;
}

struct SustainableRatio {
    double ratio = 0.0;       ///< lambda_u / lambda_b at saturation
    double plateau = 0.0;     ///< saturated metric value
    double evaluations = 0.0; ///< number of throughput evaluations
};

class SaturationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smallest lambda_u / lambda_b at which the saturation metric reaches
/// (1 - saturation_eps) of its plateau. The plateau is the metric at
/// lambda_u = plateau_multiple * lambda_b; ratios are scanned geometrically
/// from ratio_min and the crossing is refined by bisection.
inline SustainableRatio sustainable_ratio(double lambda_b, const NetworkParams& tmpl, const NumericPolicy& policy) {
    if (!(lambda_b > 0.0))
        throw std::domain_error("sustainable_ratio: lambda_b must be positive");
    NetworkParams params = tmpl;
    params.lambda_b = lambda_b;
    SustainableRatio out;
    CapacityEvaluator capacity(validate(params), policy);
    auto metric = [&](double ratio) {
        params.lambda_u = ratio * lambda_b;
        out.evaluations += 1.0;
        const auto report = total_throughput(params, policy, &capacity);
        return policy.saturation_basis == SaturationBasis::TotalThroughput ? report.t_total : report.t_avg;
    };

    out.plateau = metric(policy.plateau_multiple);
    const double beyond = metric(2.0 * policy.plateau_multiple);
    if (beyond > out.plateau * (1.0 + 0.1 * policy.saturation_eps))
        throw SaturationError("plateau not reached: throughput still rising beyond lambda_u/lambda_b = " +
                              std::to_string(policy.plateau_multiple));
    const double target = (1.0 - policy.saturation_eps) * out.plateau;

    double lo = 0.0;
    double hi = policy.ratio_min;
    while (hi < policy.plateau_multiple && metric(hi) < target) {
        lo = hi;
        hi *= policy.ratio_growth;
    }
    if (hi >= policy.plateau_multiple)
        hi = policy.plateau_multiple;
    if (lo == 0.0) {
        out.ratio = hi;
        return out;
    }
    while (hi - lo > policy.ratio_rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (metric(mid) >= target)
            hi = mid;
        else
            lo = mid;
    }
    out.ratio = hi;
    return out;
}

} // namespace rfh::analytic
