#pragma once

#include "rfh/core.hpp"

namespace rfh::testing {

/// Baseline parameters with densities given per km^2.
inline NetworkParams params_km2(double lambda_b, double lambda_u, double e_th) {
    NetworkParams p;
    p.lambda_b = units::per_km2_to_per_m2(lambda_b);
    p.lambda_u = units::per_km2_to_per_m2(lambda_u);
    p.e_th = e_th;
    return p;
}

} // namespace rfh::testing
