#pragma once

// Distance and cell-area densities. Cell areas and distances are handled in
// units normalized by the BS density: xi = lambda_b * area and
// r_norm = r * sqrt(lambda_b), so one cell has unit mean area.

#include "rfh/core.hpp"
#include "rfh/numerics/quadrature.hpp"
#include "rfh/numerics/special.hpp"

#include <cmath>
#include <numbers>

namespace rfh::analytic {

inline constexpr double kCellAreaShape = 4.5;
inline constexpr double kCellAreaRate = 3.5;

/// Density of the distance to the nearest BS, 2 pi lambda r exp(-lambda pi r^2).
inline double nearest_distance_pdf(double r1, const NetworkParams& params) {
    if (r1 <= 0.0)
        return 0.0;
    constexpr double pi = std::numbers::pi;
    return 2.0 * pi * params.lambda_b * r1 * std::exp(-params.lambda_b * pi * r1 * r1);
}

/// Same density in normalized distance (lambda_b = 1).
inline double nearest_distance_pdf_normalized(double r_norm) {
    if (r_norm <= 0.0)
        return 0.0;
    constexpr double pi = std::numbers::pi;
    return 2.0 * pi * r_norm * std::exp(-pi * r_norm * r_norm);
}

/// Length unit that maps physical distances to normalized ones.
inline double cell_length_scale(const NetworkParams& params) { return 1.0 / std::sqrt(params.lambda_b); }

/// Size-biased density of the normalized area of the cell holding a typical
/// user: Gamma(shape 4.5, rate 3.5).
inline double cell_area_pdf(double xi) {
    if (xi <= 0.0)
        return 0.0;
    static const double log_norm =
        kCellAreaShape * std::log(kCellAreaRate) - numerics::log_gamma(kCellAreaShape);
    return std::exp(log_norm + (kCellAreaShape - 1.0) * std::log(xi) - kCellAreaRate * xi);
}

/// Fitted density of the user-to-BS distance inside a unit-area cell.
inline double conditional_distance_pdf(double r_norm, const DistanceShape& shape = {}) {
    if (r_norm <= 0.0)
        return 0.0;
    return shape.c1 * std::pow(r_norm, shape.c2) * std::exp(-shape.c3 * std::pow(r_norm, shape.c4));
}

/// Distance density in a cell of normalized area xi, by rescaling the
/// unit-area density with r / sqrt(xi).
inline double conditional_distance_pdf_in_cell(double r_norm, double xi, const DistanceShape& shape = {}) {
    if (xi <= 0.0)
        return 0.0;
    const double root = std::sqrt(xi);
    return conditional_distance_pdf(r_norm / root, shape) / root;
}

/// Mixes the per-cell distance density over cell_area_pdf; with a good
/// shape this reproduces nearest_distance_pdf_normalized.
inline double reconstructed_distance_pdf(double r_norm, const DistanceShape& shape,
                                         const numerics::QuadOptions& opts) {
    if (r_norm <= 0.0)
        return 0.0;
    auto integrand = [&](double xi) {
        return conditional_distance_pdf_in_cell(r_norm, xi, shape) * cell_area_pdf(xi);
    };
    return numerics::integrate_from(integrand, 0.0, opts, 1.0).value;
}

} // namespace rfh::analytic
