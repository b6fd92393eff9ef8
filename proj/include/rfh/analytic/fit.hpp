#pragma once

// Least-squares fit of the unit-cell distance density c1 r^c2 exp(-c3 r^c4)
// (c2 held at 1) so that mixing it over cell areas reproduces the
// nearest-BS distance density.

#include "rfh/analytic/geometry.hpp"
#include "rfh/core.hpp"
#include "rfh/numerics/minimize.hpp"
#include "rfh/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace rfh::analytic {

struct DistanceFit {
    DistanceShape shape;
    numerics::FitResult fit; ///< coefficients are {c1, c2, c3, c4}
    std::vector<double> grid;
};

/// Normalized distances r = 0.025, 0.05, ..., 1.5.
inline std::vector<double> default_fit_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 60; ++i)
        grid.push_back(0.025 * i);
    return grid;
}

inline numerics::QuadOptions fit_quad_options(const NumericPolicy& policy) {
    auto opts = numerics::quad_options(policy);
    opts.rel_tol = std::min(policy.quad_rel_tol, 1.0e-10);
    return opts;
}

/// Reconstructed minus exact nearest-distance density on `grid`.
inline std::vector<double> fit_residuals(const DistanceShape& shape, std::span<const double> grid,
                                         const NumericPolicy& policy) {
    const auto opts = fit_quad_options(policy);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double r : grid)
        out.push_back(reconstructed_distance_pdf(r, shape, opts) - nearest_distance_pdf_normalized(r));
    return out;
}

inline double fit_sse(const DistanceShape& shape, std::span<const double> grid, const NumericPolicy& policy) {
    double sse = 0.0;
    for (double v : fit_residuals(shape, grid, policy))
        sse += v * v;
    return sse;
}

inline DistanceFit fit_conditional_distance_pdf(const NumericPolicy& policy,
                                                std::vector<double> grid = default_fit_grid()) {
    constexpr double pi = std::numbers::pi;
    auto shape_of = [](std::span<const double> c) { return DistanceShape{c[0], 1.0, c[1], c[2]}; };
    auto residual = [&](std::span<const double> c) { return fit_residuals(shape_of(c), grid, policy); };

    // Start from the Rayleigh form of the unconditioned density.
    const std::vector<double> initial = {2.0 * pi, pi, 2.0};
    const numerics::Box box{{0.1, 0.01, 0.5}, {100.0, 100.0, 10.0}};
    const auto raw = numerics::minimize_least_squares(residual, initial, box);

    DistanceFit out;
    out.shape = shape_of(raw.coefficients);
    out.fit = {{out.shape.c1, out.shape.c2, out.shape.c3, out.shape.c4}, raw.residual, raw.iterations};
    out.grid = std::move(grid);
    return out;
}

} // namespace rfh::analytic
