#include "rfh/analytic/fit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace an = rfh::analytic;

namespace {

TEST(DistanceShape, UnitCellDensityIntegratesNearOne) {
    const rfh::NumericPolicy pol;
    const double mass = rfh::numerics::integrate_semi_infinite(
                            [](double r) { return an::conditional_distance_pdf(r); }, pol)
                            .value;
    EXPECT_NEAR(mass, 1.0, 0.02);
}

TEST(DistanceShape, CellScaling) {
    // A cell of area xi stretches distances by sqrt(xi).
    EXPECT_NEAR(an::conditional_distance_pdf_in_cell(0.6, 4.0), an::conditional_distance_pdf(0.3) / 2.0, 1e-15);
}

TEST(Fit, ReferenceShapeReconstructsNearestDistance) {
    const rfh::NumericPolicy pol;
    const double sse = an::fit_sse(rfh::DistanceShape{}, an::default_fit_grid(), pol);
    EXPECT_LT(sse, 0.05);
}

TEST(Fit, ImprovesOnStartAndStaysNearReference) {
    const rfh::NumericPolicy pol;
    const auto fit = an::fit_conditional_distance_pdf(pol);
    EXPECT_EQ(fit.shape.c2, 1.0);
    EXPECT_LE(fit.fit.residual, an::fit_sse(rfh::DistanceShape{}, fit.grid, pol));
    EXPECT_NEAR(fit.shape.c1, 6.029, 0.1 * 6.029);
    EXPECT_NEAR(fit.shape.c3, 3.891, 0.1 * 3.891);
    EXPECT_NEAR(fit.shape.c4, 2.7, 0.1 * 2.7);
    const auto res = an::fit_residuals(fit.shape, fit.grid, pol);
    double worst = 0.0;
    for (double v : res)
        worst = std::max(worst, std::abs(v));
    EXPECT_LT(worst, 0.05 * an::nearest_distance_pdf_normalized(1.0 / std::sqrt(2.0 * M_PI)));
}

} // namespace
