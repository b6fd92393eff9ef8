#include "rfh/core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>

namespace {

std::string failing_field(const rfh::NetworkParams& p) {
    try {
        rfh::validate(p);
    } catch (const rfh::ValidationError& e) {
        return e.field();
    }
    return "";
}

TEST(Units, DensityRoundTrip) {
    EXPECT_DOUBLE_EQ(rfh::units::per_km2_to_per_m2(100.0), 1.0e-4);
    EXPECT_DOUBLE_EQ(rfh::units::per_m2_to_per_km2(1.0e-4), 100.0);
}

TEST(NetworkParams, DefaultsAreValid) {
    EXPECT_NO_THROW(rfh::validate(rfh::NetworkParams{}));
    EXPECT_NO_THROW(rfh::validate(rfh::NumericPolicy{}));
}

TEST(NetworkParams, EachInvariantNamesItsField) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rfh::NetworkParams p;
    p.lambda_b = 0.0;
    EXPECT_EQ(failing_field(p), "lambda_b");
    p = {};
    p.lambda_u = -1e-6;
    EXPECT_EQ(failing_field(p), "lambda_u");
    p = {};
    p.p_s = nan;
    EXPECT_EQ(failing_field(p), "p_s");
    p = {};
    p.alpha = 2.0;
    EXPECT_EQ(failing_field(p), "alpha");
    p = {};
    p.a_eff = 1.5;
    EXPECT_EQ(failing_field(p), "a_eff");
    p = {};
    p.e_th = 0.0;
    EXPECT_EQ(failing_field(p), "e_th");
    p = {};
    p.sigma2 = -1.0;
    EXPECT_EQ(failing_field(p), "sigma2");
    p = {};
    p.slot_seconds = 2.0;
    EXPECT_EQ(failing_field(p), "slot_seconds");
}

TEST(NetworkParams, ZeroUserDensityIsAllowed) {
    rfh::NetworkParams p;
    p.lambda_u = 0.0;
    EXPECT_NO_THROW(rfh::validate(p));
}

TEST(NumericPolicy, RejectsBadSearchSettings) {
    rfh::NumericPolicy p;
    p.ratio_growth = 1.0;
    EXPECT_THROW(rfh::validate(p), rfh::ValidationError);
    p = {};
    p.saturation_eps = 1.0;
    EXPECT_THROW(rfh::validate(p), rfh::ValidationError);
    p = {};
    p.ratio_min = 60.0;
    EXPECT_THROW(rfh::validate(p), rfh::ValidationError);
    p = {};
    p.distance_shape.c3 = 0.0;
    EXPECT_THROW(rfh::validate(p), rfh::ValidationError);
}

} // namespace
