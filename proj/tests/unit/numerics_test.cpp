#include "rfh/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace num = rfh::numerics;

namespace {

TEST(LogGamma, HalfIntegerClosedForm) {
    const double gamma_45 = 3.5 * 2.5 * 1.5 * 0.5 * std::sqrt(std::numbers::pi);
    EXPECT_NEAR(num::log_gamma(4.5), std::log(gamma_45), 1e-14);
    EXPECT_NEAR(num::log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
}

TEST(LogGamma, Factorials) {
    double log_fact = 0.0;
    for (int n = 1; n <= 170; ++n) {
        EXPECT_NEAR(num::log_gamma(n), log_fact, 1e-12 * std::max(1.0, log_fact)) << "n=" << n;
        log_fact += std::log(static_cast<double>(n));
    }
}

TEST(LogGamma, RejectsNonPositive) {
    EXPECT_THROW(num::log_gamma(0.0), std::domain_error);
    EXPECT_THROW(num::log_gamma(-2.5), std::domain_error);
}

// P(Poisson(theta) <= m - 1) by a long-double brute sum.
long double brute_cdf(long m, long double theta) {
    long double term = std::exp(-theta);
    long double sum = term;
    for (long j = 1; j < m; ++j) {
        term *= theta / j;
        sum += term;
    }
    return sum;
}

TEST(PoissonCdfUpper, MatchesBruteSum) {
    EXPECT_NEAR(num::poisson_cdf_upper(50, 40.0), static_cast<double>(brute_cdf(50, 40.0L)), 1e-13);
    for (long m : {1L, 2L, 5L, 17L, 80L})
        for (double th : {0.01, 0.7, 3.0, 12.5, 60.0, 95.0})
            EXPECT_NEAR(num::poisson_cdf_upper(m, th), static_cast<double>(brute_cdf(m, th)), 1e-13)
                << "m=" << m << " theta=" << th;
}

TEST(PoissonCdfUpper, EdgeCases) {
    EXPECT_EQ(num::poisson_cdf_upper(3, 0.0), 1.0);
    EXPECT_EQ(num::poisson_cdf_upper(3, -2.0), 1.0);
    EXPECT_NEAR(num::poisson_cdf_upper(1, 2.0), std::exp(-2.0), 1e-15);
    EXPECT_THROW(num::poisson_cdf_upper(0, 1.0), std::domain_error);
    // Deep tails stay in [0, 1] without cancellation.
    EXPECT_GT(num::poisson_cdf_upper(400, 100.0), 1.0 - 1e-12);
    EXPECT_LT(num::poisson_cdf_upper(5, 500.0), 1e-150);
}

TEST(PoissonExpectation, MeanAndMass) {
    for (double mean : {0.0, 0.3, 4.5, 80.0, 2500.0}) {
        const auto s = num::poisson_expectation(mean, [](long n) { return static_cast<double>(n); }, 1e-13, 100000);
        EXPECT_NEAR(s.value, mean, 1e-9 * std::max(1.0, mean)) << mean;
        EXPECT_GT(s.mass, 1.0 - 1e-12);
    }
}

TEST(PoissonExpectation, HonoursCap) {
    const auto s = num::poisson_expectation(50.0, [](long) { return 1.0; }, 1e-15, 40);
    EXPECT_EQ(s.highest, 40);
    EXPECT_LT(s.mass, 0.1);
}

TEST(Quadrature, PolynomialAndOscillatory) {
    num::QuadOptions o;
    o.rel_tol = 1e-12;
    EXPECT_NEAR(num::integrate([](double x) { return x * x * x; }, 0.0, 2.0, o).value, 4.0, 1e-13);
    EXPECT_NEAR(num::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, o).value, 2.0, 1e-12);
    EXPECT_NEAR(num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, o).value, 2.0, 1e-9);
}

TEST(Quadrature, SemiInfinite) {
    num::QuadOptions o;
    o.rel_tol = 1e-12;
    EXPECT_NEAR(num::integrate_from([](double x) { return std::exp(-x); }, 0.0, o).value, 1.0, 1e-12);
    EXPECT_NEAR(num::integrate_from([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, o).value,
                std::numbers::pi / 2.0, 1e-11);
    // Gaussian with a wide scale.
    const double s = 300.0;
    EXPECT_NEAR(num::integrate_from([&](double x) { return std::exp(-x * x / (2 * s * s)); }, 0.0, o, s).value,
                s * std::sqrt(std::numbers::pi / 2.0), 1e-9 * s);
}

TEST(Quadrature, ErrorsAreReported) {
    num::QuadOptions o;
    o.max_subdivisions = 10;
    o.rel_tol = 1e-14;
    EXPECT_THROW(num::integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, o), num::QuadratureError);
    EXPECT_THROW(num::integrate([](double x) { return x > 0.5 ? NAN : 1.0; }, 0.0, 1.0, num::QuadOptions{}),
                 std::exception);
}

TEST(Minimize, RecoversExponentialDecay) {
    std::vector<double> xs, ys;
    for (int i = 0; i < 30; ++i) {
        xs.push_back(0.1 * i);
        ys.push_back(2.5 * std::exp(-1.3 * xs.back()));
    }
    auto residual = [&](std::span<const double> c) {
        std::vector<double> r;
        for (std::size_t i = 0; i < xs.size(); ++i)
            r.push_back(c[0] * std::exp(-c[1] * xs[i]) - ys[i]);
        return r;
    };
    const num::Box box{{0.1, 0.1}, {10.0, 10.0}};
    const auto fit = num::minimize_least_squares(residual, std::vector<double>{1.0, 0.5}, box);
    EXPECT_NEAR(fit.coefficients[0], 2.5, 1e-6);
    EXPECT_NEAR(fit.coefficients[1], 1.3, 1e-6);
    EXPECT_LT(fit.residual, 1e-12);
}

TEST(Minimize, StaysInsideBox) {
    auto residual = [](std::span<const double> c) { return std::vector<double>{c[0] - 5.0}; };
    const num::Box box{{-1.0}, {1.0}};
    const auto fit = num::minimize_least_squares(residual, std::vector<double>{0.0}, box);
    EXPECT_NEAR(fit.coefficients[0], 1.0, 1e-9);
}

TEST(Minimize, AllNonFiniteProbesThrow) {
    auto residual = [](std::span<const double>) { return std::vector<double>{NAN}; };
    const num::Box box{{-1.0}, {1.0}};
    EXPECT_THROW(num::minimize_least_squares(residual, std::vector<double>{0.0}, box), num::MinimizeError);
}

} // namespace
