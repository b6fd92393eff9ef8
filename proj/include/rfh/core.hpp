#pragma once

// Shared domain types for the RF-harvesting cellular model.
// Everything is stored in SI units: meters, m^-2, watts, joules, seconds.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace rfh {

/// Raised when a parameter set violates a model invariant. `field()` names
/// the offending parameter so callers (config loader, CLI) can report it.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace units {

inline constexpr double kSquareMetersPerSquareKm = 1.0e6;

constexpr double per_km2_to_per_m2(double per_km2) noexcept {
    return per_km2 / kSquareMetersPerSquareKm;
}

constexpr double per_m2_to_per_km2(double per_m2) noexcept {
    return per_m2 * kSquareMetersPerSquareKm;
}

} // namespace units

struct NetworkParams {
    double lambda_b = units::per_km2_to_per_m2(100.0); ///< BS density, m^-2
    double lambda_u = units::per_km2_to_per_m2(450.0); ///< user density, m^-2
    double p_s = 1.0;                                  ///< BS transmit power, W
    double alpha = 3.0;                                ///< path-loss exponent
    double a_eff = 0.5;                                ///< RF-to-DC conversion efficiency
    double e_th = 1.0e-5;                              ///< energy per data reception, J
    double sigma2 = 0.0;                               ///< noise power, W
    double slot_seconds = 1.0;                         ///< slot duration, s (fixed)

    /// Mean far-field harvest per slot is P_S * a * (2 pi lambda_b r^(2-alpha)/(alpha-2)).
    double harvest_scale() const noexcept { return a_eff * p_s; }
};

enum class ErlangIndexMode {
    /// Erlang shape k(n+1)-1: one fading term per harvesting slot.
    ShapeConsistent,
    /// Shape k, i.e. the CCDF sum printed with k terms.
    LiteralShape,
};

/// Shape of the fitted distance density in a unit-area cell:
/// c1 * r^c2 * exp(-c3 * r^c4).
struct DistanceShape {
    double c1 = 6.029;
    double c2 = 1.0;
    double c3 = 3.891;
    double c4 = 2.7;
};

enum class SaturationBasis {
    TotalThroughput, ///< saturation of T = lambda_b' * T_avg
    CellThroughput,  ///< saturation of T_avg alone (energy sustainability)
};

struct NumericPolicy {
    double quad_rel_tol = 1.0e-9;
    double quad_abs_tol = 1.0e-15; ///< absolute floor on the error target
    int quad_max_subdivisions = 4000;
    double series_tail_eps = 1.0e-10;
    long n_max_cap = 20000;
    long k_max_cap = 1000000;
    ErlangIndexMode erlang_index_mode = ErlangIndexMode::ShapeConsistent;
    DistanceShape distance_shape{};

    // sustainable-ratio search
    double saturation_eps = 0.01;
    double plateau_multiple = 50.0;
    double ratio_min = 0.05;
    double ratio_growth = 1.5;
    double ratio_rel_tol = 1.0e-6;
    SaturationBasis saturation_basis = SaturationBasis::TotalThroughput;
};

namespace detail {

inline bool finite(double v) noexcept { return std::isfinite(v); }

} // namespace detail

/// Returns `params` unchanged if every invariant holds, else throws
/// ValidationError naming the first violated field.
inline NetworkParams validate(const NetworkParams& params) {
    using detail::finite;
    if (!finite(params.lambda_b) || params.lambda_b <= 0.0)
        throw ValidationError("lambda_b", "lambda_b must be positive");
    if (!finite(params.lambda_u) || params.lambda_u < 0.0)
        throw ValidationError("lambda_u", "lambda_u must be non-negative");
    if (!finite(params.p_s) || params.p_s <= 0.0)
        throw ValidationError("p_s", "p_s must be positive");
    if (!finite(params.alpha) || params.alpha <= 2.0)
        throw ValidationError("alpha", "alpha must exceed 2");
    if (!finite(params.a_eff) || params.a_eff <= 0.0 || params.a_eff > 1.0)
        throw ValidationError("a_eff", "a_eff must lie in (0, 1]");
    if (!finite(params.e_th) || params.e_th <= 0.0)
        throw ValidationError("e_th", "e_th must be positive");
    if (!finite(params.sigma2) || params.sigma2 < 0.0)
        throw ValidationError("sigma2", "sigma2 must be non-negative");
    if (params.slot_seconds != 1.0)
        throw ValidationError("slot_seconds", "slot_seconds must equal 1.0");
    return params;
}

inline NumericPolicy validate(const NumericPolicy& policy) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(policy.quad_rel_tol))
        throw ValidationError("quad_rel_tol", "quad_rel_tol must be positive");
    if (!positive(policy.quad_abs_tol))
        throw ValidationError("quad_abs_tol", "quad_abs_tol must be positive");
    if (policy.quad_max_subdivisions < 1)
        throw ValidationError("quad_max_subdivisions", "quad_max_subdivisions must be at least 1");
    if (!positive(policy.series_tail_eps))
        throw ValidationError("series_tail_eps", "series_tail_eps must be positive");
    if (policy.n_max_cap < 1)
        throw ValidationError("n_max_cap", "n_max_cap must be at least 1");
    if (policy.k_max_cap < 1)
        throw ValidationError("k_max_cap", "k_max_cap must be at least 1");
    if (!positive(policy.saturation_eps) || policy.saturation_eps >= 1.0)
        throw ValidationError("saturation_eps", "saturation_eps must lie in (0, 1)");
    if (!positive(policy.plateau_multiple))
        throw ValidationError("plateau_multiple", "plateau_multiple must be positive");
    if (!positive(policy.ratio_min) || policy.ratio_min >= policy.plateau_multiple)
        throw ValidationError("ratio_min", "ratio_min must be positive and below plateau_multiple");
    if (!std::isfinite(policy.ratio_growth) || policy.ratio_growth <= 1.0)
        throw ValidationError("ratio_growth", "ratio_growth must exceed 1");
    if (!positive(policy.ratio_rel_tol))
        throw ValidationError("ratio_rel_tol", "ratio_rel_tol must be positive");
    const auto& s = policy.distance_shape;
    if (!positive(s.c1) || !positive(s.c3) || !positive(s.c4) || !std::isfinite(s.c2) || s.c2 <= -1.0)
        throw ValidationError("distance_shape", "distance_shape needs c1, c3, c4 > 0 and c2 > -1");
    return policy;
}

} // namespace rfh
