#pragma once

// PPP field sampling and nearest-BS association on a square region, either
// wrapped into a torus or bounded with a guard band.

#include "rfh/core.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfh::mcsim {

enum class EdgeMode { Torus, GuardRing };

struct SimConfig {
    double region_side = 1000.0; ///< m
    long n_slots = 800;          ///< slots per replication, warm-up included
    int n_replications = 8;
    std::uint64_t seed = 1;
    EdgeMode edge_mode = EdgeMode::Torus;
    double guard_width = 0.0;    ///< m; GuardRing only, stats use the inner square
    bool force_all_bs_transmit = true;
    int warmup_rounds = 5;
    int threads = 0;             ///< 0 = hardware concurrency (capped by RFH_THREADS)
};

inline SimConfig validate(const SimConfig& config) {
    if (!std::isfinite(config.region_side) || config.region_side <= 0.0)
        throw ValidationError("region_side", "region_side must be positive");
    if (config.n_slots < 1)
        throw ValidationError("n_slots", "n_slots must be at least 1");
    if (config.n_replications < 1)
        throw ValidationError("n_replications", "n_replications must be at least 1");
    if (config.warmup_rounds < 0)
        throw ValidationError("warmup_rounds", "warmup_rounds must be non-negative");
    if (config.threads < 0)
        throw ValidationError("threads", "threads must be non-negative");
    if (!std::isfinite(config.guard_width) || config.guard_width < 0.0 ||
        config.guard_width >= 0.5 * config.region_side)
        throw ValidationError("guard_width", "guard_width must lie in [0, region_side/2)");
    return config;
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Region geometry: distance metric and the measurement window.
class Region {
public:
    explicit Region(const SimConfig& config)
        : side_(config.region_side), mode_(config.edge_mode),
          guard_(config.edge_mode == EdgeMode::GuardRing ? config.guard_width : 0.0) {}

    double distance(const Point& a, const Point& b) const {
        double dx = std::abs(a.x - b.x);
        double dy = std::abs(a.y - b.y);
        if (mode_ == EdgeMode::Torus) {
            dx = std::min(dx, side_ - dx);
            dy = std::min(dy, side_ - dy);
        }
        return std::hypot(dx, dy);
    }

    bool measured(const Point& p) const {
        return p.x >= guard_ && p.x <= side_ - guard_ && p.y >= guard_ && p.y <= side_ - guard_;
    }

    double side() const { return side_; }
    double area() const { return side_ * side_; }
    double measured_area() const { return (side_ - 2.0 * guard_) * (side_ - 2.0 * guard_); }

private:
    double side_;
    EdgeMode mode_;
    double guard_;
};

struct FieldRealization {
    std::vector<Point> bs_points;
    std::vector<Point> user_points;
    std::vector<std::size_t> association;          ///< user -> BS index
    std::vector<std::vector<std::size_t>> rosters; ///< BS -> users in index order
    int resamples = 0;                             ///< empty-BS draws discarded
};

/// Associates every user with its metric-nearest BS (lowest index on ties)
/// and builds the per-cell rosters.
inline FieldRealization make_field(std::vector<Point> bs_points, std::vector<Point> user_points,
                                   const SimConfig& config) {
    if (bs_points.empty())
        throw std::invalid_argument("make_field: at least one BS is required");
    const Region region(config);
    FieldRealization field;
    field.bs_points = std::move(bs_points);
    field.user_points = std::move(user_points);
    field.association.resize(field.user_points.size());
    field.rosters.assign(field.bs_points.size(), {});
    for (std::size_t u = 0; u < field.user_points.size(); ++u) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < field.bs_points.size(); ++b) {
            const double d = region.distance(field.user_points[u], field.bs_points[b]);
            if (d < best_d) {
                best_d = d;
                best = b;
            }
        }
        field.association[u] = best;
        field.rosters[best].push_back(u);
    }
    return field;
}

/// Samples independent PPPs of BSs and users over the region. A draw with
/// no BS leaves association undefined and is redrawn.
template <class Rng>
FieldRealization sample_field(const NetworkParams& params, const SimConfig& config, Rng& rng) {
    const double area = config.region_side * config.region_side;
    std::poisson_distribution<long> bs_count(params.lambda_b * area);
    std::poisson_distribution<long> user_count(params.lambda_u * area);
    std::uniform_real_distribution<double> coord(0.0, config.region_side);
    auto draw_points = [&](long n) {
        std::vector<Point> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) {
            p.x = coord(rng);
            p.y = coord(rng);
        }
        return pts;
    };
    int resamples = 0;
    long nb = bs_count(rng);
    while (nb == 0) {
        ++resamples;
        if (resamples > 1000)
            throw std::runtime_error("sample_field: BS density too low to place any BS");
        nb = bs_count(rng);
    }
    auto bs = draw_points(nb);
    const long nu = params.lambda_u > 0.0 ? user_count(rng) : 0;
    auto users = draw_points(nu);
    auto field = make_field(std::move(bs), std::move(users), config);
    field.resamples = resamples;
    return field;
}

} // namespace rfh::mcsim
