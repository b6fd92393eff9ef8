#pragma once

// Box-constrained Nelder-Mead on the sum of squared residuals, restarted
// from the incumbent until a restart no longer improves it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfh::numerics {

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t size() const noexcept { return lower.size(); }

    double clamp(std::size_t i, double v) const { return std::clamp(v, lower[i], upper[i]); }
};

struct FitResult {
    std::vector<double> coefficients;
    double residual = 0.0; ///< sum of squared residuals at `coefficients`
    int iterations = 0;
};

struct MinimizeOptions {
    int max_iterations = 20000; ///< across all restarts
    int max_restarts = 8;
    double f_tol = 1.0e-13;     ///< relative spread of simplex values
    double x_tol = 1.0e-10;     ///< relative simplex diameter
    double initial_step = 0.1;  ///< relative to |x_i| (or box width for x_i = 0)
};

class MinimizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class Residual>
double sum_of_squares(Residual& residual, std::span<const double> x) {
    const auto r = residual(x);
    double sse = 0.0;
    for (double v : r)
        sse += v * v;
    return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

struct Vertex {
    std::vector<double> x;
    double f;
};

} // namespace detail

template <class Residual>
FitResult minimize_least_squares(Residual&& residual, std::vector<double> initial, const Box& box,
                                 const MinimizeOptions& opts = {}) {
    const std::size_t dim = initial.size();
    if (dim == 0 || box.lower.size() != dim || box.upper.size() != dim)
        throw std::invalid_argument("minimize_least_squares: dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(box.lower[i] <= box.upper[i]))
            throw std::invalid_argument("minimize_least_squares: empty box in coordinate " +
                                        std::to_string(i));
        initial[i] = box.clamp(i, initial[i]);
    }

    auto eval = [&](const std::vector<double>& x) { return detail::sum_of_squares(residual, x); };
    auto project = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < dim; ++i)
            x[i] = box.clamp(i, x[i]);
    };

    const double f_initial = eval(initial);
    detail::Vertex best{initial, f_initial};
    int iterations = 0;
    bool any_finite = std::isfinite(f_initial);

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        std::vector<detail::Vertex> simplex;
        simplex.reserve(dim + 1);
        simplex.push_back(best);
        for (std::size_t i = 0; i < dim; ++i) {
            auto x = best.x;
            const double width = box.upper[i] - box.lower[i];
            double step = opts.initial_step * (x[i] != 0.0 ? std::abs(x[i]) : std::min(1.0, width));
            if (x[i] + step > box.upper[i])
                step = -step;
            x[i] = box.clamp(i, x[i] + step);
            const double f = eval(x);
            any_finite = any_finite || std::isfinite(f);
            simplex.push_back({std::move(x), f});
        }
        if (!any_finite)
            throw MinimizeError("residual is non-finite at every probe of the initial simplex");

        const double f_before = best.f;
        while (iterations < opts.max_iterations) {
            std::stable_sort(simplex.begin(), simplex.end(),
                             [](const auto& a, const auto& b) { return a.f < b.f; });
            const auto& lo = simplex.front();
            const auto& hi = simplex.back();

            double diameter = 0.0;
            double scale = 0.0;
            for (std::size_t v = 1; v <= dim; ++v)
                for (std::size_t i = 0; i < dim; ++i) {
                    diameter = std::max(diameter, std::abs(simplex[v].x[i] - lo.x[i]));
                    scale = std::max(scale, std::abs(lo.x[i]));
                }
            const bool f_flat = std::isfinite(hi.f) &&
                                hi.f - lo.f <= opts.f_tol * (std::abs(lo.f) + 1.0e-300);
            if (f_flat || diameter <= opts.x_tol * (1.0 + scale))
                break;
            ++iterations;

            std::vector<double> centroid(dim, 0.0);
            for (std::size_t v = 0; v < dim; ++v)
                for (std::size_t i = 0; i < dim; ++i)
                    centroid[i] += simplex[v].x[i] / static_cast<double>(dim);

            auto along = [&](double coef) {
                std::vector<double> x(dim);
                for (std::size_t i = 0; i < dim; ++i)
                    x[i] = centroid[i] + coef * (simplex.back().x[i] - centroid[i]);
                project(x);
                return x;
            };

            auto xr = along(-1.0);
            const double fr = eval(xr);
            if (fr < simplex.front().f) {
                auto xe = along(-2.0);
                const double fe = eval(xe);
                if (fe < fr)
                    simplex.back() = {std::move(xe), fe};
                else
                    simplex.back() = {std::move(xr), fr};
                continue;
            }
            if (fr < simplex[dim - 1].f) {
                simplex.back() = {std::move(xr), fr};
                continue;
            }
            const bool outside = fr < simplex.back().f;
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, simplex.back().f)) {
                simplex.back() = {std::move(xc), fc};
                continue;
            }
            // shrink toward the best vertex
            for (std::size_t v = 1; v <= dim; ++v) {
                for (std::size_t i = 0; i < dim; ++i)
                    simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                simplex[v].f = eval(simplex[v].x);
            }
        }
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const auto& a, const auto& b) { return a.f < b.f; });
        if (simplex.front().f < best.f)
            best = simplex.front();
        const bool improved = best.f < f_before - opts.f_tol * (std::abs(f_before) + 1.0e-300);
        if ((restart > 0 && !improved) || iterations >= opts.max_iterations)
            break;
    }

    if (!std::isfinite(best.f))
        throw MinimizeError("no finite residual found");
    return {best.x, best.f, iterations};
}

} // namespace rfh::numerics
