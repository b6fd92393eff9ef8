#pragma once

// Replicated simulation with order-independent aggregation.

#include "rfh/core.hpp"
#include "rfh/mcsim/field.hpp"
#include "rfh/mcsim/replication.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace rfh::mcsim {

using Engine = std::mt19937_64;

/// Private stream for replication `index`, independent of scheduling.
inline Engine replication_engine(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x52464831u};
    return Engine(seq);
}

/// Worker count: requested (or hardware when 0), capped by RFH_THREADS and
/// by the number of tasks.
inline int resolve_threads(int requested, int tasks) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RFH_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0)
            n = std::min(n, cap);
    }
    return std::clamp(n, 1, std::max(tasks, 1));
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    const int workers = resolve_threads(threads, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

namespace detail {

inline void mean_and_stderr(const std::vector<double>& xs, double& mean, double& stderr_out) {
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    mean = sum / n;
    if (xs.size() < 2) {
        stderr_out = 0.0;
        return;
    }
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    stderr_out = std::sqrt(ss / (n - 1.0) / n);
}

} // namespace detail

/// Averages per-replication outcomes (in index order) and attaches standard
/// errors of the replication means.
inline SimOutcome aggregate(const std::vector<SimOutcome>& reps) {
    if (reps.empty())
        throw std::invalid_argument("aggregate: no replications");
    SimOutcome out;
    auto column = [&](double SimOutcome::*field, double SimOutcome::*err) {
        std::vector<double> xs;
        xs.reserve(reps.size());
        for (const auto& r : reps)
            xs.push_back(r.*field);
        detail::mean_and_stderr(xs, out.*field, out.*err);
    };
    column(&SimOutcome::p_tr_hat, &SimOutcome::p_tr_stderr);
    column(&SimOutcome::p_tr_slot_hat, &SimOutcome::p_tr_slot_stderr);
    column(&SimOutcome::t_avg_hat, &SimOutcome::t_avg_stderr);
    column(&SimOutcome::t_avg_slot_hat, &SimOutcome::t_avg_slot_stderr);
    column(&SimOutcome::t_total_hat, &SimOutcome::t_total_stderr);
    column(&SimOutcome::mean_users_per_nonempty_cell, &SimOutcome::mean_users_stderr);
    column(&SimOutcome::mean_other_users_typical, &SimOutcome::mean_other_users_stderr);
    for (const auto& r : reps) {
        out.measured_users += r.measured_users;
        out.scheduled_slots += r.scheduled_slots;
        out.replications += r.replications;
        out.field_resamples += r.field_resamples;
    }
    return out;
}

/// Runs every replication and returns the individual outcomes in index order.
inline std::vector<SimOutcome> run_replications(const NetworkParams& params, const SimConfig& config) {
    const NetworkParams p = validate(params);
    const SimConfig c = validate(config);
    std::vector<SimOutcome> reps(static_cast<std::size_t>(c.n_replications));
    parallel_for(c.n_replications, c.threads, [&](int i) {
        Engine rng = replication_engine(c.seed, i);
        const auto field = sample_field(p, c, rng);
        reps[static_cast<std::size_t>(i)] = run_replication(field, p, c, rng);
    });
    return reps;
}

inline SimOutcome estimate(const NetworkParams& params, const SimConfig& config) {
    return aggregate(run_replications(params, config));
}

} // namespace rfh::mcsim
