#pragma once

// Slot-level harvest-then-receive simulation over one field realization.

#include "rfh/core.hpp"
#include "rfh/mcsim/field.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace rfh::mcsim {

/// Empirical counterparts of the analytic figures. Every estimate except
/// the *_slot_hat variants averages over users, i.e. estimates the
/// typical-user quantity; the slot variants average over scheduled slots.
struct SimOutcome {
    double p_tr_hat = 0.0;
    double p_tr_slot_hat = 0.0;
    double t_avg_hat = 0.0;                  ///< bits/slot
    double t_avg_slot_hat = 0.0;             ///< bits/slot per non-empty cell
    double t_total_hat = 0.0;                ///< bits/slot/m^2
    double mean_users_per_nonempty_cell = 0.0;
    double mean_other_users_typical = 0.0;   ///< E[N] seen by a random user

    double p_tr_stderr = 0.0;
    double p_tr_slot_stderr = 0.0;
    double t_avg_stderr = 0.0;
    double t_avg_slot_stderr = 0.0;
    double t_total_stderr = 0.0;
    double mean_users_stderr = 0.0;
    double mean_other_users_stderr = 0.0;

    long measured_users = 0;     ///< users with at least one post-warm-up schedule
    long scheduled_slots = 0;    ///< post-warm-up scheduled (user, slot) events
    int replications = 0;
    int field_resamples = 0;
};

/// Per-user state after a slot, for observers.
struct UserState {
    double stored = 0.0;
    double harvested_now = 0.0;
    long scheduled_total = 0;
    long received_total = 0;
    bool scheduled_now = false;
    bool received_now = false;
};

using SlotObserver = std::function<void(long slot, const std::vector<UserState>& users)>;

namespace detail {

// Unit-mean exponential from 53 random bits.
template <class Rng>
double unit_exponential(Rng& rng) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return -std::log1p(-u);
}

} // namespace detail

/// Runs n_slots of round-robin downlink with harvest-then-receive users.
/// Users outside the measurement window do not affect anyone else, so only
/// measured users are simulated (all users when an observer is attached).
template <class Rng>
SimOutcome run_replication(const FieldRealization& field, const NetworkParams& params, const SimConfig& config,
                           Rng& rng, const SlotObserver& observer = {}) {
    const Region region(config);
    const std::size_t nb = field.bs_points.size();
    const std::size_t nu = field.user_points.size();

    std::vector<std::size_t> transmitters;
    for (std::size_t b = 0; b < nb; ++b)
        if (config.force_all_bs_transmit || !field.rosters[b].empty())
            transmitters.push_back(b);

    std::vector<std::size_t> simulated;
    for (std::size_t u = 0; u < nu; ++u)
        if (observer || region.measured(field.user_points[u]))
            simulated.push_back(u);

    // Path gains r^-alpha from each transmitter, per simulated user.
    const std::size_t nt = transmitters.size();
    std::vector<double> gain(simulated.size() * nt);
    std::vector<std::size_t> own_slot(simulated.size(), nt); // position of the serving BS in `transmitters`
    for (std::size_t i = 0; i < simulated.size(); ++i) {
        const auto& up = field.user_points[simulated[i]];
        for (std::size_t j = 0; j < nt; ++j) {
            const double d = std::max(region.distance(up, field.bs_points[transmitters[j]]), 1.0e-9);
            gain[i * nt + j] = std::pow(d, -params.alpha);
            if (transmitters[j] == field.association[simulated[i]])
                own_slot[i] = j;
        }
    }

    // Position of each user in its roster.
    std::vector<std::size_t> roster_pos(nu, 0);
    for (const auto& roster : field.rosters)
        for (std::size_t p = 0; p < roster.size(); ++p)
            roster_pos[roster[p]] = p;

    struct Tally {
        long scheduled = 0;
        long received = 0;
        double bits = 0.0;
    };
    std::vector<Tally> tally(simulated.size());
    std::vector<UserState> state(observer ? nu : 0);
    std::vector<double> stored(simulated.size(), 0.0);
    std::vector<double> fading(nt);

    for (long slot = 0; slot < config.n_slots; ++slot) {
        for (std::size_t i = 0; i < simulated.size(); ++i) {
            const std::size_t u = simulated[i];
            const auto& roster = field.rosters[field.association[u]];
            const auto size = static_cast<long>(roster.size());
            const bool scheduled = static_cast<std::size_t>(slot % size) == roster_pos[u];
            const bool counted = slot >= static_cast<long>(config.warmup_rounds) * size;

            double received_power = 0.0;
            const double* g = &gain[i * nt];
            for (std::size_t j = 0; j < nt; ++j) {
                fading[j] = detail::unit_exponential(rng);
                received_power += fading[j] * g[j];
            }
            received_power *= params.p_s;

            bool received = false;
            double harvested = 0.0;
            if (scheduled && stored[i] >= params.e_th) {
                received = true;
                const double signal = own_slot[i] < nt ? params.p_s * fading[own_slot[i]] * g[own_slot[i]] : 0.0;
                const double interference = received_power - signal;
                const double sinr = signal / (params.sigma2 + std::max(interference, 0.0));
                if (counted)
                    tally[i].bits += std::log2(1.0 + sinr);
                stored[i] = 0.0;
            } else {
                harvested = params.a_eff * received_power * params.slot_seconds;
                stored[i] += harvested;
            }
            if (scheduled && counted) {
                ++tally[i].scheduled;
                if (received)
                    ++tally[i].received;
            }
            if (observer) {
                auto& s = state[u];
                s.stored = stored[i];
                s.harvested_now = harvested;
                s.scheduled_now = scheduled;
                s.received_now = received;
                s.scheduled_total += scheduled ? 1 : 0;
                s.received_total += received ? 1 : 0;
            }
        }
        if (observer)
            observer(slot, state);
    }

    SimOutcome out;
    out.replications = 1;
    out.field_resamples = field.resamples;
    double p_sum = 0.0;
    double t_sum = 0.0;
    double bits_per_slot = 0.0;
    long received_events = 0;
    double bits_total = 0.0;
    double others_sum = 0.0;
    long users_in_window = 0;
    for (std::size_t i = 0; i < simulated.size(); ++i) {
        const std::size_t u = simulated[i];
        if (!region.measured(field.user_points[u]))
            continue;
        ++users_in_window;
        others_sum += static_cast<double>(field.rosters[field.association[u]].size() - 1);
        if (tally[i].scheduled == 0)
            continue;
        const auto& roster = field.rosters[field.association[u]];
        const long size = static_cast<long>(roster.size());
        const long window = config.n_slots - static_cast<long>(config.warmup_rounds) * size;
        ++out.measured_users;
        out.scheduled_slots += tally[i].scheduled;
        received_events += tally[i].received;
        bits_total += tally[i].bits;
        p_sum += static_cast<double>(tally[i].received) / static_cast<double>(tally[i].scheduled);
        t_sum += tally[i].bits / static_cast<double>(tally[i].scheduled);
        bits_per_slot += tally[i].bits / static_cast<double>(window);
    }
    if (out.measured_users > 0) {
        const auto users = static_cast<double>(out.measured_users);
        out.p_tr_hat = p_sum / users;
        out.t_avg_hat = t_sum / users;
        out.p_tr_slot_hat = static_cast<double>(received_events) / static_cast<double>(out.scheduled_slots);
        out.t_avg_slot_hat = bits_total / static_cast<double>(out.scheduled_slots);
    }
    if (users_in_window > 0)
        out.mean_other_users_typical = others_sum / static_cast<double>(users_in_window);
    out.t_total_hat = bits_per_slot / region.measured_area();

    long nonempty = 0;
    long users_in_cells = 0;
    for (std::size_t b = 0; b < nb; ++b) {
        if (field.rosters[b].empty() || !region.measured(field.bs_points[b]))
            continue;
        ++nonempty;
        users_in_cells += static_cast<long>(field.rosters[b].size());
    }
    if (nonempty > 0)
        out.mean_users_per_nonempty_cell = static_cast<double>(users_in_cells) / static_cast<double>(nonempty);
    return out;
}

} // namespace rfh::mcsim
