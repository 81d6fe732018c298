#include "coprov/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coprov/error.hpp"

namespace coprov {

std::vector<std::size_t> first_fit_schedule(std::span<const Nodes> queued_sizes, Nodes idle) {
    // Idle capacity only shrinks while scanning, so a job skipped once can never
    // fit later in the same round; one pass equals rescanning from the head.
    std::vector<std::size_t> started;
    for (std::size_t i = 0; i < queued_sizes.size() && idle > 0; ++i) {
        if (queued_sizes[i] <= idle) {
            started.push_back(i);
            idle -= queued_sizes[i];
        }
    }
    return started;
}

std::vector<std::size_t> start_first_fit(ClusterState& state, std::span<const Job> jobs) {
    std::vector<Nodes> sizes;
    sizes.reserve(state.queue.size());
    for (auto idx : state.queue) sizes.push_back(jobs[idx].size);
    const auto positions = first_fit_schedule(sizes, state.pbj_idle);

    std::vector<std::size_t> started;
    started.reserve(positions.size());
    for (auto pos : positions) {
        const auto idx = state.queue[pos];
        const Nodes size = jobs[idx].size;
        state.pbj_idle -= size;
        state.running.push_back({idx, state.clock, size, state.attempts[idx]++});
        started.push_back(idx);
    }
    for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
        state.queue.erase(state.queue.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    return started;
}

std::size_t next_fb_victim(std::span<const RunningJob> running) {
    if (running.empty()) throw Error(ErrorCategory::invariant, "no running job left to kill");
    std::size_t best = 0;
    for (std::size_t i = 1; i < running.size(); ++i) {
        const auto& a = running[i];
        const auto& b = running[best];
        if (a.allocated != b.allocated) {
            if (a.allocated < b.allocated) best = i;
        } else if (a.start != b.start) {
            if (a.start > b.start) best = i;
        } else if (a.job > b.job) {
            best = i;
        }
    }
    return best;
}

std::vector<KillRecord> fb_force_release(ClusterState& state, std::span<const Job> jobs, Nodes needed,
                                         AdjustmentLog& log) {
    if (needed <= 0) return {};
    if (needed > state.pbj_owned) {
        throw Error(ErrorCategory::invariant, "forced release of " + std::to_string(needed) +
                                                  " exceeds PBJ holdings " + std::to_string(state.pbj_owned));
    }
    std::vector<KillRecord> kills;
    std::vector<std::size_t> requeue;
    while (state.pbj_idle < needed) {
        const auto victim = next_fb_victim(state.running);
        const RunningJob r = state.running[victim];
        state.running.erase(state.running.begin() + static_cast<std::ptrdiff_t>(victim));
        state.pbj_idle += r.allocated;
        kills.push_back({jobs[r.job].id, state.clock, r.allocated});
        requeue.push_back(r.job);
    }
    state.pbj_idle -= needed;
    state.pbj_owned -= needed;

    // Job indices follow arrival order.
    std::sort(requeue.begin(), requeue.end());
    state.queue.insert(state.queue.begin(), requeue.begin(), requeue.end());

    log.record(state.clock, Actor::pbj_manager, -needed);
    return kills;
}

std::vector<KillRecord> fb_ws_demand(ClusterState& state, std::span<const Job> jobs, Nodes new_demand,
                                     AdjustmentLog& log) {
    if (!state.config_size || new_demand > *state.config_size) {
        throw Error(ErrorCategory::infeasible, "web-service demand " + std::to_string(new_demand) +
                                                   " exceeds the configuration size");
    }
    std::vector<KillRecord> kills;
    if (new_demand == state.ws_held) return kills;
    if (new_demand < state.ws_held) {
        log.record(state.clock, Actor::ws_manager, new_demand - state.ws_held);
        state.ws_held = new_demand;
        return kills;
    }
    const Nodes want = new_demand - state.ws_held;
    const Nodes shortfall = want - std::min(want, state.free_nodes());
    if (shortfall > 0) kills = fb_force_release(state, jobs, shortfall, log);
    state.ws_held = new_demand;
    log.record(state.clock, Actor::ws_manager, want);
    return kills;
}

Nodes fb_lease_tick(ClusterState& state, AdjustmentLog& log) {
    const Nodes amount = std::min(state.free_nodes(), state.pbj_cap - state.pbj_owned);
    if (amount <= 0) return 0;
    state.pbj_owned += amount;
    state.pbj_idle += amount;
    log.record(state.clock, Actor::provision_service, amount);
    return amount;
}

ManageDecision flb_manage_decision(std::span<const Nodes> queued_sizes, Nodes owned, Nodes idle, Nodes floor,
                                   const PolicyParams& params) {
    using Kind = ManageDecision::Kind;
    const Nodes total = std::accumulate(queued_sizes.begin(), queued_sizes.end(), Nodes{0});
    const Nodes biggest = queued_sizes.empty() ? 0 : *std::max_element(queued_sizes.begin(), queued_sizes.end());

    double ratio = 0.0;
    if (!queued_sizes.empty()) {
        ratio = owned > 0 ? static_cast<double>(total) / static_cast<double>(owned)
                          : std::numeric_limits<double>::infinity();
    }

    if (ratio > params.request_ratio) {
        const Nodes dr1 = total - owned;
        return dr1 > 0 ? ManageDecision{Kind::request_dr1, dr1} : ManageDecision{};
    }
    if (biggest > owned) return {Kind::request_dr2, biggest - idle};
    if (ratio < params.release_ratio) {
        // The epsilon keeps products like 0.29 * 100 from flooring to 28.
        const auto rss = static_cast<Nodes>(std::floor(params.elastic_factor * static_cast<double>(idle) + 1e-9));
        const Nodes amount = std::min(rss, owned - floor);
        if (amount > 0) return {Kind::release_rss, amount};
    }
    return {};
}

void pool_acquire(ClusterState& state, Nodes& held, Nodes& in_pool, Nodes amount) {
    const Nodes from_pool = std::clamp<Nodes>(state.pool_idle(), 0, amount);
    in_pool += from_pool;
    held += amount;
}

void pool_release(Nodes& held, Nodes& in_pool, Nodes amount) {
    const Nodes external = held - in_pool;
    const Nodes from_pool = amount - std::min(amount, external);
    in_pool -= from_pool;
    held -= amount;
}

ManageDecision flb_manage_tick(ClusterState& state, std::span<const Job> jobs, const PolicyParams& params,
                               AdjustmentLog& log) {
    std::vector<Nodes> sizes;
    sizes.reserve(state.queue.size());
    for (auto idx : state.queue) sizes.push_back(jobs[idx].size);
    const auto decision = flb_manage_decision(sizes, state.pbj_owned, state.pbj_idle, state.pbj_floor, params);
    switch (decision.kind) {
        case ManageDecision::Kind::none:
            break;
        case ManageDecision::Kind::request_dr1:
        case ManageDecision::Kind::request_dr2:
            pool_acquire(state, state.pbj_owned, state.pbj_in_pool, decision.amount);
            state.pbj_idle += decision.amount;
            log.record(state.clock, Actor::pbj_manager, decision.amount);
            break;
        case ManageDecision::Kind::release_rss:
            pool_release(state.pbj_owned, state.pbj_in_pool, decision.amount);
            state.pbj_idle -= decision.amount;
            log.record(state.clock, Actor::pbj_manager, -decision.amount);
            break;
    }
    return decision;
}

Nodes flb_lease_tick(ClusterState& state, AdjustmentLog& log) {
    const Nodes amount = state.pool_idle();
    if (amount <= 0) return 0;
    state.pbj_owned += amount;
    state.pbj_idle += amount;
    state.pbj_in_pool += amount;
    log.record(state.clock, Actor::provision_service, amount);
    return amount;
}

void flb_ws_demand(ClusterState& state, Nodes new_demand, AdjustmentLog& log) {
    const Nodes delta = new_demand - state.ws_held;
    if (delta == 0) return;
    if (delta > 0) {
        pool_acquire(state, state.ws_held, state.ws_in_pool, delta);
    } else {
        pool_release(state.ws_held, state.ws_in_pool, -delta);
    }
    log.record(state.clock, Actor::ws_manager, delta);
}

LeaseTimes ec2_job_lifecycle(const Job& job, const PolicyParams& params) {
    const Seconds units = (job.runtime + params.lease_unit - 1) / params.lease_unit;
    return {job.submit_time, job.submit_time + job.runtime, job.submit_time + units * params.lease_unit};
}

ClusterState dcs_allocate(ClusterState state, Nodes prc_pbj, Nodes prc_ws) {
    state.regime = Regime::DCS;
    state.config_size = prc_pbj + prc_ws;
    state.pbj_owned = prc_pbj;
    state.pbj_idle = prc_pbj - state.allocated_to_running();
    state.ws_held = prc_ws;
    return state;
}

int ws_instance_controller(std::span<const double> utilization, int instances, int min_instances) {
    if (utilization.empty() || instances < 1) return 0;
    const double mean =
        std::accumulate(utilization.begin(), utilization.end(), 0.0) / static_cast<double>(utilization.size());
    constexpr double kTarget = 0.80;
    if (mean > kTarget) return +1;
    const double lower = kTarget * static_cast<double>(instances - 1) / static_cast<double>(instances);
    if (mean < lower && instances >= 2 && instances > min_instances) return -1;
    return 0;
}

}  // namespace coprov
