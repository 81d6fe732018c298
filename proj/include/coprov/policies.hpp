#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coprov/cluster_state.hpp"
#include "coprov/trace.hpp"

namespace coprov {

/// First-fit over a queue in arrival order: scans from the head and starts
/// every job that fits in the remaining idle nodes. Returns queue positions
/// of the started jobs, in start order.
std::vector<std::size_t> first_fit_schedule(std::span<const Nodes> queued_sizes, Nodes idle);

/// Starts every first-fit job at state.clock, moving it from the queue to the
/// running set. Returns the started job indices.
std::vector<std::size_t> start_first_fit(ClusterState& state, std::span<const Job> jobs);

struct KillRecord {
    std::int64_t job_id = 0;
    Seconds kill_time = 0;
    Nodes nodes_released = 0;

    friend bool operator==(const KillRecord&, const KillRecord&) = default;
};

/// Index into `running` of the next FB victim: smallest allocation, then
/// latest start, then highest job index.
std::size_t next_fb_victim(std::span<const RunningJob> running);

/// Forces the PBJ side to hand `needed` nodes back to the provision service.
/// Idle nodes go first; then running jobs are killed in victim order and
/// requeued at the head of the queue. Whatever the last kill frees beyond
/// `needed` stays idle.
std::vector<KillRecord> fb_force_release(ClusterState& state, std::span<const Job> jobs, Nodes needed,
                                         AdjustmentLog& log);

/// FB: the web service always gets its demand, reclaiming from the free set
/// first and from the PBJ side after that.
std::vector<KillRecord> fb_ws_demand(ClusterState& state, std::span<const Job> jobs, Nodes new_demand,
                                     AdjustmentLog& log);

/// FB: pushes all free nodes (up to the PBJ bound) to the PBJ side. Returns
/// the amount provisioned.
Nodes fb_lease_tick(ClusterState& state, AdjustmentLog& log);

struct ManageDecision {
    enum class Kind { none, request_dr1, request_dr2, release_rss } kind = Kind::none;
    Nodes amount = 0;

    friend bool operator==(const ManageDecision&, const ManageDecision&) = default;
};

/// The PBJ manager's periodic rule in FLB_NUB, computed without side effects.
///
/// R = (sum of queued sizes) / owned. R > U requests the queue shortfall;
/// otherwise a biggest job larger than the holdings requests what it misses
/// against the idle nodes; otherwise R < V releases floor(G * idle), never
/// below `floor`.
ManageDecision flb_manage_decision(std::span<const Nodes> queued_sizes, Nodes owned, Nodes idle, Nodes floor,
                                   const PolicyParams& params);

/// Applies flb_manage_decision to the state. Requests are always granted.
ManageDecision flb_manage_tick(ClusterState& state, std::span<const Job> jobs, const PolicyParams& params,
                               AdjustmentLog& log);

/// FLB_NUB: all idle pool capacity goes to the PBJ side. Returns the amount.
Nodes flb_lease_tick(ClusterState& state, AdjustmentLog& log);

/// FLB_NUB: the web service is granted its new demand immediately.
void flb_ws_demand(ClusterState& state, Nodes new_demand, AdjustmentLog& log);

/// FLB_NUB pool bookkeeping. Acquisitions use idle pool capacity first;
/// releases give back external capacity first.
void pool_acquire(ClusterState& state, Nodes& held, Nodes& in_pool, Nodes amount);
void pool_release(Nodes& held, Nodes& in_pool, Nodes amount);

struct LeaseTimes {
    Seconds start = 0;
    Seconds completion = 0;
    Seconds release = 0;  // end of the last lease unit the job touches

    Seconds held() const { return release - start; }
    friend bool operator==(const LeaseTimes&, const LeaseTimes&) = default;
};

/// EC2RS: a job runs at submission and its nodes are released at the end of
/// the lease unit in which it finishes.
LeaseTimes ec2_job_lifecycle(const Job& job, const PolicyParams& params);

/// DCS: static split of prc_pbj + prc_ws nodes.
ClusterState dcs_allocate(ClusterState state, Nodes prc_pbj, Nodes prc_ws);

/// Web-service instance adjustment on a window of utilization samples in
/// [0, 1]: +1 above 80% mean, -1 below 80% * (n-1)/n, else 0. Decrements
/// stop at `min_instances`.
int ws_instance_controller(std::span<const double> utilization, int instances, int min_instances = 1);

}  // namespace coprov
