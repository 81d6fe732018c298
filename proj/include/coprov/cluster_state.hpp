#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coprov/trace.hpp"

namespace coprov {

/// Provisioning regime of a simulated site.
enum class Regime {
    DCS,      // static split between the two workloads
    FB,       // fixed-bounds coordination on a private cloud
    FLB_NUB,  // fixed lower bound, no upper bound, on a public cloud
    EC2RS,    // per-job leases + autoscaled web service, no coordination
};

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view token);

/// Tunables of the coordinated policies.
struct PolicyParams {
    Nodes pool_size = 0;           // B: coordinated resources shared by both REs
    double request_ratio = 1.2;    // U
    double release_ratio = 0.2;    // V
    double elastic_factor = 0.5;   // G
    Seconds lease_unit = 3600;     // L

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Throws Error(validation) unless V < U, 0 < G < 1, L > 0 and B >= 0.
void validate(const PolicyParams& params);

/// Parses "B25/U1.2/V0.2/G0.5/L60" (L in minutes; '_' also separates).
/// Components may be omitted or reordered; missing ones keep their defaults.
/// "BR0.1" sets B to floor(0.1 * prc_sum) and needs prc_sum.
PolicyParams parse_policy_params(std::string_view notation, PolicyParams defaults = {},
                                 std::optional<Nodes> prc_sum = std::nullopt);
std::string format_policy_params(const PolicyParams& params);

enum class Actor { pbj_manager, ws_manager, provision_service };
std::string_view to_string(Actor actor);

struct Adjustment {
    Seconds time = 0;
    Actor actor = Actor::provision_service;
    Nodes delta = 0;  // signed; positive grows the holder named by the actor

    friend bool operator==(const Adjustment&, const Adjustment&) = default;
};

/// Every dynamic request, release or provisioning of nodes. Deltas are never
/// zero; callers go through record().
class AdjustmentLog {
public:
    void record(Seconds time, Actor actor, Nodes delta);

    std::size_t count() const noexcept { return entries_.size(); }
    const std::vector<Adjustment>& entries() const noexcept { return entries_; }

private:
    std::vector<Adjustment> entries_;
};

struct RunningJob {
    std::size_t job = 0;  // index into the job table
    Seconds start = 0;
    Nodes allocated = 0;
    std::uint32_t attempt = 0;
};

/// Resource accounting shared by all regimes.
///
/// The PBJ side always satisfies pbj_idle + sum(allocated) == pbj_owned. In
/// FLB_NUB, *_in_pool counts how much of each holding sits inside the
/// coordinated pool; the rest is external (charged) capacity.
struct ClusterState {
    Regime regime = Regime::DCS;
    std::optional<Nodes> config_size;  // bounded regimes only
    Nodes pool_size = 0;

    Nodes pbj_owned = 0;
    Nodes pbj_idle = 0;
    Nodes ws_held = 0;
    Nodes ws_demand = 0;

    Nodes pbj_cap = 0;    // FB: the PBJ RE's fixed bound
    Nodes pbj_floor = 0;  // FLB_NUB: release floor
    Nodes pbj_in_pool = 0;
    Nodes ws_in_pool = 0;

    std::vector<RunningJob> running;
    std::deque<std::size_t> queue;  // job indices, head first
    std::vector<std::uint32_t> attempts;  // starts per job
    Seconds clock = 0;

    /// FB: nodes held by the provision service.
    Nodes free_nodes() const;
    Nodes pool_idle() const { return pool_size - pbj_in_pool - ws_in_pool; }
    Nodes pbj_external() const { return pbj_owned - pbj_in_pool; }
    Nodes ws_external() const { return ws_held - ws_in_pool; }
    Nodes allocated_to_running() const;
};

}  // namespace coprov
