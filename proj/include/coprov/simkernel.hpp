#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <vector>

#include "coprov/cluster_state.hpp"
#include "coprov/event_log.hpp"
#include "coprov/metrics.hpp"
#include "coprov/trace.hpp"

namespace coprov {

/// Event kinds in same-instant priority order: freed nodes are visible to
/// the provisioning decisions made at that instant, and arrivals see the
/// result.
enum class EventKind : std::uint8_t {
    job_completion,
    lease_expiry,
    ws_demand_change,
    lease_tick,
    pbj_manage_tick,
    job_arrival,
};

std::string_view to_string(EventKind kind);

struct Event {
    Seconds time = 0;
    EventKind kind = EventKind::job_arrival;
    std::uint64_t seq = 0;
    std::size_t job = 0;         // job_arrival, job_completion, lease_expiry
    std::uint32_t attempt = 0;   // job_completion
    Nodes demand = 0;            // ws_demand_change
};

/// Strict total order: time, then kind, then insertion sequence.
bool event_before(const Event& a, const Event& b);

class EventQueue {
public:
    void push(Event e);
    Event pop();
    const Event& top() const { return heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const { return event_before(b, a); }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

/// Applies the primitive effect of an event at event.time, without any policy
/// reaction. Returns false for a completion whose job is no longer running
/// under that attempt (it was killed). Throws Error(kernel) on time
/// regression.
bool advance(ClusterState& state, const Event& event, std::span<const Job> jobs);

struct RunConfig {
    Regime regime = Regime::DCS;
    PolicyParams params;
    Nodes prc_pbj = 0;
    Nodes prc_ws = 0;
    std::optional<Nodes> config_size;         // FB; DCS always uses prc_pbj + prc_ws
    std::optional<Nodes> pbj_floor;           // FLB_NUB override of the proportional share
    std::optional<Nodes> fb_pbj_upper_bound;  // FB override of prc_pbj
    Seconds duration = 0;
    /// Called after every processed event, once reactions and scheduling
    /// have settled.
    std::function<void(const ClusterState&, const Event&)> observer;
};

struct JobOutcome {
    Seconds start = -1;  // last start; -1 if never started
    std::optional<Seconds> completion;
    std::uint32_t kills = 0;

    friend bool operator==(const JobOutcome&, const JobOutcome&) = default;
};

struct RunResult {
    MetricsReport report;
    AdjustmentLog adjustments;
    std::vector<EventRecord> events;
    std::vector<JobOutcome> outcomes;  // parallel to the job trace
    ConsumptionCurve curve;
    ClusterState final_state;
};

/// floor(B * prc_pbj / (prc_pbj + prc_ws)).
Nodes proportional_pbj_floor(Nodes pool_size, Nodes prc_pbj, Nodes prc_ws);

/// Runs one scenario over [0, config.duration]. Jobs must already be windowed
/// and scaled. Deterministic: equal inputs give equal event logs.
RunResult run(const JobTrace& jobs, const DemandTrace& ws, const RunConfig& config);

/// Checks the accounting invariants of a settled state; returns a description
/// of the first violation.
std::optional<std::string> check_conservation(const ClusterState& state);

}  // namespace coprov
