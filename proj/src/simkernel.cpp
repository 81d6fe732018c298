#include "coprov/simkernel.hpp"

#include <algorithm>
#include <unordered_map>

#include "coprov/error.hpp"
#include "coprov/policies.hpp"

namespace coprov {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::job_completion: return "job_completion";
        case EventKind::lease_expiry: return "lease_expiry";
        case EventKind::ws_demand_change: return "ws_demand_change";
        case EventKind::lease_tick: return "lease_tick";
        case EventKind::pbj_manage_tick: return "pbj_manage_tick";
        case EventKind::job_arrival: return "job_arrival";
    }
    return "?";
}

bool event_before(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.seq < b.seq;
}

void EventQueue::push(Event e) {
    e.seq = next_seq_++;
    heap_.push(e);
}

Event EventQueue::pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
}

bool advance(ClusterState& state, const Event& event, std::span<const Job> jobs) {
    if (event.time < state.clock) {
        throw Error(ErrorCategory::kernel, "event at t=" + std::to_string(event.time) +
                                               " precedes the clock t=" + std::to_string(state.clock));
    }
    state.clock = event.time;
    switch (event.kind) {
        case EventKind::job_arrival:
            state.queue.push_back(event.job);
            return true;
        case EventKind::job_completion: {
            auto it = std::find_if(state.running.begin(), state.running.end(), [&](const RunningJob& r) {
                return r.job == event.job && r.attempt == event.attempt;
            });
            if (it == state.running.end()) return false;
            state.pbj_idle += it->allocated;
            state.running.erase(it);
            return true;
        }
        case EventKind::lease_expiry: {
            const Nodes size = jobs[event.job].size;
            state.pbj_owned -= size;
            state.pbj_idle -= size;
            return true;
        }
        case EventKind::ws_demand_change:
            state.ws_demand = event.demand;
            return true;
        case EventKind::lease_tick:
        case EventKind::pbj_manage_tick:
            return true;
    }
    return true;
}

Nodes proportional_pbj_floor(Nodes pool_size, Nodes prc_pbj, Nodes prc_ws) {
    const Nodes total = prc_pbj + prc_ws;
    return total > 0 ? pool_size * prc_pbj / total : 0;
}

std::optional<std::string> check_conservation(const ClusterState& s) {
    const Nodes allocated = s.allocated_to_running();
    if (s.pbj_idle < 0) return "negative PBJ idle";
    if (allocated + s.pbj_idle != s.pbj_owned) return "running + idle != owned";
    if (s.ws_held < 0) return "negative WS holdings";
    if ((s.regime == Regime::DCS || s.regime == Regime::FB) && s.config_size &&
        s.pbj_owned + s.ws_held > *s.config_size) {
        return "holdings exceed the configuration size";
    }
    if (s.regime == Regime::FB && s.pbj_owned > s.pbj_cap) return "PBJ holdings exceed the FB bound";
    if (s.regime == Regime::FLB_NUB) {
        if (s.pbj_owned < s.pbj_floor) return "PBJ holdings below the floor";
        if (s.pbj_in_pool < 0 || s.ws_in_pool < 0 || s.pool_idle() < 0) return "pool over-committed";
        if (s.pbj_external() < 0 || s.ws_external() < 0) return "negative external holdings";
    }
    return std::nullopt;
}

namespace {

class Simulation {
public:
    Simulation(const JobTrace& trace, const DemandTrace& ws, const RunConfig& config)
        : jobs_(trace.jobs), ws_(ws), config_(config) {
        result_.outcomes.resize(jobs_.size());
        state_.regime = config.regime;
        state_.attempts.assign(jobs_.size(), 0);
        for (std::size_t i = 0; i < jobs_.size(); ++i) index_of_.emplace(jobs_[i].id, i);
    }

    RunResult run() {
        activate();
        enqueue_initial_events();
        const Seconds end = config_.duration;
        while (!queue_.empty() && queue_.top().time <= end) {
            const Event event = queue_.pop();
            if (!advance(state_, event, jobs_)) continue;
            react(event);
            if (config_.regime != Regime::EC2RS) schedule();
            settle();
            if (auto violation = check_conservation(state_)) {
                throw Error(ErrorCategory::kernel, "t=" + std::to_string(state_.clock) + ": " + *violation);
            }
            if (config_.observer) config_.observer(state_, event);
        }
        result_.curve = consumption_curve(result_.events, config_.regime);
        result_.report = finalize(result_.events, result_.curve, end);
        result_.final_state = state_;
        return std::move(result_);
    }

private:
    void emit(std::string kind, nlohmann::json payload = nlohmann::json::object()) {
        result_.events.push_back({state_.clock, std::move(kind), std::move(payload)});
    }

    [[noreturn]] void infeasible(Nodes demand, Nodes limit) {
        throw Error(ErrorCategory::infeasible, "t=" + std::to_string(state_.clock) + ": web-service demand " +
                                                   std::to_string(demand) + " exceeds " + std::to_string(limit) +
                                                   " nodes");
    }

    void activate() {
        const Nodes p = config_.prc_pbj;
        const Nodes w = config_.prc_ws;
        const Nodes d0 = ws_.demand_at(0);
        state_.ws_demand = d0;
        switch (config_.regime) {
            case Regime::DCS:
                state_ = dcs_allocate(std::move(state_), p, w);
                if (d0 > w) infeasible(d0, w);
                break;
            case Regime::FB: {
                const Nodes c = config_.config_size.value_or(p + w);
                if (d0 > c) infeasible(d0, c);
                state_.config_size = c;
                state_.pool_size = c;
                state_.pbj_cap = config_.fb_pbj_upper_bound.value_or(p);
                state_.ws_held = d0;
                state_.pbj_owned = std::clamp<Nodes>(c - d0, 0, state_.pbj_cap);
                state_.pbj_idle = state_.pbj_owned;
                break;
            }
            case Regime::FLB_NUB: {
                const Nodes b = config_.params.pool_size;
                state_.pool_size = b;
                state_.pbj_floor = config_.pbj_floor.value_or(proportional_pbj_floor(b, p, w));
                if (state_.pbj_floor < 0 || state_.pbj_floor > b) {
                    throw Error(ErrorCategory::validation, "PBJ floor must lie within the pool");
                }
                state_.pbj_owned = state_.pbj_floor;
                state_.pbj_in_pool = state_.pbj_floor;
                state_.pbj_idle = state_.pbj_floor;
                pool_acquire(state_, state_.ws_held, state_.ws_in_pool, d0);
                break;
            }
            case Regime::EC2RS:
                state_.ws_held = d0;
                break;
        }
        nlohmann::json payload = {{"regime", std::string(to_string(config_.regime))},
                                  {"pool_size", state_.pool_size},
                                  {"pbj_owned", state_.pbj_owned},
                                  {"ws_held", state_.ws_held}};
        payload["config_size"] = state_.config_size ? nlohmann::json(*state_.config_size) : nlohmann::json(nullptr);
        emit("activate", std::move(payload));
        if (config_.regime == Regime::FLB_NUB) emit_holdings(true);
    }

    void enqueue_initial_events() {
        const Seconds end = config_.duration;
        for (std::size_t i = 0; i < jobs_.size(); ++i) {
            if (jobs_[i].submit_time < 0 || jobs_[i].submit_time >= end) continue;
            queue_.push({.time = jobs_[i].submit_time, .kind = EventKind::job_arrival, .job = i});
        }
        for (const auto& s : ws_.samples) {
            if (s.time < 0 || s.time >= end) continue;
            queue_.push({.time = s.time, .kind = EventKind::ws_demand_change, .demand = s.demand});
        }
        const bool lease_ticks = config_.regime == Regime::FB || config_.regime == Regime::FLB_NUB;
        const bool manage_ticks = config_.regime == Regime::FLB_NUB;
        if (lease_ticks) {
            const Seconds step = config_.params.lease_unit;
            for (Seconds t = 0; t < end; t += step) {
                queue_.push({.time = t, .kind = EventKind::lease_tick});
                if (manage_ticks) queue_.push({.time = t, .kind = EventKind::pbj_manage_tick});
            }
        }
    }

    void react(const Event& event) {
        const Job* job = event.kind == EventKind::job_arrival || event.kind == EventKind::job_completion ||
                                 event.kind == EventKind::lease_expiry
                             ? &jobs_[event.job]
                             : nullptr;
        switch (event.kind) {
            case EventKind::job_arrival:
                emit("job_arrival", {{"job", job->id}, {"size", job->size}});
                if (config_.regime == Regime::EC2RS) start_ec2(event.job);
                break;
            case EventKind::job_completion: {
                auto& outcome = result_.outcomes[event.job];
                outcome.completion = state_.clock;
                emit("job_completion", {{"job", job->id}, {"submit", job->submit_time}, {"runtime", job->runtime}});
                break;
            }
            case EventKind::lease_expiry:
                result_.adjustments.record(state_.clock, Actor::pbj_manager, -job->size);
                emit("lease_close", {{"job", job->id}, {"nodes", job->size}});
                break;
            case EventKind::ws_demand_change:
                emit("ws_demand_change", {{"demand", event.demand}});
                on_ws_demand(event.demand);
                break;
            case EventKind::lease_tick:
                emit("lease_tick");
                if (config_.regime == Regime::FB) fb_lease_tick(state_, result_.adjustments);
                if (config_.regime == Regime::FLB_NUB) flb_lease_tick(state_, result_.adjustments);
                break;
            case EventKind::pbj_manage_tick: {
                const auto d = flb_manage_tick(state_, jobs_, config_.params, result_.adjustments);
                nlohmann::json payload = nlohmann::json::object();
                if (d.kind != ManageDecision::Kind::none) {
                    static constexpr const char* names[] = {"none", "request_dr1", "request_dr2", "release_rss"};
                    payload = {{"decision", names[static_cast<int>(d.kind)]}, {"amount", d.amount}};
                }
                emit("pbj_manage_tick", std::move(payload));
                break;
            }
        }
    }

    void on_ws_demand(Nodes demand) {
        switch (config_.regime) {
            case Regime::DCS:
                if (demand > config_.prc_ws) infeasible(demand, config_.prc_ws);
                break;
            case Regime::FB:
                for (const auto& k : fb_ws_demand(state_, jobs_, demand, result_.adjustments)) {
                    ++result_.outcomes[index_of_.at(k.job_id)].kills;
                    emit("job_kill", {{"job", k.job_id}, {"nodes", k.nodes_released}});
                }
                break;
            case Regime::FLB_NUB:
                flb_ws_demand(state_, demand, result_.adjustments);
                break;
            case Regime::EC2RS:
                if (demand != state_.ws_held) {
                    result_.adjustments.record(state_.clock, Actor::ws_manager, demand - state_.ws_held);
                    state_.ws_held = demand;
                }
                break;
        }
    }

    void start_ec2(std::size_t idx) {
        const Job& job = jobs_[idx];
        state_.queue.erase(std::find(state_.queue.begin(), state_.queue.end(), idx));
        const auto lease = ec2_job_lifecycle(job, config_.params);
        state_.pbj_owned += job.size;
        const std::uint32_t attempt = state_.attempts[idx]++;
        state_.running.push_back({idx, state_.clock, job.size, attempt});
        result_.adjustments.record(state_.clock, Actor::pbj_manager, job.size);
        emit("lease_open", {{"job", job.id}, {"nodes", job.size}, {"release", lease.release}});
        emit("job_start", {{"job", job.id}, {"size", job.size}});
        result_.outcomes[idx].start = state_.clock;
        queue_.push({.time = lease.completion, .kind = EventKind::job_completion, .job = idx, .attempt = attempt});
        queue_.push({.time = lease.release, .kind = EventKind::lease_expiry, .job = idx});
    }

    void schedule() {
        for (auto idx : start_first_fit(state_, jobs_)) {
            const Job& job = jobs_[idx];
            result_.outcomes[idx].start = state_.clock;
            emit("job_start", {{"job", job.id}, {"size", job.size}});
            queue_.push({.time = state_.clock + job.runtime,
                         .kind = EventKind::job_completion,
                         .job = idx,
                         .attempt = state_.attempts[idx] - 1});
        }
    }

    // Emits adjustment and holdings records produced while handling an event.
    void settle() {
        const auto& entries = result_.adjustments.entries();
        for (; adjustments_seen_ < entries.size(); ++adjustments_seen_) {
            const auto& a = entries[adjustments_seen_];
            emit("adjust", {{"actor", std::string(to_string(a.actor))}, {"delta", a.delta}});
        }
        if (config_.regime == Regime::FLB_NUB) emit_holdings(false);
    }

    void emit_holdings(bool force) {
        const Nodes pbj_ext = state_.pbj_external();
        const Nodes ws_ext = state_.ws_external();
        if (!force && pbj_ext == last_pbj_external_ && ws_ext == last_ws_external_) return;
        last_pbj_external_ = pbj_ext;
        last_ws_external_ = ws_ext;
        emit("holdings", {{"pbj_owned", state_.pbj_owned},
                          {"pbj_external", pbj_ext},
                          {"ws_held", state_.ws_held},
                          {"ws_external", ws_ext}});
    }

    std::span<const Job> jobs_;
    std::unordered_map<std::int64_t, std::size_t> index_of_;
    const DemandTrace& ws_;
    const RunConfig& config_;
    ClusterState state_;
    EventQueue queue_;
    RunResult result_;
    std::size_t adjustments_seen_ = 0;
    Nodes last_pbj_external_ = -1;
    Nodes last_ws_external_ = -1;
};

void validate_config(const RunConfig& config) {
    if (config.duration <= 0) throw Error(ErrorCategory::validation, "duration must be positive");
    if (config.prc_pbj < 0 || config.prc_ws < 0) throw Error(ErrorCategory::validation, "PRC values must be >= 0");
    switch (config.regime) {
        case Regime::DCS:
            break;
        case Regime::FB:
            if (config.config_size && *config.config_size < 0) {
                throw Error(ErrorCategory::validation, "configuration size must be >= 0");
            }
            if (config.params.lease_unit <= 0) throw Error(ErrorCategory::validation, "L must be positive");
            break;
        case Regime::FLB_NUB:
            validate(config.params);
            break;
        case Regime::EC2RS:
            if (config.params.lease_unit <= 0) throw Error(ErrorCategory::validation, "L must be positive");
            break;
    }
}

}  // namespace

RunResult run(const JobTrace& jobs, const DemandTrace& ws, const RunConfig& config) {
    validate_config(config);
    return Simulation(jobs, ws, config).run();
}

}  // namespace coprov
