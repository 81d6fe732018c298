#pragma once

// Reference implementations used only by tests. They follow the rules
// literally and favour obviousness over speed.

#include <algorithm>
#include <numeric>
#include <vector>

#include "coprov/cluster_state.hpp"
#include "coprov/trace.hpp"

namespace coprov::oracle {

/// First-fit by literal rescanning: start the first job that fits, then
/// restart the scan from the head, until a full scan starts nothing.
inline std::vector<std::size_t> first_fit_rescan(const std::vector<Nodes>& sizes, Nodes idle) {
    std::vector<bool> started(sizes.size(), false);
    std::vector<std::size_t> order;
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (!started[i] && sizes[i] <= idle) {
                started[i] = true;
                idle -= sizes[i];
                order.push_back(i);
                progress = true;
                break;
            }
        }
    }
    return order;
}

/// Kill order by exhaustive search: among all permutations of the running
/// set, the one whose (size ascending, start descending, index descending)
/// key sequence is lexicographically least; victims are its shortest prefix
/// that frees `shortfall` nodes. Returns positions into `running`.
inline std::vector<std::size_t> kill_victims_bruteforce(const std::vector<RunningJob>& running, Nodes shortfall) {
    if (shortfall <= 0) return {};
    std::vector<std::size_t> perm(running.size());
    std::iota(perm.begin(), perm.end(), 0);
    auto key_less = [&](std::size_t a, std::size_t b) {
        const auto& x = running[a];
        const auto& y = running[b];
        if (x.allocated != y.allocated) return x.allocated < y.allocated;
        if (x.start != y.start) return x.start > y.start;
        return x.job > y.job;
    };
    auto seq_less = [&](const std::vector<std::size_t>& p, const std::vector<std::size_t>& q) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (key_less(p[i], q[i])) return true;
            if (key_less(q[i], p[i])) return false;
        }
        return false;
    };
    std::vector<std::size_t> best = perm;
    std::sort(perm.begin(), perm.end());
    do {
        if (seq_less(perm, best)) best = perm;
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::size_t> victims;
    Nodes freed = 0;
    for (auto p : best) {
        if (freed >= shortfall) break;
        victims.push_back(p);
        freed += running[p].allocated;
    }
    return victims;
}

struct Consumption {
    std::int64_t node_seconds = 0;
    Nodes peak = 0;
};

/// EC2RS consumption summed second by second straight from the traces: each
/// job arriving in the window holds its nodes from submit until its runtime
/// rounded up to whole lease units, plus the web-service demand.

inline Consumption ec2_bruteforce(const JobTrace& jobs, const DemandTrace& ws, Seconds lease, Seconds duration) {
    std::vector<Nodes> per_second(static_cast<std::size_t>(duration), 0);
    for (const auto& j : jobs.jobs) {
        if (j.submit_time >= duration) continue;
        Seconds release = j.submit_time;
        while (release < j.submit_time + j.runtime) release += lease;
        for (Seconds t = j.submit_time; t < std::min(release, duration); ++t) per_second[t] += j.size;
    }
    Consumption c;
    for (Seconds t = 0; t < duration; ++t) {
        const Nodes n = per_second[t] + ws.demand_at(t);
        c.node_seconds += n;
        c.peak = std::max(c.peak, n);
    }
    return c;
}

/// FLB_NUB consumption replayed from the adjustment log alone. Holdings start
/// at the PBJ floor and the initial web-service demand; every grant draws on
/// free pool capacity before going outside it, every release hands back
/// outside capacity first. Charged = pool + both sides' outside holdings.
inline Consumption flb_replay(const std::vector<Adjustment>& log, Nodes pool, Nodes pbj_floor, Nodes ws0,
                              Seconds duration) {
    struct Side {
        Nodes inside = 0;
        Nodes outside = 0;
    };
    Side pbj{pbj_floor, 0};
    Side ws{0, 0};
    auto free_pool = [&] { return pool - pbj.inside - ws.inside; };
    auto grow = [&](Side& side, Nodes n) {
        const Nodes in = std::min(n, std::max<Nodes>(free_pool(), 0));
        side.inside += in;
        side.outside += n - in;
    };
    auto shrink = [&](Side& side, Nodes n) {
        const Nodes out = std::min(n, side.outside);
        side.outside -= out;
        side.inside -= n - out;
    };
    grow(ws, ws0);

    Consumption c;
    std::size_t next = 0;
    for (Seconds t = 0; t < duration; ++t) {
        while (next < log.size() && log[next].time <= t) {
            const auto& a = log[next++];
            Side& side = a.actor == Actor::ws_manager ? ws : pbj;
            if (a.delta > 0) grow(side, a.delta);
            else shrink(side, -a.delta);
        }
        const Nodes n = pool + pbj.outside + ws.outside;
        c.node_seconds += n;
        c.peak = std::max(c.peak, n);
    }
    return c;
}

}  // namespace coprov::oracle
