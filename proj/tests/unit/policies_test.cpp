#include <gtest/gtest.h>

#include <random>

#include "coprov/error.hpp"
#include "coprov/policies.hpp"
#include "coprov/simkernel.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace coprov {
namespace {

using Kind = ManageDecision::Kind;

// A settled FB state whose running jobs are given as (size, start) pairs.
struct FbFixture {
    std::vector<Job> jobs;
    ClusterState state;
    AdjustmentLog log;

    FbFixture(Nodes config, Nodes idle, const std::vector<std::pair<Nodes, Seconds>>& running, Seconds now = 100) {
        state.regime = Regime::FB;
        state.config_size = config;
        state.pool_size = config;
        state.clock = now;
        Nodes busy = 0;
        for (std::size_t i = 0; i < running.size(); ++i) {
            jobs.push_back({static_cast<std::int64_t>(i + 1), 0, 1000, running[i].first});
            state.running.push_back({i, running[i].second, running[i].first, 0});
            busy += running[i].first;
        }
        state.attempts.assign(jobs.size(), 1);
        state.pbj_owned = busy + idle;
        state.pbj_idle = idle;
        state.pbj_cap = config;
    }
};

TEST(FirstFit, Examples) {
    const std::vector<Nodes> a{5, 2, 3};
    EXPECT_EQ(first_fit_schedule(a, 4), (std::vector<std::size_t>{1}));
    EXPECT_EQ(first_fit_schedule(a, 4), oracle::first_fit_rescan(a, 4));
    const std::vector<Nodes> b{1, 1, 1};
    EXPECT_EQ(first_fit_schedule(b, 3), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_TRUE(first_fit_schedule(b, 0).empty());
}

TEST(FirstFitProperty, MatchesLiteralRescan) {
    std::mt19937_64 rng(41);
    for (int iter = 0; iter < 2000; ++iter) {
        std::vector<Nodes> sizes(std::uniform_int_distribution<int>(0, 12)(rng));
        for (auto& s : sizes) s = std::uniform_int_distribution<Nodes>(1, 32)(rng);
        const Nodes idle = std::uniform_int_distribution<Nodes>(0, 64)(rng);
        EXPECT_EQ(first_fit_schedule(sizes, idle), oracle::first_fit_rescan(sizes, idle));
    }
}

TEST(StartFirstFit, MovesJobsToRunning) {
    ClusterState s;
    std::vector<Job> jobs{{1, 0, 10, 5}, {2, 0, 10, 2}, {3, 0, 10, 3}};
    s.queue = {0, 1, 2};
    s.attempts.assign(3, 0);
    s.pbj_owned = 4;
    s.pbj_idle = 4;
    s.clock = 7;
    EXPECT_EQ(start_first_fit(s, jobs), (std::vector<std::size_t>{1}));
    EXPECT_EQ(s.pbj_idle, 2);
    EXPECT_EQ(s.queue, (std::deque<std::size_t>{0, 2}));
    ASSERT_EQ(s.running.size(), 1u);
    EXPECT_EQ(s.running[0].start, 7);
    EXPECT_EQ(s.attempts[1], 1u);
}

TEST(FbForceRelease, IdleFirst) {
    FbFixture f(10, 5, {{5, 0}});
    EXPECT_TRUE(fb_force_release(f.state, f.jobs, 3, f.log).empty());
    EXPECT_EQ(f.state.pbj_idle, 2);
    EXPECT_EQ(f.state.pbj_owned, 7);
    ASSERT_EQ(f.log.count(), 1u);
    EXPECT_EQ(f.log.entries()[0], (Adjustment{100, Actor::pbj_manager, -3}));
}

TEST(FbForceRelease, KillsSmallestLatest) {
    FbFixture f(8, 0, {{4, 10}, {2, 20}, {2, 30}});
    const auto expected = oracle::kill_victims_bruteforce(f.state.running, 2);
    ASSERT_EQ(expected, (std::vector<std::size_t>{2}));
    const auto kills = fb_force_release(f.state, f.jobs, 2, f.log);
    ASSERT_EQ(kills.size(), 1u);
    EXPECT_EQ(kills[0], (KillRecord{3, 100, 2}));
    EXPECT_EQ(f.state.queue, (std::deque<std::size_t>{2}));
    EXPECT_EQ(f.state.pbj_idle, 0);
    EXPECT_EQ(f.state.pbj_owned, 6);
}

TEST(FbForceRelease, OvershootStaysIdle) {
    FbFixture f(4, 0, {{4, 0}});
    const auto kills = fb_force_release(f.state, f.jobs, 3, f.log);
    ASSERT_EQ(kills.size(), 1u);
    EXPECT_EQ(kills[0].nodes_released, 4);
    EXPECT_EQ(f.state.pbj_idle, 1);
    EXPECT_EQ(f.state.pbj_owned, 1);
    EXPECT_TRUE(f.state.running.empty());
}

TEST(FbForceRelease, RequeuesInArrivalOrderAtHead) {
    FbFixture f(16, 0, {{2, 50}, {2, 40}, {4, 10}, {8, 5}});
    f.state.queue = {7};
    const auto kills = fb_force_release(f.state, f.jobs, 5, f.log);
    ASSERT_EQ(kills.size(), 3u);
    EXPECT_EQ(kills[0].job_id, 1);
    EXPECT_EQ(kills[1].job_id, 2);
    EXPECT_EQ(kills[2].job_id, 3);
    EXPECT_EQ(f.state.queue, (std::deque<std::size_t>{0, 1, 2, 7}));
    EXPECT_EQ(f.state.pbj_idle, 3);
}

TEST(FbForceRelease, CannotExceedHoldings) {
    FbFixture f(4, 0, {{4, 0}});
    EXPECT_THROW(fb_force_release(f.state, f.jobs, 5, f.log), Error);
}

TEST(FbWsDemand, DropFreesNodes) {
    FbFixture f(20, 0, {{6, 0}});
    f.state.ws_held = 10;
    f.state.ws_demand = 4;
    EXPECT_TRUE(fb_ws_demand(f.state, f.jobs, 4, f.log).empty());
    EXPECT_EQ(f.state.ws_held, 4);
    EXPECT_EQ(f.state.free_nodes(), 10);
    EXPECT_EQ(f.log.entries().back(), (Adjustment{100, Actor::ws_manager, -6}));
}

TEST(FbWsDemand, RiseWithinFreeCapacity) {
    FbFixture f(20, 0, {{6, 0}});
    f.state.ws_held = 4;
    EXPECT_TRUE(fb_ws_demand(f.state, f.jobs, 10, f.log).empty());
    EXPECT_EQ(f.state.ws_held, 10);
    EXPECT_EQ(f.state.pbj_owned, 6);
}

TEST(FbWsDemand, FullReclaimKillsEverything) {
    FbFixture f(128, 0, {{64, 0}, {32, 10}, {16, 20}, {16, 30}});
    const auto expected = oracle::kill_victims_bruteforce(f.state.running, 128);
    const auto before = f.state.running;
    const auto kills = fb_ws_demand(f.state, f.jobs, 128, f.log);
    ASSERT_EQ(kills.size(), expected.size());
    for (std::size_t i = 0; i < kills.size(); ++i) EXPECT_EQ(kills[i].job_id, f.jobs[before[expected[i]].job].id);
    EXPECT_EQ(f.state.pbj_owned, 0);
    EXPECT_EQ(f.state.ws_held, 128);
    EXPECT_EQ(f.state.queue.size(), 4u);
}

TEST(FbWsDemand, AboveConfigurationIsInfeasible) {
    FbFixture f(8, 8, {});
    try {
        fb_ws_demand(f.state, f.jobs, 9, f.log);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::infeasible);
    }
}

TEST(FbLeaseTick, Examples) {
    FbFixture none(8, 0, {{8, 0}});
    EXPECT_EQ(fb_lease_tick(none.state, none.log), 0);
    EXPECT_EQ(none.log.count(), 0u);

    FbFixture seven(16, 0, {{9, 0}});
    seven.state.pbj_owned = 9;
    EXPECT_EQ(fb_lease_tick(seven.state, seven.log), 7);
    EXPECT_EQ(seven.state.pbj_owned, 16);
    EXPECT_EQ(seven.state.pbj_idle, 7);
}

TEST(FbLeaseTick, WsDropIsReturnedAtNextTick) {
    const auto jobs = testing::make_jobs({{50, 10, 10}});
    const auto ws = testing::make_demand({{0, 6}, {100, 0}});
    RunConfig c;
    c.regime = Regime::FB;
    c.prc_pbj = 10;
    c.prc_ws = 10;
    c.config_size = 10;
    c.duration = 7200;
    const auto r = run(jobs, ws, c);
    EXPECT_EQ(r.outcomes[0].start, 3600);
    bool saw_return = false;
    for (const auto& e : r.events) {
        if (e.kind == "adjust" && e.payload["actor"] == "provision_service") {
            EXPECT_EQ(e.time, 3600);
            EXPECT_EQ(e.payload["delta"], 6);
            saw_return = true;
        }
    }
    EXPECT_TRUE(saw_return);
}

TEST(FlbManageDecision, Examples) {
    PolicyParams p;
    EXPECT_EQ(flb_manage_decision(std::vector<Nodes>{100, 50}, 100, 0, 0, p), (ManageDecision{Kind::request_dr1, 50}));
    EXPECT_EQ(flb_manage_decision(std::vector<Nodes>{120}, 100, 40, 0, p), (ManageDecision{Kind::request_dr2, 80}));
    EXPECT_EQ(flb_manage_decision({}, 100, 60, 0, p), (ManageDecision{Kind::release_rss, 30}));
    EXPECT_EQ(flb_manage_decision({}, 100, 60, 90, p), (ManageDecision{Kind::release_rss, 10}));
    EXPECT_EQ(flb_manage_decision({}, 90, 60, 90, p), ManageDecision{});
    EXPECT_EQ(flb_manage_decision(std::vector<Nodes>{3}, 0, 0, 0, p), (ManageDecision{Kind::request_dr1, 3}));
}

TEST(FlbManageDecisionProperty, NeverBelowFloor) {
    std::mt19937_64 rng(43);
    for (int iter = 0; iter < 5000; ++iter) {
        std::vector<Nodes> q(std::uniform_int_distribution<int>(0, 6)(rng));
        for (auto& s : q) s = std::uniform_int_distribution<Nodes>(1, 64)(rng);
        const Nodes floor = std::uniform_int_distribution<Nodes>(0, 30)(rng);
        const Nodes owned = floor + std::uniform_int_distribution<Nodes>(0, 100)(rng);
        const Nodes idle = std::uniform_int_distribution<Nodes>(0, owned)(rng);
        const auto d = flb_manage_decision(q, owned, idle, floor, PolicyParams{});
        if (d.kind == Kind::release_rss) {
            EXPECT_GE(owned - d.amount, floor);
            EXPECT_LE(d.amount, idle);
        }
        if (d.kind != Kind::none) {
            EXPECT_GT(d.amount, 0);
        }
    }
}

TEST(PoolAccounting, FirstComeAndExternalFirstRelease) {
    ClusterState s;
    s.pool_size = 25;
    pool_acquire(s, s.ws_held, s.ws_in_pool, 10);
    pool_acquire(s, s.pbj_owned, s.pbj_in_pool, 20);
    EXPECT_EQ(s.ws_in_pool, 10);
    EXPECT_EQ(s.pbj_in_pool, 15);
    EXPECT_EQ(s.pbj_external(), 5);
    pool_release(s.pbj_owned, s.pbj_in_pool, 7);
    EXPECT_EQ(s.pbj_external(), 0);
    EXPECT_EQ(s.pbj_in_pool, 13);
    EXPECT_EQ(s.pool_idle(), 2);
}

TEST(FlbLeaseTick, Examples) {
    AdjustmentLog log;
    ClusterState full;
    full.pool_size = 25;
    full.ws_held = full.ws_in_pool = 10;
    full.pbj_owned = full.pbj_in_pool = full.pbj_idle = 15;
    EXPECT_EQ(flb_lease_tick(full, log), 0);

    ClusterState some;
    some.pool_size = 25;
    some.ws_held = some.ws_in_pool = 5;
    EXPECT_EQ(flb_lease_tick(some, log), 20);
    EXPECT_EQ(some.pbj_owned, 20);
    EXPECT_EQ(some.pbj_in_pool, 20);

    ClusterState empty;
    EXPECT_EQ(flb_lease_tick(empty, log), 0);
    EXPECT_EQ(log.count(), 1u);
}

TEST(FlbWsDemand, GrantedImmediately) {
    ClusterState s;
    s.pool_size = 10;
    AdjustmentLog log;
    flb_ws_demand(s, 14, log);
    EXPECT_EQ(s.ws_held, 14);
    EXPECT_EQ(s.ws_external(), 4);
    flb_ws_demand(s, 6, log);
    EXPECT_EQ(s.ws_external(), 0);
    EXPECT_EQ(s.ws_in_pool, 6);
    flb_ws_demand(s, 6, log);
    EXPECT_EQ(log.count(), 2u);
}

TEST(Ec2Lifecycle, LeaseRounding) {
    PolicyParams p;
    EXPECT_EQ(ec2_job_lifecycle({1, 0, 3600, 1}, p).held(), 3600);
    EXPECT_EQ(ec2_job_lifecycle({1, 0, 3601, 1}, p).held(), 7200);
    const auto l = ec2_job_lifecycle({1, 500, 90 * 60, 4}, p);
    EXPECT_EQ(l, (LeaseTimes{500, 500 + 5400, 500 + 7200}));
}

TEST(Ec2Lifecycle, TurnaroundEqualsRuntime) {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 1000; ++i) {
        Job j{1, std::uniform_int_distribution<Seconds>(0, 100000)(rng), std::uniform_int_distribution<Seconds>(1, 20000)(rng), 1};
        PolicyParams p;
        p.lease_unit = std::uniform_int_distribution<Seconds>(60, 14400)(rng);
        const auto l = ec2_job_lifecycle(j, p);
        EXPECT_EQ(l.completion - j.submit_time, j.runtime);
        EXPECT_GE(l.release, l.completion);
        EXPECT_LT(l.release - l.completion, p.lease_unit);
        EXPECT_EQ(l.held() % p.lease_unit, 0);
    }
}

TEST(DcsAllocate, StaticSplit) {
    const auto a = dcs_allocate({}, 128, 128);
    EXPECT_EQ(a.config_size, 256);
    EXPECT_EQ(a.pbj_owned, 128);
    EXPECT_EQ(a.ws_held, 128);
    EXPECT_EQ(dcs_allocate({}, 144, 128).config_size, 272);
}

TEST(DcsAllocate, RunHasNoAdjustments) {
    const auto jobs = testing::make_jobs({{0, 100, 4}, {10, 50, 8}, {20, 500, 2}});
    const auto ws = testing::make_demand({{0, 1}, {30, 4}, {60, 2}});
    RunConfig c;
    c.regime = Regime::DCS;
    c.prc_pbj = 8;
    c.prc_ws = 4;
    c.duration = 1000;
    const auto r = run(jobs, ws, c);
    EXPECT_EQ(r.report.adjustment_count, 0);
    EXPECT_EQ(r.adjustments.count(), 0u);
    EXPECT_EQ(r.report.peak_consumption, 12);
}

TEST(WsController, Examples) {
    const std::vector<double> high{0.85, 0.85};
    const std::vector<double> low{0.5};
    const std::vector<double> mid{0.6, 0.8};
    EXPECT_EQ(ws_instance_controller(high, 4), +1);
    EXPECT_EQ(ws_instance_controller(low, 4), -1);
    EXPECT_EQ(ws_instance_controller(mid, 4), 0);
    EXPECT_EQ(ws_instance_controller(low, 1), 0);
    EXPECT_EQ(ws_instance_controller(low, 2, 2), 0);
}

TEST(WsControllerProperty, Hysteresis) {
    for (int n = 2; n <= 64; ++n) {
        const double remove = 0.8 * (n - 1) / n;
        EXPECT_GT(0.8, remove);
        for (double u = 0.0; u <= 1.0; u += 0.01) {
            const std::vector<double> w{u};
            const int d = ws_instance_controller(w, n);
            if (d == +1) EXPECT_GT(u, 0.8);
            if (d == -1) EXPECT_LT(u, remove);
        }
    }
}

}  // namespace
}  // namespace coprov
