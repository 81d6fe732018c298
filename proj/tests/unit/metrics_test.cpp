#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "coprov/error.hpp"
#include "coprov/metrics.hpp"
#include "coprov/simkernel.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace coprov {
namespace {

RunConfig config(Regime regime, Nodes p, Nodes w, Seconds duration) {
    RunConfig c;
    c.regime = regime;
    c.prc_pbj = p;
    c.prc_ws = w;
    c.duration = duration;
    return c;
}

TEST(ConsumptionCurve, DcsIsConstant) {
    const auto r = run(testing::make_jobs({{0, 100, 4}, {50, 10, 100}}), testing::make_demand({{0, 20}}),
                       config(Regime::DCS, 128, 128, 5000));
    EXPECT_EQ(r.curve, (ConsumptionCurve{{0, 256}}));
    EXPECT_EQ(r.report.peak_consumption, 256);
    EXPECT_EQ(r.report.total_node_seconds, 256 * 5000);
}

TEST(ConsumptionCurve, FlbWithinPoolIsConstant) {
    auto c = config(Regime::FLB_NUB, 10, 15, 20000);
    c.params.pool_size = 25;
    const auto r = run(testing::make_jobs({{100, 500, 3}, {4000, 800, 8}}),
                       testing::make_demand({{0, 5}, {3000, 12}, {9000, 2}}), c);
    EXPECT_EQ(r.curve, (ConsumptionCurve{{0, 25}}));
    EXPECT_EQ(r.report.peak_consumption, 25);
    EXPECT_GT(r.report.adjustment_count, 0);
}

TEST(ConsumptionCurve, Ec2LeaseRounding) {
    auto c = config(Regime::EC2RS, 4, 1, 3 * 3600);
    const auto r = run(testing::make_jobs({{0, 90 * 60, 4}}), testing::make_demand({{0, 0}}), c);
    EXPECT_EQ(r.report.total_node_seconds, 4 * 7200);
    EXPECT_EQ(r.report.total_consumption, 8.0);
    EXPECT_EQ(r.report.peak_consumption, 4);
    EXPECT_EQ(r.report.avg_turnaround_time, 5400.0);
}

TEST(Finalize, AveragesAbsentWithoutCompletions) {
    const auto r = run(testing::make_jobs({{0, 1000, 4}}), {}, config(Regime::DCS, 4, 0, 500));
    EXPECT_EQ(r.report.completed_jobs, 0);
    EXPECT_EQ(r.report.incomplete_jobs, 1);
    EXPECT_FALSE(r.report.avg_execution_time.has_value());
    EXPECT_FALSE(r.report.avg_turnaround_time.has_value());
    EXPECT_TRUE(report_to_json(r.report)["avg_turnaround_time"].is_null());
    const auto row = csv_row({"x", Regime::DCS, 4, ""}, r.report);
    EXPECT_NE(row.find(",1,,,"), std::string::npos) << row;
}

TEST(NodeHours, OneDecimal) {
    EXPECT_EQ(node_hours(0), 0.0);
    EXPECT_EQ(node_hours(3600), 1.0);
    EXPECT_EQ(node_hours(180), 0.1);
    EXPECT_EQ(node_hours(179), 0.0);
    EXPECT_EQ(node_hours(63336LL * 3600), 63336.0);
}

TEST(Csv, HeaderColumns) {
    EXPECT_EQ(csv_header(),
              "scenario,regime,config_size,params,completed_jobs,incomplete_jobs,avg_execution_time,"
              "avg_turnaround_time,peak_consumption,total_consumption_node_hours,total_node_seconds,"
              "adjustment_count,window_duration");
}

TEST(CsvProperty, RowRoundTripsThroughJson) {
    std::mt19937_64 rng(61);
    const Regime regimes[] = {Regime::DCS, Regime::FB, Regime::FLB_NUB, Regime::EC2RS};
    for (int i = 0; i < 500; ++i) {
        MetricsReport r;
        r.completed_jobs = std::uniform_int_distribution<std::int64_t>(0, 5000)(rng);
        r.incomplete_jobs = std::uniform_int_distribution<std::int64_t>(0, 50)(rng);
        if (r.completed_jobs > 0) {
            r.avg_execution_time = std::uniform_real_distribution<double>(1, 1e5)(rng);
            r.avg_turnaround_time = *r.avg_execution_time + std::uniform_real_distribution<double>(0, 1e4)(rng);
        }
        r.peak_consumption = std::uniform_int_distribution<Nodes>(0, 3000)(rng);
        r.total_node_seconds = std::uniform_int_distribution<std::int64_t>(0, 1LL << 40)(rng);
        r.total_consumption = node_hours(r.total_node_seconds);
        r.adjustment_count = std::uniform_int_distribution<std::int64_t>(0, 100000)(rng);
        r.window_duration = 1209600;
        ReportLabel label{"s,\"quoted\"" + std::to_string(i), regimes[i % 4],
                          i % 2 ? std::optional<Nodes>(217) : std::nullopt, "B25/U1.2/V0.2/G0.5/L60"};

        const auto via_json = report_from_json(nlohmann::json::parse(report_to_json(r).dump()));
        EXPECT_EQ(via_json, r);
        const auto [l2, r2] = parse_csv_row(csv_row(label, via_json));
        EXPECT_EQ(l2, label);
        EXPECT_EQ(r2, r);
    }
}

TEST(Csv, RejectsMalformedRows) {
    EXPECT_THROW(parse_csv_row("a,b"), Error);
    EXPECT_THROW(parse_csv_row("s,DCS,,,x,0,,,0,0,0,0,1"), Error);
}

TEST(EventLog, JsonLinesRoundTrip) {
    const auto r = run(testing::make_jobs({{0, 100, 4}, {10, 20, 2}}), testing::make_demand({{0, 1}, {50, 3}}),
                       config(Regime::FB, 4, 4, 4000));
    std::istringstream in(event_log_jsonl(r.events));
    EXPECT_EQ(read_event_log(in), r.events);
}

JobTrace random_jobs(std::mt19937_64& rng, int n, Nodes max_size, Seconds horizon) {
    std::vector<testing::JobSpec> specs;
    for (int i = 0; i < n; ++i) {
        specs.push_back({std::uniform_int_distribution<Seconds>(0, horizon)(rng),
                         std::uniform_int_distribution<Seconds>(1, 5000)(rng),
                         std::uniform_int_distribution<Nodes>(1, max_size)(rng)});
    }
    std::sort(specs.begin(), specs.end(), [](auto& a, auto& b) { return a.submit < b.submit; });
    return testing::make_jobs(specs);
}

DemandTrace random_demand(std::mt19937_64& rng, Nodes peak, Seconds horizon) {
    std::vector<DemandSample> s;
    for (Seconds t = std::uniform_int_distribution<Seconds>(0, 300)(rng); t < horizon;
         t += std::uniform_int_distribution<Seconds>(1, 3000)(rng)) {
        s.push_back({t, std::uniform_int_distribution<Nodes>(0, peak)(rng)});
    }
    return testing::make_demand(s);
}

TEST(ConsumptionOracle, Ec2MatchesPerSecondRecount) {
    std::mt19937_64 rng(67);
    for (int iter = 0; iter < 40; ++iter) {
        const Seconds duration = 30000;
        const auto jobs = random_jobs(rng, 25, 16, duration + 2000);
        const auto ws = random_demand(rng, 10, duration);
        auto c = config(Regime::EC2RS, 16, 10, duration);
        c.params.lease_unit = std::uniform_int_distribution<Seconds>(300, 7200)(rng);
        const auto r = run(jobs, ws, c);
        const auto expected = oracle::ec2_bruteforce(jobs, ws, c.params.lease_unit, duration);
        EXPECT_EQ(r.report.total_node_seconds, expected.node_seconds);
        EXPECT_EQ(r.report.peak_consumption, expected.peak);
    }
}

TEST(ConsumptionOracle, FlbMatchesAdjustmentReplay) {
    std::mt19937_64 rng(71);
    for (int iter = 0; iter < 40; ++iter) {
        const Seconds duration = 30000;
        const auto jobs = random_jobs(rng, 25, 16, duration);
        const auto ws = random_demand(rng, 10, duration);
        auto c = config(Regime::FLB_NUB, 16, 10, duration);
        c.params.pool_size = std::uniform_int_distribution<Nodes>(0, 20)(rng);
        c.params.lease_unit = std::uniform_int_distribution<Seconds>(300, 7200)(rng);
        const auto r = run(jobs, ws, c);
        const Nodes floor = c.params.pool_size * 16 / 26;
        const auto expected =
            oracle::flb_replay(r.adjustments.entries(), c.params.pool_size, floor, ws.demand_at(0), duration);
        EXPECT_EQ(r.report.total_node_seconds, expected.node_seconds);
        EXPECT_EQ(r.report.peak_consumption, expected.peak);
        EXPECT_LE(r.report.total_consumption,
                  static_cast<double>(r.report.peak_consumption) * static_cast<double>(duration) / 3600.0 + 0.05);
    }
}

TEST(MetricsProperty, TurnaroundAtLeastExecution) {
    std::mt19937_64 rng(73);
    for (auto regime : {Regime::DCS, Regime::FB, Regime::FLB_NUB, Regime::EC2RS}) {
        for (int iter = 0; iter < 20; ++iter) {
            const auto jobs = random_jobs(rng, 30, 12, 20000);
            const auto ws = random_demand(rng, 6, 20000);
            auto c = config(regime, 12, 6, 25000);
            c.params.pool_size = 8;
            if (regime == Regime::FB) c.config_size = 14;
            const auto r = run(jobs, ws, c);
            if (r.report.completed_jobs == 0) continue;
            EXPECT_GE(*r.report.avg_turnaround_time, *r.report.avg_execution_time);
            if (regime == Regime::EC2RS) {
                EXPECT_EQ(*r.report.avg_turnaround_time, *r.report.avg_execution_time);
                EXPECT_GE(r.report.peak_consumption, ws.peak_demand);
            }
            if (regime == Regime::DCS) EXPECT_EQ(r.report.peak_consumption, 18);
            if (regime == Regime::FB) EXPECT_EQ(r.report.peak_consumption, 14);
        }
    }
}

}  // namespace
}  // namespace coprov
