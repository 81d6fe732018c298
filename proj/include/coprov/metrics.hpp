#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coprov/cluster_state.hpp"
#include "coprov/event_log.hpp"

namespace coprov {

/// A step of the consumption curve: `nodes` are held from `time` until the
/// next point.
struct CurvePoint {
    Seconds time = 0;
    Nodes nodes = 0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};
using ConsumptionCurve = std::vector<CurvePoint>;

struct MetricsReport {
    std::int64_t completed_jobs = 0;
    std::int64_t incomplete_jobs = 0;
    std::optional<double> avg_execution_time;   // absent with no completions
    std::optional<double> avg_turnaround_time;
    Nodes peak_consumption = 0;
    std::int64_t total_node_seconds = 0;
    double total_consumption = 0.0;  // node*hours, one decimal
    std::int64_t adjustment_count = 0;
    Seconds window_duration = 0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Nodes the resource provider has committed over time.
///
/// DCS and FB hold the whole configuration; FLB_NUB pays for the pool plus
/// whatever both sides hold outside it; EC2RS pays for open job leases plus
/// the web-service demand.
ConsumptionCurve consumption_curve(std::span<const EventRecord> log, Regime regime);

/// Integrates and summarizes a finished run over [0, window_duration).
MetricsReport finalize(std::span<const EventRecord> log, const ConsumptionCurve& curve, Seconds window_duration);

/// Node*seconds rounded to node*hours with one decimal.
double node_hours(std::int64_t node_seconds);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

/// Scenario columns that precede the metrics in a CSV row.
struct ReportLabel {
    std::string scenario;
    Regime regime = Regime::DCS;
    std::optional<Nodes> config_size;
    std::string params;

    friend bool operator==(const ReportLabel&, const ReportLabel&) = default;
};

/// Column order:
/// scenario,regime,config_size,params,completed_jobs,incomplete_jobs,
/// avg_execution_time,avg_turnaround_time,peak_consumption,
/// total_consumption_node_hours,total_node_seconds,adjustment_count,
/// window_duration
std::string csv_header();
std::string csv_row(const ReportLabel& label, const MetricsReport& report);
std::pair<ReportLabel, MetricsReport> parse_csv_row(const std::string& row);

}  // namespace coprov
