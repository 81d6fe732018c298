#include "coprov/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "coprov/error.hpp"

namespace coprov {

namespace {

void push_point(ConsumptionCurve& curve, Seconds time, Nodes nodes) {
    if (!curve.empty() && curve.back().time == time) {
        curve.back().nodes = nodes;
        if (curve.size() >= 2 && curve[curve.size() - 2].nodes == nodes) curve.pop_back();
        return;
    }
    if (!curve.empty() && curve.back().nodes == nodes) return;
    curve.push_back({time, nodes});
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& row) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const char c = row[i];
        if (quoted) {
            if (c == '"' && i + 1 < row.size() && row[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\n' && c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

template <typename T>
T parse_number(const std::string& text, const char* column) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCategory::parse, std::string("bad CSV value for ") + column + ": '" + text + "'");
    }
    return v;
}

}  // namespace

ConsumptionCurve consumption_curve(std::span<const EventRecord> log, Regime regime) {
    ConsumptionCurve curve;
    switch (regime) {
        case Regime::DCS:
        case Regime::FB: {
            for (const auto& r : log) {
                if (r.kind == "activate") {
                    push_point(curve, 0, r.payload.at("config_size").get<Nodes>());
                    break;
                }
            }
            break;
        }
        case Regime::FLB_NUB: {
            Nodes pool = 0;
            for (const auto& r : log) {
                if (r.kind == "activate") pool = r.payload.at("pool_size").get<Nodes>();
                if (r.kind == "holdings") {
                    push_point(curve, r.time,
                               pool + r.payload.at("pbj_external").get<Nodes>() +
                                   r.payload.at("ws_external").get<Nodes>());
                }
            }
            break;
        }
        case Regime::EC2RS: {
            Nodes leases = 0;
            Nodes ws = 0;
            for (const auto& r : log) {
                if (r.kind == "activate") {
                    ws = r.payload.at("ws_held").get<Nodes>();
                } else if (r.kind == "ws_demand_change") {
                    ws = r.payload.at("demand").get<Nodes>();
                } else if (r.kind == "lease_open") {
                    leases += r.payload.at("nodes").get<Nodes>();
                } else if (r.kind == "lease_close") {
                    leases -= r.payload.at("nodes").get<Nodes>();
                } else {
                    continue;
                }
                push_point(curve, r.time, leases + ws);
            }
            break;
        }
    }
    if (curve.empty() || curve.front().time != 0) curve.insert(curve.begin(), CurvePoint{0, 0});
    return curve;
}

double node_hours(std::int64_t node_seconds) {
    return static_cast<double>((node_seconds * 10 + 1800) / 3600) / 10.0;
}

MetricsReport finalize(std::span<const EventRecord> log, const ConsumptionCurve& curve, Seconds window_duration) {
    MetricsReport report;
    report.window_duration = window_duration;

    std::int64_t arrivals = 0;
    double exec_sum = 0;
    double turnaround_sum = 0;
    for (const auto& r : log) {
        if (r.kind == "job_arrival") {
            ++arrivals;
        } else if (r.kind == "job_completion" && r.time <= window_duration) {
            ++report.completed_jobs;
            exec_sum += static_cast<double>(r.payload.at("runtime").get<Seconds>());
            turnaround_sum += static_cast<double>(r.time - r.payload.at("submit").get<Seconds>());
        } else if (r.kind == "adjust") {
            ++report.adjustment_count;
        }
    }
    report.incomplete_jobs = arrivals - report.completed_jobs;
    if (report.completed_jobs > 0) {
        report.avg_execution_time = exec_sum / static_cast<double>(report.completed_jobs);
        report.avg_turnaround_time = turnaround_sum / static_cast<double>(report.completed_jobs);
    }

    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Seconds from = std::max<Seconds>(curve[i].time, 0);
        const Seconds to = std::min(i + 1 < curve.size() ? curve[i + 1].time : window_duration, window_duration);
        if (to <= from) continue;
        report.peak_consumption = std::max(report.peak_consumption, curve[i].nodes);
        report.total_node_seconds += curve[i].nodes * (to - from);
    }
    report.total_consumption = node_hours(report.total_node_seconds);
    return report;
}

nlohmann::json report_to_json(const MetricsReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {
        {"completed_jobs", r.completed_jobs},
        {"incomplete_jobs", r.incomplete_jobs},
        {"avg_execution_time", opt(r.avg_execution_time)},
        {"avg_turnaround_time", opt(r.avg_turnaround_time)},
        {"peak_consumption", r.peak_consumption},
        {"total_node_seconds", r.total_node_seconds},
        {"total_consumption_node_hours", r.total_consumption},
        {"adjustment_count", r.adjustment_count},
        {"window_duration", r.window_duration},
    };
}

MetricsReport report_from_json(const nlohmann::json& j) {
    auto opt = [&](const char* key) -> std::optional<double> {
        const auto& v = j.at(key);
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
    };
    MetricsReport r;
    r.completed_jobs = j.at("completed_jobs").get<std::int64_t>();
    r.incomplete_jobs = j.at("incomplete_jobs").get<std::int64_t>();
    r.avg_execution_time = opt("avg_execution_time");
    r.avg_turnaround_time = opt("avg_turnaround_time");
    r.peak_consumption = j.at("peak_consumption").get<Nodes>();
    r.total_node_seconds = j.at("total_node_seconds").get<std::int64_t>();
    r.total_consumption = j.at("total_consumption_node_hours").get<double>();
    r.adjustment_count = j.at("adjustment_count").get<std::int64_t>();
    r.window_duration = j.at("window_duration").get<Seconds>();
    return r;
}

std::string csv_header() {
    return "scenario,regime,config_size,params,completed_jobs,incomplete_jobs,avg_execution_time,"
           "avg_turnaround_time,peak_consumption,total_consumption_node_hours,total_node_seconds,"
           "adjustment_count,window_duration";
}

std::string csv_row(const ReportLabel& label, const MetricsReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string row;
    row += csv_escape(label.scenario) + ',';
    row += std::string(to_string(label.regime)) + ',';
    row += (label.config_size ? std::to_string(*label.config_size) : std::string()) + ',';
    row += csv_escape(label.params) + ',';
    row += std::to_string(r.completed_jobs) + ',';
    row += std::to_string(r.incomplete_jobs) + ',';
    row += opt(r.avg_execution_time) + ',';
    row += opt(r.avg_turnaround_time) + ',';
    row += std::to_string(r.peak_consumption) + ',';
    row += format_double(r.total_consumption) + ',';
    row += std::to_string(r.total_node_seconds) + ',';
    row += std::to_string(r.adjustment_count) + ',';
    row += std::to_string(r.window_duration);
    return row;
}

std::pair<ReportLabel, MetricsReport> parse_csv_row(const std::string& row) {
    const auto f = csv_split(row);
    if (f.size() != 13) {
        throw Error(ErrorCategory::parse, "expected 13 CSV columns, got " + std::to_string(f.size()));
    }
    auto opt = [](const std::string& s, const char* column) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return parse_number<double>(s, column);
    };
    ReportLabel label;
    label.scenario = f[0];
    label.regime = parse_regime(f[1]);
    if (!f[2].empty()) label.config_size = parse_number<Nodes>(f[2], "config_size");
    label.params = f[3];
    MetricsReport r;
    r.completed_jobs = parse_number<std::int64_t>(f[4], "completed_jobs");
    r.incomplete_jobs = parse_number<std::int64_t>(f[5], "incomplete_jobs");
    r.avg_execution_time = opt(f[6], "avg_execution_time");
    r.avg_turnaround_time = opt(f[7], "avg_turnaround_time");
    r.peak_consumption = parse_number<Nodes>(f[8], "peak_consumption");
    r.total_consumption = parse_number<double>(f[9], "total_consumption_node_hours");
    r.total_node_seconds = parse_number<std::int64_t>(f[10], "total_node_seconds");
    r.adjustment_count = parse_number<std::int64_t>(f[11], "adjustment_count");
    r.window_duration = parse_number<Seconds>(f[12], "window_duration");
    return {label, r};
}

}  // namespace coprov
