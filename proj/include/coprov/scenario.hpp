#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coprov/cluster_state.hpp"
#include "coprov/metrics.hpp"
#include "coprov/simkernel.hpp"
#include "coprov/trace.hpp"

namespace coprov {

struct OutputSpec {
    std::filesystem::path dir = ".";
    std::string report_json;  // default <name>.report.json
    std::string report_csv;   // default <name>.csv
    std::string event_log;    // empty: not written
};

/// A sweep stored alongside a scenario: the axis name and its values, used
/// by `coprov sweep` when no axis is given on the command line.
struct SweepPlan {
    std::string axis;
    std::vector<std::string> values;
};

/// One reproducible simulation: which traces, how they are transformed and
/// which regime runs on them.
struct Scenario {
    std::string name;
    std::filesystem::path pbj_trace;
    std::filesystem::path ws_trace;
    Seconds window_start = 0;
    std::optional<std::int64_t> window_start_unix;  // resolved against the SWF UnixStartTime
    Seconds window_duration = 0;
    std::int64_t cpus_per_node = 1;
    Nodes prc_pbj = 0;
    Nodes prc_ws = 0;
    Regime regime = Regime::DCS;
    std::optional<Nodes> config_size;
    PolicyParams params;
    std::optional<Nodes> pbj_floor;
    std::optional<Nodes> fb_pbj_upper_bound;
    std::vector<std::filesystem::path> agreements;  // optional PBJ + WS pair; sets B
    OutputSpec output;
    std::optional<SweepPlan> sweep;
};

/// Relative paths in `j` resolve against `base_dir`.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// Throws Error(validation) for inconsistent scenarios.
void validate(const Scenario& s);

struct RawTraces {
    JobTrace jobs;
    DemandTrace ws;
};

struct PreparedTraces {
    JobTrace jobs;
    DemandTrace ws;
};

RawTraces load_traces(const Scenario& s);

/// window -> normalize_cpus -> scale_to_peak for the jobs; scale_to_peak for
/// the demand trace.
PreparedTraces prepare_traces(const Scenario& s, const RawTraces& raw);

RunConfig run_config(const Scenario& s);
ReportLabel report_label(const Scenario& s);

struct ScenarioResult {
    ReportLabel label;
    RunResult run;
};

ScenarioResult execute(const Scenario& s, const RawTraces& raw);
ScenarioResult execute(const Scenario& s);

/// Writes the JSON report, the CSV row (with header) and, if requested, the
/// event log. `out_dir` overrides s.output.dir when set. Returns the paths.
std::vector<std::filesystem::path> write_outputs(const Scenario& s, const ScenarioResult& result,
                                                 const std::optional<std::filesystem::path>& out_dir);

enum class SweepAxis { B, U, V, G, L, tuple };
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// Returns a copy of `base` with one axis set. L values are minutes; tuple
/// values are "P:W".
Scenario apply_sweep_value(const Scenario& base, SweepAxis axis, const std::string& value);

struct SweepPoint {
    std::string value;
    ReportLabel label;
    MetricsReport report;
};

/// Runs one scenario per value on up to `workers` threads. Points come back
/// ordered by value. A failing point aborts the sweep with an error naming it.
std::vector<SweepPoint> sweep(const Scenario& base, SweepAxis axis, const std::vector<std::string>& values,
                              unsigned workers);

/// "axis,value," followed by the report columns.
std::string sweep_csv(SweepAxis axis, const std::vector<SweepPoint>& points);

}  // namespace coprov
