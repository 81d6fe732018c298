#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coprov {

/// Virtual time in whole seconds.
using Seconds = std::int64_t;
/// Capacity in nodes (one VM counts as one node).
using Nodes = std::int64_t;

/// One parallel batch job as it appears in a workload trace.
struct Job {
    std::int64_t id = 0;
    Seconds submit_time = 0;
    Seconds runtime = 0;
    Nodes size = 0;

    friend bool operator==(const Job&, const Job&) = default;
};

/// Offset of a trace segment relative to the origin of the file it came from,
/// and the segment length.
struct Window {
    Seconds start_offset = 0;
    Seconds duration = 0;

    friend bool operator==(const Window&, const Window&) = default;
};

struct JobTrace {
    std::vector<Job> jobs;   // nondecreasing submit_time, unique ids
    Nodes peak_demand = 0;   // max job size
    Window window;
    std::optional<std::int64_t> unix_start_time;  // from the SWF header, if any

    friend bool operator==(const JobTrace&, const JobTrace&) = default;
};

struct DemandSample {
    Seconds time = 0;
    Nodes demand = 0;

    friend auto operator<=>(const DemandSample&, const DemandSample&) = default;
};

/// Piecewise-constant web-service node demand: each sample holds until the
/// next one. Demand before the first sample is zero.
struct DemandTrace {
    std::vector<DemandSample> samples;
    Nodes peak_demand = 0;

    Nodes demand_at(Seconds t) const;

    friend bool operator==(const DemandTrace&, const DemandTrace&) = default;
};

/// Reads a Standard Workload Format file. Comment lines start with ';'.
/// Jobs with nonpositive runtime or size are dropped; submit times keep their
/// original offsets.
JobTrace parse_swf(std::istream& in);
JobTrace parse_swf_file(const std::string& path);

/// Reads "time,demand" CSV lines, with an optional "time,demand" header.
DemandTrace parse_demand_trace(std::istream& in);
DemandTrace parse_demand_trace_file(const std::string& path);

/// Canonical CSV form (no header, "\n" line endings). parse_demand_trace
/// reads it back to an equal trace.
std::string serialize_demand_trace(const DemandTrace& trace);

/// Keeps jobs submitted in [start_offset, start_offset + duration) and
/// re-bases their submit times to zero.
JobTrace window(const JobTrace& trace, Seconds start_offset, Seconds duration);

/// Converts CPU counts to node counts, rounding up.
JobTrace normalize_cpus(const JobTrace& trace, std::int64_t cpus_per_node);

/// Multiplies sizes by target_peak / peak_demand, rounding half up; job sizes
/// stay >= 1 and the resulting peak is exactly target_peak.
JobTrace scale_to_peak(const JobTrace& trace, Nodes target_peak);
DemandTrace scale_to_peak(const DemandTrace& trace, Nodes target_peak);

}  // namespace coprov
