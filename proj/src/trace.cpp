#include "coprov/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "coprov/error.hpp"

namespace coprov {

namespace {

constexpr std::size_t kSwfFieldCount = 18;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw Error(ErrorCategory::parse, "line " + std::to_string(line_no) + ": " + what);
}

Nodes max_size(const std::vector<Job>& jobs) {
    Nodes peak = 0;
    for (const auto& j : jobs) peak = std::max(peak, j.size);
    return peak;
}

// round(value * num / den) with halves rounded up, all nonnegative.
std::int64_t scale_round(std::int64_t value, std::int64_t num, std::int64_t den) {
    return (2 * value * num + den) / (2 * den);
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open '" + path + "'");
    return in;
}

}  // namespace

Nodes DemandTrace::demand_at(Seconds t) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), t,
                               [](Seconds value, const DemandSample& s) { return value < s.time; });
    if (it == samples.begin()) return 0;
    return std::prev(it)->demand;
}

JobTrace parse_swf(std::istream& in) {
    JobTrace trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (body.front() == ';') {
            constexpr std::string_view key = "UnixStartTime:";
            const auto pos = body.find(key);
            if (pos != std::string_view::npos) {
                if (auto v = to_int(trim(body.substr(pos + key.size())))) trace.unix_start_time = *v;
            }
            continue;
        }
        const auto fields = split_ws(body);
        if (fields.size() < kSwfFieldCount) {
            parse_fail(line_no, "expected " + std::to_string(kSwfFieldCount) + " fields, got " +
                                    std::to_string(fields.size()));
        }
        auto field = [&](std::size_t one_based, const char* name) {
            auto v = to_double(fields[one_based - 1]);
            if (!v) {
                parse_fail(line_no, std::string("non-numeric ") + name + " '" +
                                        std::string(fields[one_based - 1]) + "'");
            }
            return *v;
        };
        const auto id = to_int(fields[0]);
        if (!id) parse_fail(line_no, "non-numeric job id '" + std::string(fields[0]) + "'");
        const double submit = field(2, "submit time");
        const double runtime = field(4, "run time");
        const double allocated = field(5, "allocated processors");
        const double requested = field(8, "requested processors");

        Job job;
        job.id = *id;
        job.submit_time = std::llround(submit);
        job.runtime = std::llround(runtime);
        job.size = std::llround(allocated > 0 ? allocated : requested);
        if (job.runtime <= 0 || job.size <= 0 || job.submit_time < 0) continue;
        trace.jobs.push_back(job);
    }
    if (trace.jobs.empty()) throw Error(ErrorCategory::empty_trace, "no usable jobs in SWF input");

    std::stable_sort(trace.jobs.begin(), trace.jobs.end(),
                     [](const Job& a, const Job& b) { return a.submit_time < b.submit_time; });
    std::unordered_set<std::int64_t> seen;
    for (const auto& j : trace.jobs) {
        if (!seen.insert(j.id).second) {
            throw Error(ErrorCategory::parse, "duplicate job id " + std::to_string(j.id));
        }
    }
    trace.peak_demand = max_size(trace.jobs);
    trace.window = Window{0, trace.jobs.back().submit_time + 1};
    return trace;
}

JobTrace parse_swf_file(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_swf(in);
}

DemandTrace parse_demand_trace(std::istream& in) {
    DemandTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto comma = body.find(',');
        if (comma == std::string_view::npos) parse_fail(line_no, "expected 'time,demand'");
        const auto t_text = trim(body.substr(0, comma));
        const auto d_text = trim(body.substr(comma + 1));
        if (first_content && t_text == "time" && d_text == "demand") {
            first_content = false;
            continue;
        }
        first_content = false;
        const auto t = to_int(t_text);
        const auto d = to_int(d_text);
        if (!t) parse_fail(line_no, "non-integer time '" + std::string(t_text) + "'");
        if (!d) parse_fail(line_no, "non-integer demand '" + std::string(d_text) + "'");
        if (*d < 0) parse_fail(line_no, "negative demand " + std::to_string(*d));
        if (!trace.samples.empty() && *t <= trace.samples.back().time) {
            parse_fail(line_no, "time " + std::to_string(*t) + " does not increase");
        }
        trace.samples.push_back({*t, *d});
        trace.peak_demand = std::max(trace.peak_demand, *d);
    }
    return trace;
}

DemandTrace parse_demand_trace_file(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_demand_trace(in);
}

std::string serialize_demand_trace(const DemandTrace& trace) {
    std::ostringstream out;
    for (const auto& s : trace.samples) out << s.time << ',' << s.demand << '\n';
    return out.str();
}

JobTrace window(const JobTrace& trace, Seconds start_offset, Seconds duration) {
    if (duration <= 0) {
        throw Error(ErrorCategory::validation, "window duration must be positive");
    }
    JobTrace out;
    out.unix_start_time = trace.unix_start_time;
    out.window = Window{trace.window.start_offset + start_offset, duration};
    for (const auto& j : trace.jobs) {
        if (j.submit_time < start_offset || j.submit_time - start_offset >= duration) continue;
        Job copy = j;
        copy.submit_time -= start_offset;
        out.jobs.push_back(copy);
    }
    if (out.jobs.empty()) {
        throw Error(ErrorCategory::empty_trace, "window [" + std::to_string(start_offset) + ", +" +
                                                    std::to_string(duration) + ") holds no jobs");
    }
    out.peak_demand = max_size(out.jobs);
    return out;
}

JobTrace normalize_cpus(const JobTrace& trace, std::int64_t cpus_per_node) {
    if (cpus_per_node < 1) throw Error(ErrorCategory::validation, "cpus_per_node must be >= 1");
    JobTrace out = trace;
    for (auto& j : out.jobs) j.size = (j.size + cpus_per_node - 1) / cpus_per_node;
    out.peak_demand = max_size(out.jobs);
    return out;
}

JobTrace scale_to_peak(const JobTrace& trace, Nodes target_peak) {
    if (trace.peak_demand <= 0) throw Error(ErrorCategory::validation, "cannot scale a trace with zero peak");
    if (target_peak < 1) throw Error(ErrorCategory::validation, "target peak must be >= 1");
    JobTrace out = trace;
    for (auto& j : out.jobs) {
        j.size = std::clamp<Nodes>(scale_round(j.size, target_peak, trace.peak_demand), 1, target_peak);
    }
    out.peak_demand = max_size(out.jobs);
    return out;
}

DemandTrace scale_to_peak(const DemandTrace& trace, Nodes target_peak) {
    if (trace.peak_demand <= 0) throw Error(ErrorCategory::validation, "cannot scale a trace with zero peak");
    if (target_peak < 1) throw Error(ErrorCategory::validation, "target peak must be >= 1");
    DemandTrace out = trace;
    out.peak_demand = 0;
    for (auto& s : out.samples) {
        s.demand = std::min<Nodes>(scale_round(s.demand, target_peak, trace.peak_demand), target_peak);
        out.peak_demand = std::max(out.peak_demand, s.demand);
    }
    return out;
}

}  // namespace coprov
