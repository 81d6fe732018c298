#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coprov/trace.hpp"

namespace coprov::testing {

inline std::filesystem::path source_dir() { return COPROV_SOURCE_DIR; }
inline std::filesystem::path synthetic_dir() { return source_dir() / "data" / "synthetic"; }

struct JobSpec {
    Seconds submit;
    Seconds runtime;
    Nodes size;
};

inline JobTrace make_jobs(const std::vector<JobSpec>& specs, Seconds duration = 0) {
    JobTrace t;
    std::int64_t id = 1;
    for (const auto& s : specs) {
        t.jobs.push_back({id++, s.submit, s.runtime, s.size});
        t.peak_demand = std::max(t.peak_demand, s.size);
        duration = std::max(duration, s.submit + 1);
    }
    t.window = {0, duration};
    return t;
}

inline DemandTrace make_demand(const std::vector<DemandSample>& samples) {
    DemandTrace d;
    d.samples = samples;
    for (const auto& s : samples) d.peak_demand = std::max(d.peak_demand, s.demand);
    return d;
}

}  // namespace coprov::testing
