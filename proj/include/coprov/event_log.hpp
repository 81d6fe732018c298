#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coprov/trace.hpp"

namespace coprov {

/// One line of the simulation event log.
///
/// Kinds written by the kernel:
///   activate          {regime, config_size, pool_size, pbj_owned, ws_held}
///   job_arrival       {job, size}
///   job_start         {job, size}
///   job_completion    {job, submit, runtime}
///   job_kill          {job, nodes}
///   ws_demand_change  {demand}
///   lease_tick, pbj_manage_tick {decision?, amount?}
///   lease_open        {job, nodes, release}      (EC2RS)
///   lease_close       {job, nodes}               (EC2RS)
///   adjust            {actor, delta}
///   holdings          {pbj_owned, pbj_external, ws_held, ws_external}  (FLB_NUB)
struct EventRecord {
    Seconds time = 0;
    std::string kind;
    nlohmann::json payload = nlohmann::json::object();

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Line-delimited JSON, one {"kind","payload","time"} object per record.
void write_event_log(std::ostream& out, std::span<const EventRecord> records);
std::string event_log_jsonl(std::span<const EventRecord> records);
std::vector<EventRecord> read_event_log(std::istream& in);

}  // namespace coprov
