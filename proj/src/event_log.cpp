#include "coprov/event_log.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "coprov/error.hpp"

namespace coprov {

void write_event_log(std::ostream& out, std::span<const EventRecord> records) {
    for (const auto& r : records) {
        nlohmann::json line = {{"time", r.time}, {"kind", r.kind}, {"payload", r.payload}};
        out << line.dump() << '\n';
    }
}

std::string event_log_jsonl(std::span<const EventRecord> records) {
    std::ostringstream out;
    write_event_log(out, records);
    return out.str();
}

std::vector<EventRecord> read_event_log(std::istream& in) {
    std::vector<EventRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            records.push_back({j.at("time").get<Seconds>(), j.at("kind").get<std::string>(), j.at("payload")});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::parse, "event log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace coprov
