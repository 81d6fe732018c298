#include "coprov/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "coprov/agreement.hpp"
#include "coprov/error.hpp"

namespace coprov {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or_throw(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCategory::validation, std::string("scenario is missing '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCategory::validation, std::string("scenario field '") + key + "' has the wrong type");
    }
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get_or_throw<T>(j, key);
}

PolicyParams params_from_json(const nlohmann::json& j, Nodes prc_sum) {
    if (j.is_string()) return parse_policy_params(j.get<std::string>(), {}, prc_sum);
    if (!j.is_object()) throw Error(ErrorCategory::validation, "params must be a string or an object");
    PolicyParams p;
    if (j.contains("B")) p.pool_size = get_or_throw<Nodes>(j, "B");
    if (j.contains("BR")) {
        p.pool_size = static_cast<Nodes>(std::floor(get_or_throw<double>(j, "BR") * static_cast<double>(prc_sum) + 1e-9));
    }
    if (j.contains("U")) p.request_ratio = get_or_throw<double>(j, "U");
    if (j.contains("V")) p.release_ratio = get_or_throw<double>(j, "V");
    if (j.contains("G")) p.elastic_factor = get_or_throw<double>(j, "G");
    if (j.contains("L_minutes")) p.lease_unit = std::llround(get_or_throw<double>(j, "L_minutes") * 60.0);
    if (j.contains("L_seconds")) p.lease_unit = get_or_throw<Seconds>(j, "L_seconds");
    return p;
}

double parse_double(const std::string& text) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCategory::validation, "'" + text + "' is not a number");
    }
    return v;
}

std::pair<Nodes, Nodes> parse_tuple_value(const std::string& text) {
    const auto sep = text.find_first_of(":x");
    if (sep == std::string::npos) throw Error(ErrorCategory::validation, "tuple value must look like P:W, got '" + text + "'");
    return {static_cast<Nodes>(parse_double(text.substr(0, sep))),
            static_cast<Nodes>(parse_double(text.substr(sep + 1)))};
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorCategory::io, "write failed for '" + path.string() + "'");
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw Error(ErrorCategory::validation, "scenario must be a JSON object");
    Scenario s;
    s.name = get_or_throw<std::string>(j, "name");
    s.pbj_trace = resolve(base_dir, get_or_throw<std::string>(j, "pbj_trace"));
    s.ws_trace = resolve(base_dir, get_or_throw<std::string>(j, "ws_trace"));

    const auto& w = j.contains("window") ? j.at("window") : nlohmann::json::object();
    s.window_start = get_optional<Seconds>(w, "start").value_or(0);
    s.window_start_unix = get_optional<std::int64_t>(w, "start_unix");
    s.window_duration = get_or_throw<Seconds>(w, "duration");
    s.cpus_per_node = get_optional<std::int64_t>(j, "cpus_per_node").value_or(1);

    const auto tuple = get_or_throw<std::vector<Nodes>>(j, "tuple");
    if (tuple.size() != 2) throw Error(ErrorCategory::validation, "tuple must be [PRC_PBJ, PRC_WS]");
    s.prc_pbj = tuple[0];
    s.prc_ws = tuple[1];

    s.regime = parse_regime(get_or_throw<std::string>(j, "regime"));
    s.config_size = get_optional<Nodes>(j, "config_size");
    if (j.contains("params")) s.params = params_from_json(j.at("params"), s.prc_pbj + s.prc_ws);
    s.pbj_floor = get_optional<Nodes>(j, "pbj_floor");
    s.fb_pbj_upper_bound = get_optional<Nodes>(j, "fb_pbj_upper_bound");

    if (j.contains("agreements")) {
        for (const auto& p : get_or_throw<std::vector<std::string>>(j, "agreements")) {
            s.agreements.push_back(resolve(base_dir, p));
        }
    }

    if (j.contains("sweep")) {
        const auto& sw = j.at("sweep");
        SweepPlan plan;
        plan.axis = get_or_throw<std::string>(sw, "axis");
        if (!sw.contains("values") || !sw.at("values").is_array()) {
            throw Error(ErrorCategory::validation, "sweep.values must be an array");
        }
        for (const auto& v : sw.at("values")) plan.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        s.sweep = std::move(plan);
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        if (auto d = get_optional<std::string>(o, "dir")) s.output.dir = resolve(base_dir, *d);
        s.output.report_json = get_optional<std::string>(o, "report_json").value_or("");
        s.output.report_csv = get_optional<std::string>(o, "report_csv").value_or("");
        s.output.event_log = get_optional<std::string>(o, "event_log").value_or("");
    } else {
        s.output.dir = base_dir;
    }
    return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["pbj_trace"] = s.pbj_trace.string();
    j["ws_trace"] = s.ws_trace.string();
    j["window"] = {{"start", s.window_start}, {"duration", s.window_duration}};
    if (s.window_start_unix) j["window"]["start_unix"] = *s.window_start_unix;
    j["cpus_per_node"] = s.cpus_per_node;
    j["tuple"] = {s.prc_pbj, s.prc_ws};
    j["regime"] = std::string(to_string(s.regime));
    j["config_size"] = s.config_size ? nlohmann::json(*s.config_size) : nlohmann::json(nullptr);
    j["params"] = format_policy_params(s.params);
    j["pbj_floor"] = s.pbj_floor ? nlohmann::json(*s.pbj_floor) : nlohmann::json(nullptr);
    j["fb_pbj_upper_bound"] = s.fb_pbj_upper_bound ? nlohmann::json(*s.fb_pbj_upper_bound) : nlohmann::json(nullptr);
    if (s.sweep) j["sweep"] = {{"axis", s.sweep->axis}, {"values", s.sweep->values}};
    return j;
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open scenario '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::parse, path.string() + ": " + e.what());
    }
    auto s = scenario_from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    validate(s);
    return s;
}

void validate(const Scenario& s) {
    auto fail = [](const std::string& what) { throw Error(ErrorCategory::validation, what); };
    if (s.name.empty()) fail("scenario name is empty");
    if (s.window_duration <= 0) fail("window duration must be positive");
    if (s.cpus_per_node < 1) fail("cpus_per_node must be >= 1");
    if (s.prc_pbj < 1 || s.prc_ws < 1) fail("tuple entries must be >= 1");
    if (!s.agreements.empty() && s.agreements.size() != 2) fail("agreements must name exactly two files");
    switch (s.regime) {
        case Regime::DCS:
            if (s.config_size && *s.config_size != s.prc_pbj + s.prc_ws) {
                fail("DCS configuration size is PRC_PBJ + PRC_WS");
            }
            break;
        case Regime::FB:
            if (s.config_size && *s.config_size < 1) fail("configuration size must be >= 1");
            if (s.params.lease_unit <= 0) fail("L must be positive");
            break;
        case Regime::FLB_NUB:
            validate(s.params);
            break;
        case Regime::EC2RS:
            if (s.params.lease_unit <= 0) fail("L must be positive");
            break;
    }
}

RawTraces load_traces(const Scenario& s) {
    return {parse_swf_file(s.pbj_trace.string()), parse_demand_trace_file(s.ws_trace.string())};
}

PreparedTraces prepare_traces(const Scenario& s, const RawTraces& raw) {
    Seconds start = s.window_start;
    if (s.window_start_unix) {
        if (!raw.jobs.unix_start_time) {
            throw Error(ErrorCategory::validation, "start_unix needs an UnixStartTime header in the SWF file");
        }
        start = *s.window_start_unix - *raw.jobs.unix_start_time;
    }
    PreparedTraces out;
    out.jobs = scale_to_peak(normalize_cpus(window(raw.jobs, start, s.window_duration), s.cpus_per_node), s.prc_pbj);
    out.ws = scale_to_peak(raw.ws, s.prc_ws);
    return out;
}

RunConfig run_config(const Scenario& s) {
    RunConfig c;
    c.regime = s.regime;
    c.params = s.params;
    c.prc_pbj = s.prc_pbj;
    c.prc_ws = s.prc_ws;
    c.config_size = s.config_size;
    c.pbj_floor = s.pbj_floor;
    c.fb_pbj_upper_bound = s.fb_pbj_upper_bound;
    c.duration = s.window_duration;

    if (!s.agreements.empty()) {
        const auto plan = pair_coordinated(parse_agreement_file(s.agreements[0].string()),
                                           parse_agreement_file(s.agreements[1].string()));
        const bool matches = (plan.model == CoordinationModel::FB && s.regime == Regime::FB) ||
                             (plan.model == CoordinationModel::FLB_NUB && s.regime == Regime::FLB_NUB);
        if (!matches) {
            throw Error(ErrorCategory::validation, "agreement model " + std::string(to_string(plan.model)) +
                                                       " does not match regime " + std::string(to_string(s.regime)));
        }
        c.params.pool_size = plan.pool_size;
        if (s.regime == Regime::FB && !c.config_size) c.config_size = plan.pool_size;
    }
    return c;
}

ReportLabel report_label(const Scenario& s) {
    ReportLabel label;
    label.scenario = s.name;
    label.regime = s.regime;
    switch (s.regime) {
        case Regime::DCS: label.config_size = s.prc_pbj + s.prc_ws; break;
        case Regime::FB: label.config_size = s.config_size.value_or(s.prc_pbj + s.prc_ws); break;
        default: break;
    }
    // Only FLB_NUB reads B/U/V/G; FB and EC2RS depend on L alone.
    const std::string full = format_policy_params(s.params);
    switch (s.regime) {
        case Regime::DCS: break;
        case Regime::FLB_NUB: label.params = full; break;
        default: label.params = full.substr(full.rfind("/L") + 1); break;
    }
    return label;
}

ScenarioResult execute(const Scenario& s, const RawTraces& raw) {
    validate(s);
    const auto prepared = prepare_traces(s, raw);
    const auto config = run_config(s);
    ScenarioResult result{report_label(s), run(prepared.jobs, prepared.ws, config)};
    if (!s.agreements.empty() && s.regime == Regime::FLB_NUB) result.label.params = format_policy_params(config.params);
    return result;
}

ScenarioResult execute(const Scenario& s) {
    validate(s);
    return execute(s, load_traces(s));
}

std::vector<fs::path> write_outputs(const Scenario& s, const ScenarioResult& result,
                                    const std::optional<fs::path>& out_dir) {
    const fs::path dir = out_dir.value_or(s.output.dir);
    const fs::path json_path = dir / (s.output.report_json.empty() ? s.name + ".report.json" : s.output.report_json);
    const fs::path csv_path = dir / (s.output.report_csv.empty() ? s.name + ".csv" : s.output.report_csv);

    nlohmann::json report = {{"scenario", scenario_to_json(s)},
                             {"label", {{"scenario", result.label.scenario},
                                        {"regime", std::string(to_string(result.label.regime))},
                                        {"config_size", result.label.config_size
                                                            ? nlohmann::json(*result.label.config_size)
                                                            : nlohmann::json(nullptr)},
                                        {"params", result.label.params}}},
                             {"metrics", report_to_json(result.run.report)}};
    write_text(json_path, report.dump(2) + "\n");
    write_text(csv_path, csv_header() + "\n" + csv_row(result.label, result.run.report) + "\n");

    std::vector<fs::path> written{json_path, csv_path};
    if (!s.output.event_log.empty()) {
        const fs::path log_path = dir / s.output.event_log;
        write_text(log_path, event_log_jsonl(result.run.events));
        written.push_back(log_path);
    }
    return written;
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "B") return SweepAxis::B;
    if (name == "U") return SweepAxis::U;
    if (name == "V") return SweepAxis::V;
    if (name == "G") return SweepAxis::G;
    if (name == "L") return SweepAxis::L;
    if (name == "tuple") return SweepAxis::tuple;
    throw Error(ErrorCategory::validation, "unknown sweep axis '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::B: return "B";
        case SweepAxis::U: return "U";
        case SweepAxis::V: return "V";
        case SweepAxis::G: return "G";
        case SweepAxis::L: return "L";
        case SweepAxis::tuple: return "tuple";
    }
    return "?";
}

Scenario apply_sweep_value(const Scenario& base, SweepAxis axis, const std::string& value) {
    Scenario s = base;
    s.name = base.name + "_" + std::string(to_string(axis)) + value;
    std::replace(s.name.begin(), s.name.end(), ':', 'x');
    switch (axis) {
        case SweepAxis::B: {
            const double b = parse_double(value);
            if (b != std::floor(b)) throw Error(ErrorCategory::validation, "B must be integral, got " + value);
            s.params.pool_size = static_cast<Nodes>(b);
            s.agreements.clear();
            break;
        }
        case SweepAxis::U: s.params.request_ratio = parse_double(value); break;
        case SweepAxis::V: s.params.release_ratio = parse_double(value); break;
        case SweepAxis::G: s.params.elastic_factor = parse_double(value); break;
        case SweepAxis::L: s.params.lease_unit = std::llround(parse_double(value) * 60.0); break;
        case SweepAxis::tuple: {
            const auto [p, w] = parse_tuple_value(value);
            s.prc_pbj = p;
            s.prc_ws = w;
            break;
        }
    }
    return s;
}

std::vector<SweepPoint> sweep(const Scenario& base, SweepAxis axis, const std::vector<std::string>& values,
                              unsigned workers) {
    if (values.empty()) throw Error(ErrorCategory::validation, "sweep needs at least one value");

    std::vector<Scenario> points;
    points.reserve(values.size());
    for (const auto& v : values) points.push_back(apply_sweep_value(base, axis, v));
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            validate(points[i]);
        } catch (const Error& e) {
            throw Error(e.category(), "sweep point " + std::string(to_string(axis)) + "=" + values[i] + ": " + e.what());
        }
    }

    const RawTraces raw = load_traces(base);
    std::vector<std::optional<SweepPoint>> results(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                auto r = execute(points[i], raw);
                results[i] = SweepPoint{values[i], r.label, r.run.report};
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!failures[i]) continue;
        const std::string where = "sweep point " + std::string(to_string(axis)) + "=" + values[i] + ": ";
        try {
            std::rethrow_exception(failures[i]);
        } catch (const Error& e) {
            throw Error(e.category(), where + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCategory::kernel, where + e.what());
        }
    }

    std::vector<SweepPoint> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    auto key = [axis](const std::string& v) -> std::pair<double, double> {
        if (axis == SweepAxis::tuple) {
            const auto [p, w] = parse_tuple_value(v);
            return {static_cast<double>(p), static_cast<double>(w)};
        }
        return {parse_double(v), 0.0};
    };
    std::stable_sort(out.begin(), out.end(),
                     [&](const SweepPoint& a, const SweepPoint& b) { return key(a.value) < key(b.value); });
    return out;
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepPoint>& points) {
    std::ostringstream out;
    out << "axis,value," << csv_header() << '\n';
    for (const auto& p : points) out << to_string(axis) << ',' << p.value << ',' << csv_row(p.label, p.report) << '\n';
    return out.str();
}

}  // namespace coprov
