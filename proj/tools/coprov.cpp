// coprov: command-line front end for the co-provisioning simulator.
//
//   coprov run <scenario.json> [--out-dir DIR]
//   coprov run --pbj-trace F --ws-trace F --regime R --tuple P:W --duration S [...]
//   coprov sweep <scenario.json> [--axis {B,U,V,G,L,tuple} --values v1,v2,...] [--jobs N]
//   coprov validate <agreement.xml> [<other.xml>]
//
// COPROV_OUTPUT_DIR, when set, replaces the output directory of every run.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coprov/agreement.hpp"
#include "coprov/error.hpp"
#include "coprov/scenario.hpp"

namespace fs = std::filesystem;
using namespace coprov;

namespace {

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::validation:
        case ErrorCategory::invariant:
        case ErrorCategory::transition:
        case ErrorCategory::pairing: return 2;
        case ErrorCategory::parse:
        case ErrorCategory::empty_trace: return 3;
        case ErrorCategory::infeasible: return 4;
        case ErrorCategory::io: return 5;
        case ErrorCategory::kernel: return 1;
    }
    return 1;
}

std::optional<fs::path> env_output_dir(const std::string& flag) {
    if (!flag.empty()) return fs::path(flag);
    if (const char* env = std::getenv("COPROV_OUTPUT_DIR"); env && *env) return fs::path(env);
    return std::nullopt;
}

struct AdHoc {
    std::string pbj_trace;
    std::string ws_trace;
    std::string regime;
    std::string tuple;
    std::string params;
    std::string name = "adhoc";
    std::string event_log;
    Seconds start = 0;
    Seconds duration = 0;
    std::int64_t cpus_per_node = 1;
    Nodes config_size = 0;
};

Scenario scenario_from_flags(const AdHoc& a) {
    if (a.pbj_trace.empty() || a.ws_trace.empty() || a.regime.empty() || a.tuple.empty()) {
        throw Error(ErrorCategory::validation,
                    "run needs a scenario file, or --pbj-trace, --ws-trace, --regime and --tuple");
    }
    nlohmann::json j;
    j["name"] = a.name;
    j["pbj_trace"] = a.pbj_trace;
    j["ws_trace"] = a.ws_trace;
    j["window"] = {{"start", a.start}, {"duration", a.duration}};
    j["cpus_per_node"] = a.cpus_per_node;
    const auto sep = a.tuple.find(':');
    if (sep == std::string::npos) throw Error(ErrorCategory::validation, "--tuple must look like P:W");
    try {
        j["tuple"] = {std::stoll(a.tuple.substr(0, sep)), std::stoll(a.tuple.substr(sep + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCategory::validation, "--tuple must look like P:W");
    }
    j["regime"] = a.regime;
    if (a.config_size > 0) j["config_size"] = a.config_size;
    if (!a.params.empty()) j["params"] = a.params;
    j["output"] = {{"dir", "."}};
    if (!a.event_log.empty()) j["output"]["event_log"] = a.event_log;
    auto s = scenario_from_json(j, fs::current_path());
    validate(s);
    return s;
}

std::vector<std::string> split_values(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::size_t from = 0;
        while (from <= item.size()) {
            const auto comma = item.find(',', from);
            const auto token = item.substr(from, comma == std::string::npos ? std::string::npos : comma - from);
            if (!token.empty()) out.push_back(token);
            if (comma == std::string::npos) break;
            from = comma + 1;
        }
    }
    return out;
}

void print_summary(const ScenarioResult& r, const std::vector<fs::path>& written) {
    std::cout << csv_header() << '\n' << csv_row(r.label, r.run.report) << '\n';
    for (const auto& p : written) std::cerr << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-provisioning simulator for batch jobs and web services"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run one scenario");
    std::string run_path;
    std::string run_out;
    AdHoc adhoc;
    run_cmd->add_option("scenario", run_path, "Scenario JSON file");
    run_cmd->add_option("--out-dir", run_out, "Output directory (overrides the scenario and COPROV_OUTPUT_DIR)");
    run_cmd->add_option("--pbj-trace", adhoc.pbj_trace, "SWF job trace (flags-only mode)");
    run_cmd->add_option("--ws-trace", adhoc.ws_trace, "time,demand CSV (flags-only mode)");
    run_cmd->add_option("--regime", adhoc.regime, "DCS, FB, FLB_NUB or EC2RS");
    run_cmd->add_option("--tuple", adhoc.tuple, "PRC_PBJ:PRC_WS");
    run_cmd->add_option("--config", adhoc.config_size, "FB configuration size");
    run_cmd->add_option("--params", adhoc.params, "Compact policy notation, e.g. B25/U1.2/V0.2/G0.5/L60");
    run_cmd->add_option("--start", adhoc.start, "Window start offset in seconds");
    run_cmd->add_option("--duration", adhoc.duration, "Window duration in seconds");
    run_cmd->add_option("--cpus-per-node", adhoc.cpus_per_node, "CPU divisor for job sizes");
    run_cmd->add_option("--name", adhoc.name, "Scenario name used for output files");
    run_cmd->add_option("--event-log", adhoc.event_log, "Event log file name (JSON lines)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a one-parameter sweep");
    std::string sweep_path;
    std::string axis_name;
    std::vector<std::string> raw_values;
    std::string sweep_out;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep_cmd->add_option("scenario", sweep_path, "Base scenario JSON file")->required();
    auto* axis_opt = sweep_cmd->add_option("--axis", axis_name, "B, U, V, G, L (minutes) or tuple (P:W)");
    sweep_cmd->add_option("--values", raw_values, "Comma-separated values")->needs(axis_opt);
    sweep_cmd->add_option("--jobs", jobs, "Concurrent sweep points");
    sweep_cmd->add_option("--out-dir", sweep_out, "Output directory");

    auto* validate_cmd = app.add_subcommand("validate", "Check one agreement, or pair two");
    std::vector<std::string> agreement_paths;
    validate_cmd->add_option("agreements", agreement_paths, "Agreement files (XML or JSON)")->required()->expected(1, 2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const Scenario s = run_path.empty() ? scenario_from_flags(adhoc) : load_scenario(run_path);
            const auto result = execute(s);
            const auto out_dir = env_output_dir(run_out);
            print_summary(result, write_outputs(s, result, out_dir));
        } else if (sweep_cmd->parsed()) {
            const Scenario base = load_scenario(sweep_path);
            if (axis_name.empty()) {
                if (!base.sweep) throw Error(ErrorCategory::validation, "no --axis given and the scenario has no sweep");
                axis_name = base.sweep->axis;
                raw_values = base.sweep->values;
            } else if (raw_values.empty()) {
                throw Error(ErrorCategory::validation, "--axis needs --values");
            }
            const SweepAxis axis = parse_sweep_axis(axis_name);
            const auto points = sweep(base, axis, split_values(raw_values), jobs);
            const std::string table = sweep_csv(axis, points);
            const fs::path dir = env_output_dir(sweep_out).value_or(base.output.dir);
            const fs::path path = dir / (base.name + "_sweep_" + std::string(to_string(axis)) + ".csv");
            fs::create_directories(dir);
            std::ofstream out(path, std::ios::binary);
            if (!out || !(out << table)) throw Error(ErrorCategory::io, "cannot write '" + path.string() + "'");
            std::cout << table;
            std::cerr << "wrote " << path.string() << '\n';
        } else if (validate_cmd->parsed()) {
            std::vector<REAgreement> parsed;
            for (const auto& p : agreement_paths) {
                parsed.push_back(parse_agreement_file(p));
                validate(parsed.back());
                std::cout << p << ": " << agreement_to_json(parsed.back()).dump() << '\n';
            }
            if (parsed.size() == 2) {
                const auto plan = pair_coordinated(parsed[0], parsed[1]);
                std::cout << "coordination: " << to_string(plan.model) << " pool_size=" << plan.pool_size << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "coprov: " << to_string(e.category()) << ": " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "coprov: io error: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
