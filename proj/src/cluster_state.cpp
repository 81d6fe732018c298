#include "coprov/cluster_state.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "coprov/error.hpp"

namespace coprov {

namespace {

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double number_or_throw(std::string_view token, std::string_view text) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
        throw Error(ErrorCategory::validation, "bad policy component '" + std::string(token) + "'");
    }
    return v;
}

}  // namespace

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::DCS: return "DCS";
        case Regime::FB: return "FB";
        case Regime::FLB_NUB: return "FLB_NUB";
        case Regime::EC2RS: return "EC2RS";
    }
    return "?";
}

Regime parse_regime(std::string_view token) {
    if (token == "DCS") return Regime::DCS;
    if (token == "FB") return Regime::FB;
    if (token == "FLB_NUB" || token == "FLB-NUB") return Regime::FLB_NUB;
    if (token == "EC2RS" || token == "EC2+RightScale") return Regime::EC2RS;
    throw Error(ErrorCategory::validation, "unknown regime '" + std::string(token) + "'");
}

void validate(const PolicyParams& p) {
    if (p.pool_size < 0) throw Error(ErrorCategory::validation, "B must be >= 0");
    if (!(p.request_ratio > 0) || !(p.release_ratio > 0)) {
        throw Error(ErrorCategory::validation, "U and V must be positive");
    }
    if (!(p.release_ratio < p.request_ratio)) {
        throw Error(ErrorCategory::validation, "V must be smaller than U");
    }
    if (!(p.elastic_factor > 0 && p.elastic_factor < 1)) {
        throw Error(ErrorCategory::validation, "G must lie in (0, 1)");
    }
    if (p.lease_unit <= 0) throw Error(ErrorCategory::validation, "L must be positive");
}

PolicyParams parse_policy_params(std::string_view notation, PolicyParams defaults,
                                 std::optional<Nodes> prc_sum) {
    PolicyParams p = defaults;
    std::size_t pos = 0;
    while (pos < notation.size()) {
        auto end = notation.find_first_of("/_", pos);
        if (end == std::string_view::npos) end = notation.size();
        const auto token = notation.substr(pos, end - pos);
        pos = end + 1;
        if (token.empty()) continue;
        if (token.starts_with("BR")) {
            if (!prc_sum) throw Error(ErrorCategory::validation, "BR needs the (PRC_PBJ, PRC_WS) tuple");
            const double ratio = number_or_throw(token, token.substr(2));
            p.pool_size = static_cast<Nodes>(std::floor(ratio * static_cast<double>(*prc_sum) + 1e-9));
            continue;
        }
        const double v = number_or_throw(token, token.substr(1));
        switch (token.front()) {
            case 'B':
                if (v != std::floor(v)) throw Error(ErrorCategory::validation, "B must be integral");
                p.pool_size = static_cast<Nodes>(v);
                break;
            case 'U': p.request_ratio = v; break;
            case 'V': p.release_ratio = v; break;
            case 'G': p.elastic_factor = v; break;
            case 'L': p.lease_unit = static_cast<Seconds>(std::llround(v * 60.0)); break;
            default:
                throw Error(ErrorCategory::validation, "bad policy component '" + std::string(token) + "'");
        }
    }
    return p;
}

std::string format_policy_params(const PolicyParams& p) {
    return "B" + std::to_string(p.pool_size) + "/U" + shortest(p.request_ratio) + "/V" +
           shortest(p.release_ratio) + "/G" + shortest(p.elastic_factor) + "/L" +
           shortest(static_cast<double>(p.lease_unit) / 60.0);
}

std::string_view to_string(Actor actor) {
    switch (actor) {
        case Actor::pbj_manager: return "pbj_manager";
        case Actor::ws_manager: return "ws_manager";
        case Actor::provision_service: return "provision_service";
    }
    return "?";
}

void AdjustmentLog::record(Seconds time, Actor actor, Nodes delta) {
    if (delta == 0) throw Error(ErrorCategory::kernel, "zero-sized adjustment");
    entries_.push_back({time, actor, delta});
}

Nodes ClusterState::free_nodes() const {
    return config_size ? *config_size - pbj_owned - ws_held : 0;
}

Nodes ClusterState::allocated_to_running() const {
    return std::accumulate(running.begin(), running.end(), Nodes{0},
                           [](Nodes acc, const RunningJob& r) { return acc + r.allocated; });
}

}  // namespace coprov
