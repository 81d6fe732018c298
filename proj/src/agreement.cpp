#include "coprov/agreement.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "coprov/error.hpp"

namespace coprov {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void unknown_token(std::string_view what, std::string_view token) {
    throw Error(ErrorCategory::validation,
                "unknown " + std::string(what) + " '" + std::string(token) + "'");
}

bool parse_flag(std::string_view element, std::string_view value) {
    const auto v = lower(value);
    if (v == "yes" || v == "true" || v == "1") return true;
    if (v == "no" || v == "false" || v == "0" || v.empty()) return false;
    unknown_token(std::string(element) + " flag", value);
}

std::optional<Nodes> parse_bound(std::string_view element, std::string_view value, bool nullable) {
    if (nullable && (value.empty() || lower(value) == "null" || lower(value) == "undefined")) {
        return std::nullopt;
    }
    Nodes v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error(ErrorCategory::validation,
                    "non-integer " + std::string(element) + " '" + std::string(value) + "'");
    }
    return v;
}

// Element name -> raw value, in the tolerant tag grammar of the agreement files.
std::map<std::string, std::string, std::less<>> scan_elements(std::string_view text) {
    std::map<std::string, std::string, std::less<>> fields;
    bool saw_root = false;
    std::size_t pos = 0;
    while (true) {
        const auto lt = text.find('<', pos);
        if (lt == std::string_view::npos) break;
        const auto gt = text.find('>', lt);
        if (gt == std::string_view::npos) {
            throw Error(ErrorCategory::parse, "unterminated tag at offset " + std::to_string(lt));
        }
        auto content = trim(text.substr(lt + 1, gt - lt - 1));
        pos = gt + 1;
        if (content.empty() || content.front() == '?' || content.front() == '!' || content.front() == '/') {
            continue;
        }
        if (content.back() == '/') content = trim(content.substr(0, content.size() - 1));
        if (content == "RE_agreement") {
            saw_root = true;
            continue;
        }
        std::string name;
        std::string_view value;
        if (const auto eq = content.find('='); eq != std::string_view::npos) {
            name = std::string(trim(content.substr(0, eq)));
            value = trim(content.substr(eq + 1));
            if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
                value.back() == value.front()) {
                value = trim(value.substr(1, value.size() - 2));
            }
        } else {
            name = std::string(content.substr(0, content.find_first_of(" \t\r\n")));
            const auto next = text.find('<', pos);
            value = trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        }
        if (!fields.emplace(name, std::string(value)).second) {
            throw Error(ErrorCategory::parse, "duplicate element '" + name + "'");
        }
    }
    if (!saw_root) throw Error(ErrorCategory::parse, "missing RE_agreement root element");
    return fields;
}

}  // namespace

std::string_view to_string(Relationship v) {
    switch (v) {
        case Relationship::same: return "same";
        case Relationship::affiliated: return "affiliated";
        case Relationship::business: return "business";
    }
    return "?";
}

std::string_view to_string(WorkloadType v) {
    return v == WorkloadType::parallel_batch_jobs ? "parallel_batch_jobs" : "web_services";
}

std::string_view to_string(Granularity v) {
    return v == Granularity::node ? "node" : "virtual_machine";
}

std::string_view to_string(CoordinationModel v) {
    return v == CoordinationModel::FB ? "FB" : "FLB_NUB";
}

Relationship parse_relationship(std::string_view token) {
    const auto t = trim(token);
    if (t == "same") return Relationship::same;
    if (t == "affiliated") return Relationship::affiliated;
    if (t == "business") return Relationship::business;
    unknown_token("relationship", t);
}

WorkloadType parse_workload_type(std::string_view token) {
    const auto t = trim(token);
    if (t == "parallel_batch_jobs") return WorkloadType::parallel_batch_jobs;
    if (t == "web_services") return WorkloadType::web_services;
    unknown_token("workload type", t);
}

Granularity parse_granularity(std::string_view token) {
    const auto t = trim(token);
    if (t == "node") return Granularity::node;
    if (t == "virtual_machine") return Granularity::virtual_machine;
    unknown_token("granularity", t);
}

CoordinationModel parse_coordination_model(std::string_view token) {
    const auto t = trim(token);
    if (t == "FB") return CoordinationModel::FB;
    if (t == "FLB_NUB" || t == "FLB-NUB") return CoordinationModel::FLB_NUB;
    unknown_token("resource coordination model", t);
}

void validate(const REAgreement& a) {
    if (a.lower_bound < 0) {
        throw Error(ErrorCategory::invariant, "lower bound must be >= 0, got " + std::to_string(a.lower_bound));
    }
    if (a.model == CoordinationModel::FB) {
        if (!a.upper_bound || *a.upper_bound != a.lower_bound) {
            throw Error(ErrorCategory::invariant,
                        "FB agreement needs upper bound equal to lower bound " + std::to_string(a.lower_bound));
        }
    } else if (a.upper_bound) {
        throw Error(ErrorCategory::invariant, "FLB_NUB agreement must leave the upper bound undefined");
    }
}

REAgreement parse_agreement(std::string_view text) {
    const auto body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::parse, e.what());
        }
        return agreement_from_json(j);
    }

    const auto fields = scan_elements(body);
    auto required = [&](std::string_view name) -> const std::string& {
        auto it = fields.find(name);
        if (it == fields.end()) {
            throw Error(ErrorCategory::validation, "missing element '" + std::string(name) + "'");
        }
        return it->second;
    };
    auto optional = [&](std::string_view name) -> const std::string* {
        auto it = fields.find(name);
        return it == fields.end() ? nullptr : &it->second;
    };

    REAgreement a;
    a.relationship = parse_relationship(required("relationship"));
    a.workload_type = parse_workload_type(required("type"));
    if (const auto* g = optional("granularity")) a.granularity = parse_granularity(*g);
    if (const auto* c = optional("coordinated_RE")) a.coordinated.same_provider = parse_flag("coordinated_RE", *c);
    if (const auto* c = optional("cross_provider_coordination")) {
        a.coordinated.cross_provider = parse_flag("cross_provider_coordination", *c);
    }
    a.model = parse_coordination_model(required("resource_coordination_model"));
    a.lower_bound = *parse_bound("lower_bound_size", required("lower_bound_size"), false);
    if (const auto* u = optional("upper_bound_size")) a.upper_bound = parse_bound("upper_bound_size", *u, true);
    if (const auto* s = optional("setup_policy")) a.setup_policy = *s;
    validate(a);
    return a;
}

REAgreement parse_agreement_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_agreement(buf.str());
}

std::string serialize_agreement(const REAgreement& a) {
    auto yes_no = [](bool b) { return b ? "Yes" : "No"; };
    std::ostringstream out;
    out << "<RE_agreement>\n"
        << "<relationship=\"" << to_string(a.relationship) << "\"></relationship>\n"
        << "<type=\"" << to_string(a.workload_type) << "\"></type>\n"
        << "<coordinated_RE=\"" << yes_no(a.coordinated.same_provider) << "\"></coordinated_RE>\n"
        << "<cross_provider_coordination=\"" << yes_no(a.coordinated.cross_provider)
        << "\"></cross_provider_coordination>\n"
        << "<granularity=\"" << to_string(a.granularity) << "\"></granularity>\n"
        << "<resource_coordination_model=\"" << to_string(a.model) << "\"></resource_coordination_model>\n"
        << "<lower_bound_size=\"" << a.lower_bound << "\"></lower_bound_size>\n";
    if (a.upper_bound) {
        out << "<upper_bound_size=\"" << *a.upper_bound << "\"></upper_bound_size>\n";
    } else {
        out << "<upper_bound_size=null></upper_bound_size>\n";
    }
    out << "<setup_policy=\"" << a.setup_policy << "\"></setup_policy>\n"
        << "</RE_agreement>\n";
    return out.str();
}

nlohmann::json agreement_to_json(const REAgreement& a) {
    nlohmann::json j;
    j["relationship"] = to_string(a.relationship);
    j["type"] = to_string(a.workload_type);
    j["granularity"] = to_string(a.granularity);
    j["coordinated_RE"] = a.coordinated.same_provider;
    j["cross_provider_coordination"] = a.coordinated.cross_provider;
    j["resource_coordination_model"] = to_string(a.model);
    j["lower_bound_size"] = a.lower_bound;
    j["upper_bound_size"] = a.upper_bound ? nlohmann::json(*a.upper_bound) : nlohmann::json(nullptr);
    j["setup_policy"] = a.setup_policy;
    return j;
}

REAgreement agreement_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCategory::parse, "agreement JSON must be an object");
    auto text = [&](const char* key) -> std::string {
        if (!j.contains(key)) throw Error(ErrorCategory::validation, std::string("missing field '") + key + "'");
        if (!j[key].is_string()) throw Error(ErrorCategory::validation, std::string("field '") + key + "' must be a string");
        return j[key].get<std::string>();
    };
    auto flag = [&](const char* key) {
        if (!j.contains(key)) return false;
        const auto& v = j[key];
        if (v.is_boolean()) return v.get<bool>();
        if (v.is_string()) return parse_flag(key, v.get<std::string>());
        throw Error(ErrorCategory::validation, std::string("field '") + key + "' must be a flag");
    };
    REAgreement a;
    a.relationship = parse_relationship(text("relationship"));
    a.workload_type = parse_workload_type(text("type"));
    if (j.contains("granularity")) a.granularity = parse_granularity(text("granularity"));
    a.coordinated.same_provider = flag("coordinated_RE");
    a.coordinated.cross_provider = flag("cross_provider_coordination");
    a.model = parse_coordination_model(text("resource_coordination_model"));
    if (!j.contains("lower_bound_size") || !j["lower_bound_size"].is_number_integer()) {
        throw Error(ErrorCategory::validation, "lower_bound_size must be an integer");
    }
    a.lower_bound = j["lower_bound_size"].get<Nodes>();
    if (j.contains("upper_bound_size") && !j["upper_bound_size"].is_null()) {
        if (!j["upper_bound_size"].is_number_integer()) {
            throw Error(ErrorCategory::validation, "upper_bound_size must be an integer or null");
        }
        a.upper_bound = j["upper_bound_size"].get<Nodes>();
    }
    if (j.contains("setup_policy")) a.setup_policy = text("setup_policy");
    validate(a);
    return a;
}

std::string_view to_string(TREState v) {
    switch (v) {
        case TREState::uninitialized: return "uninitialized";
        case TREState::created: return "created";
        case TREState::running: return "running";
    }
    return "?";
}

std::string_view to_string(LifecycleEvent v) {
    switch (v) {
        case LifecycleEvent::create: return "create";
        case LifecycleEvent::deploy: return "deploy";
        case LifecycleEvent::activate: return "activate";
        case LifecycleEvent::deactivate: return "deactivate";
        case LifecycleEvent::destroy: return "destroy";
    }
    return "?";
}

TREState lifecycle_step(TREState state, LifecycleEvent event) {
    using S = TREState;
    using E = LifecycleEvent;
    if (state == S::uninitialized && event == E::create) return S::uninitialized;
    if (state == S::uninitialized && event == E::deploy) return S::created;
    if (state == S::created && event == E::activate) return S::running;
    if (state == S::running && event == E::deactivate) return S::created;
    if (state == S::created && event == E::destroy) return S::uninitialized;
    throw Error(ErrorCategory::transition, "illegal transition (" + std::string(to_string(state)) + ", " +
                                               std::string(to_string(event)) + ")");
}

CoordinationPlan pair_coordinated(const REAgreement& a, const REAgreement& b) {
    auto allows = [](const REAgreement& x) { return x.coordinated.same_provider || x.coordinated.cross_provider; };
    if (!allows(a) || !allows(b)) {
        throw Error(ErrorCategory::pairing, "both agreements must allow coordination");
    }
    if (a.model != b.model) {
        throw Error(ErrorCategory::pairing, "coordination models differ: " + std::string(to_string(a.model)) +
                                                " vs " + std::string(to_string(b.model)));
    }
    if (a.workload_type == b.workload_type) {
        throw Error(ErrorCategory::pairing, "coordinated REs must carry different workload types");
    }
    return CoordinationPlan{a.model, a.lower_bound + b.lower_bound};
}

}  // namespace coprov
