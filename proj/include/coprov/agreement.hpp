#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "coprov/trace.hpp"

namespace coprov {

enum class Relationship { same, affiliated, business };
enum class WorkloadType { parallel_batch_jobs, web_services };
enum class Granularity { node, virtual_machine };
enum class CoordinationModel { FB, FLB_NUB };

struct CoordinationFlags {
    bool same_provider = false;   // has a coordinated RE of the same service provider
    bool cross_provider = false;  // may be coordinated with another provider's RE

    friend bool operator==(const CoordinationFlags&, const CoordinationFlags&) = default;
};

/// A runtime-environment agreement between a service provider and the
/// resource provider.
///
/// FB agreements fix both bounds to the same size; FLB_NUB agreements leave
/// the upper bound undefined. A VM is accounted as one node.
struct REAgreement {
    Relationship relationship = Relationship::same;
    WorkloadType workload_type = WorkloadType::parallel_batch_jobs;
    Granularity granularity = Granularity::node;
    CoordinationFlags coordinated;
    CoordinationModel model = CoordinationModel::FLB_NUB;
    Nodes lower_bound = 0;
    std::optional<Nodes> upper_bound;
    std::string setup_policy = "NOOP";

    friend bool operator==(const REAgreement&, const REAgreement&) = default;
};

std::string_view to_string(Relationship v);
std::string_view to_string(WorkloadType v);
std::string_view to_string(Granularity v);
std::string_view to_string(CoordinationModel v);

/// Throws Error(validation) naming the unknown token.
Relationship parse_relationship(std::string_view token);
WorkloadType parse_workload_type(std::string_view token);
Granularity parse_granularity(std::string_view token);
CoordinationModel parse_coordination_model(std::string_view token);

/// Checks the bound invariants; throws Error(invariant).
void validate(const REAgreement& agreement);

/// Parses the XML agreement shape (`<relationship="business"></relationship>`
/// and friends, under an RE_agreement root). Plain element text
/// (`<type>web_services</type>`) is accepted too. Input starting with '{' is
/// read as the JSON mirror instead.
REAgreement parse_agreement(std::string_view text);
REAgreement parse_agreement_file(const std::string& path);

std::string serialize_agreement(const REAgreement& agreement);

nlohmann::json agreement_to_json(const REAgreement& agreement);
REAgreement agreement_from_json(const nlohmann::json& j);

enum class TREState { uninitialized, created, running };
enum class LifecycleEvent { create, deploy, activate, deactivate, destroy };

std::string_view to_string(TREState v);
std::string_view to_string(LifecycleEvent v);

/// One step of the thin-RE lifecycle. `create` only registers the account and
/// leaves the state uninitialized. Throws Error(transition) on any pair not in
/// the machine.
TREState lifecycle_step(TREState state, LifecycleEvent event);

struct CoordinationPlan {
    CoordinationModel model = CoordinationModel::FLB_NUB;
    Nodes pool_size = 0;

    friend bool operator==(const CoordinationPlan&, const CoordinationPlan&) = default;
};

/// Pairs a PBJ agreement with a WS agreement; the shared pool is the sum of
/// the two lower bounds.
CoordinationPlan pair_coordinated(const REAgreement& a, const REAgreement& b);

}  // namespace coprov
