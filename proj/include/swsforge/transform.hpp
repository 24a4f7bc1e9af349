#pragma once

// Model-to-model transformation between the service model and the SAWSDL
// description tree, in both directions.

#include <string>
#include <string_view>
#include <vector>

#include "swsforge/pim.hpp"
#include "swsforge/sawsdl.hpp"

namespace swsforge::transform {

struct TransformRule {
    std::string rule_id;
    std::string source_kind;   // profile element, e.g. "SemanticConcept"
    std::string source_type;   // "Stereotype", "Tag Value" or "Derived"
    std::string target_kind;   // metaclass, e.g. "SAWSDLModelReference"
    std::string description;

    bool operator==(const TransformRule&) const = default;
};

/// Connects a model entity to the description node a rule produced from it.
struct TraceLink {
    std::string rule_id;
    std::string source_path;
    std::string target_path;

    bool operator==(const TraceLink&) const = default;
};

struct TransformResult {
    sawsdl::WSDLDescription description;
    std::vector<TraceLink> links;
};

/// One rule per mapping row of the profile plus the pattern-derivation rule.
/// Stable order.
const std::vector<TransformRule>& list_rules();

/// Target namespace of the description generated for a service.
std::string description_namespace(std::string_view model_namespace, std::string_view service_name);

/// Throws UnknownService or InvalidModel.
TransformResult pim_to_psm(const pim::ServiceModel& model, std::string_view service_name);

/// Reverse direction. Every interface becomes an atomic service. When the
/// description holds a single interface and its target namespace has the
/// shape produced by pim_to_psm, the service name and model namespace are
/// recovered from it. Throws AmbiguousReverse.
pim::ServiceModel psm_to_pim(const sawsdl::WSDLDescription& desc);

/// Whether a trace path names an entity of the model / description.
bool resolves(const pim::ServiceModel& model, std::string_view path);
bool resolves(const sawsdl::WSDLDescription& desc, std::string_view path);

}  // namespace swsforge::transform
