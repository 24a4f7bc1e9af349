#pragma once

// WSDL 2.0 description tree with SAWSDL annotations, and its XML form.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swsforge/error.hpp"

namespace swsforge::sawsdl {

inline constexpr std::string_view kMepInOnly = "http://www.w3.org/ns/wsdl/in-only";
inline constexpr std::string_view kMepRobustInOnly = "http://www.w3.org/ns/wsdl/robust-in-only";
inline constexpr std::string_view kMepInOut = "http://www.w3.org/ns/wsdl/in-out";
inline constexpr std::string_view kMepInOptOut = "http://www.w3.org/ns/wsdl/in-opt-out";
/// Short form some generators write for in-only; normalized on parse.
inline constexpr std::string_view kMepInAbbreviated = "http://www.w3.org/ns/wsdl/in";

bool is_supported_pattern(std::string_view uri);

/// sawsdl:modelReference value: a non-empty list of concept URIs.
struct ModelReference {
    std::vector<std::string> uris;

    bool operator==(const ModelReference&) const = default;
};

/// xs:element child of a complex sequence; `type` is a built-in local name.
struct SchemaChild {
    std::string name;
    std::string type;

    bool operator==(const SchemaChild&) const = default;
};

using SimpleContent = std::string;  // built-in type local name
using ComplexContent = std::vector<SchemaChild>;

struct XMLSchemaElement {
    std::string name;
    std::variant<SimpleContent, ComplexContent> content;
    std::optional<ModelReference> model_reference;
    std::vector<std::string> lowering_schema_mapping;
    std::vector<std::string> lifting_schema_mapping;

    bool is_simple() const { return std::holds_alternative<SimpleContent>(content); }

    bool operator==(const XMLSchemaElement&) const = default;
};

struct FaultReference {
    std::string fault;
    std::optional<std::string> message_label;

    bool operator==(const FaultReference&) const = default;
};

struct WSDLOperation {
    std::string name;
    std::string pattern;
    std::optional<std::string> input;   // schema element name
    std::optional<std::string> output;  // schema element name
    // Model-side parameter names, kept only when they differ from the element
    // name so the reverse transformation is lossless.
    std::optional<std::string> input_param;
    std::optional<std::string> output_param;
    std::vector<FaultReference> infaults;
    std::vector<FaultReference> outfaults;
    std::optional<ModelReference> model_reference;

    bool operator==(const WSDLOperation&) const = default;
};

struct WSDLInterfaceFault {
    std::string name;
    std::optional<std::string> element;
    std::optional<ModelReference> model_reference;

    bool operator==(const WSDLInterfaceFault&) const = default;
};

struct WSDLInterface {
    std::string name;
    std::vector<WSDLInterfaceFault> faults;
    std::vector<WSDLOperation> operations;
    std::optional<ModelReference> model_reference;

    const WSDLInterfaceFault* find_fault(std::string_view fault_name) const;

    bool operator==(const WSDLInterface&) const = default;
};

struct WSDLDescription {
    std::string target_namespace;
    std::vector<XMLSchemaElement> schema_elements;
    std::vector<WSDLInterface> interfaces;

    const XMLSchemaElement* find_element(std::string_view element_name) const;

    bool operator==(const WSDLDescription&) const = default;
};

/// Invariant check shared by the emitter and the parser.
ValidationReport check(const WSDLDescription& desc);

/// Deterministic XML rendering. Throws InvariantViolation.
std::string emit_sawsdl(const WSDLDescription& desc);

/// Namespace-driven parse of the supported subset.
/// Throws XmlSyntaxError, MissingNamespace, UnsupportedFeature or
/// InvariantViolation.
WSDLDescription parse_sawsdl(std::string_view xml);

/// Order-insensitive normal form: named collections sorted by name, URI
/// lists sorted and deduplicated, strings trimmed. Sequence children keep
/// their order. Idempotent.
WSDLDescription canonicalize(WSDLDescription desc);

}  // namespace swsforge::sawsdl
