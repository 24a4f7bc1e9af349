#pragma once

// Compilation of a structured behavior into the composite's process WSDL
// (imports and partner link types) and a WS-BPEL 2.0 process document.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swsforge/behavior.hpp"
#include "swsforge/pim.hpp"

namespace swsforge::bpel {

// ------------------------------------------------------------------ naming

namespace naming {

std::string interface_link_type(std::string_view process);                       // <P>AndInterface
std::string interface_role(std::string_view process);                            // <P>_for_Interface
std::string interface_port_type(std::string_view process);                       // <P>:ForInterface
std::string component_link_type(std::string_view process, std::string_view service);  // <P>AndProcessForPortType<S>SoapPlk
std::string component_role(std::string_view process);                            // Process1_for_<P>
std::string component_port_type(std::string_view service);                       // tns:<S>ServiceSoap
/// lowerFirst(link type, "Plk" suffix ensured) + "Var".
std::string partner_link(std::string_view link_type);
/// Inverse of component_port_type; nullopt for other port types.
std::optional<std::string> service_of_port_type(std::string_view port_type);

std::string process_namespace(std::string_view model_namespace, std::string_view composite, std::string_view process);

}  // namespace naming

// ------------------------------------------------------------ process WSDL

struct Import {
    std::string namespace_uri;
    std::string location;
    std::optional<std::string> import_type;  // BPEL imports only

    bool operator==(const Import&) const = default;
};

struct PartnerLinkType {
    std::string name;
    std::string role;
    std::string port_type;

    bool operator==(const PartnerLinkType&) const = default;
};

struct ProcessWSDL {
    std::string name;  // process name
    std::string target_namespace;
    std::vector<Import> imports;
    std::vector<PartnerLinkType> partner_link_types;

    bool operator==(const ProcessWSDL&) const = default;
};

/// Imports: the composite's own interface description first, then one per
/// atomic service of its composition closure. Link types: one per closure
/// service, then the process interface. Throws UnknownService, NotComposite
/// or InvariantViolation.
ProcessWSDL gen_process_wsdl(const pim::ServiceModel& model, std::string_view composite_name);

std::string emit_process_wsdl(const ProcessWSDL& wsdl);

// ------------------------------------------------------------ BPEL process

struct PartnerLink {
    std::string name;
    std::string partner_link_type;
    std::optional<std::string> my_role;
    std::optional<std::string> partner_role;

    bool operator==(const PartnerLink&) const = default;
};

struct VariableDecl {
    std::string name;
    std::optional<std::string> message_type;
    std::optional<std::string> element;
    std::optional<std::string> type;
    /// Message shape (field name, built-in type), carried for the simulator.
    std::vector<pim::Field> fields;

    bool operator==(const VariableDecl&) const = default;
};

/// <copy>: from a whole variable or from an operand in the condition
/// language's syntax; to a whole variable or one of its fields.
struct Copy {
    std::optional<std::string> from_variable;
    std::optional<std::string> from_expression;
    std::string to_variable;
    std::optional<std::string> to_part;

    bool operator==(const Copy&) const = default;
};

struct Activity {
    enum class Kind { sequence, flow, if_, while_, receive, invoke, reply, assign };

    Kind kind = Kind::sequence;
    std::optional<std::string> name;
    std::optional<std::string> label;    // bpmn:label
    std::optional<std::string> bpmn_id;  // bpmn:id
    std::string partner_link;
    std::string port_type;
    std::string operation;
    std::optional<std::string> variable;         // receive, reply
    std::optional<std::string> input_variable;   // invoke
    std::optional<std::string> output_variable;  // invoke
    std::optional<std::string> fault_name;       // reply
    bool create_instance = false;
    std::vector<Copy> copies;
    /// if: one per conditional branch; while: exactly one.
    std::vector<std::string> conditions;
    /// sequence/flow: members; if: branch bodies, then the else body when
    /// has_else; while: the body.
    std::vector<Activity> children;
    bool has_else = false;

    bool operator==(const Activity&) const = default;
};

struct BPELDocument {
    std::string name;
    std::string target_namespace;
    std::string interface_namespace;  // bound to the "this" prefix
    std::vector<Import> imports;
    std::vector<PartnerLink> partner_links;
    std::vector<VariableDecl> variables;
    Activity body;

    const VariableDecl* find_variable(std::string_view name) const;
    const PartnerLink* find_partner_link(std::string_view name) const;

    bool operator==(const BPELDocument&) const = default;
};

/// Throws UnknownService, NotComposite or InvariantViolation.
BPELDocument gen_bpel(const pim::ServiceModel& model, const behavior::StructuredBehavior& structured,
                      std::string_view composite_name);

std::string emit_bpel(const BPELDocument& doc);

/// Reads a document written by emit_bpel. Throws XmlSyntaxError,
/// MissingNamespace or UnsupportedFeature.
BPELDocument parse_bpel(std::string_view xml);

/// Checks the document's own invariants (declared partner links and
/// variables, leading createInstance receive). Empty when sound.
ValidationReport check(const BPELDocument& doc);

/// Validates, normalizes and writes <C>.wsdl, <C>-Process.wsdl and <C>.bpel
/// into out_dir. Returns the written paths in that order. Throws InvalidModel
/// for model or behavior violations, UnstructuredGraph, IoError and the
/// errors of the generators.
std::vector<std::filesystem::path> emit_process_artifacts(const pim::ServiceModel& model,
                                                          const behavior::BehaviorModel& behavior,
                                                          std::string_view composite_name,
                                                          const std::filesystem::path& out_dir);

}  // namespace swsforge::bpel
