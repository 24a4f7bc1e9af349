#pragma once

// Platform-independent model of atomic and composite semantic Web services,
// its validation rules and the JSON model document that carries it.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swsforge/error.hpp"

namespace swsforge::pim {

enum class ServiceKind { atomic, composite };
enum class Direction { in, out };
enum class TypeKind { simple, complex };

/// Concept URIs attached to an interface, operation or data type. URIs are
/// opaque; only their syntax is checked.
struct SemanticAnnotation {
    std::vector<std::string> concept_uris;

    bool operator==(const SemanticAnnotation&) const = default;
};

/// Two-way mapping between a data type and its semantic concept.
struct Mapping {
    std::optional<std::string> lowering_schema;
    std::optional<std::string> lifting_schema;

    bool operator==(const Mapping&) const = default;
};

struct Parameter {
    std::string name;
    std::string type_ref;
    Direction direction = Direction::in;

    bool operator==(const Parameter&) const = default;
};

struct Fault {
    std::string name;
    std::optional<std::string> type_ref;
    Direction direction = Direction::out;

    bool operator==(const Fault&) const = default;
};

struct Operation {
    std::string name;
    std::vector<Parameter> inputs;
    std::vector<Parameter> outputs;
    std::vector<Fault> infaults;
    std::vector<Fault> outfaults;
    std::optional<SemanticAnnotation> annotation;

    bool operator==(const Operation&) const = default;
};

struct Interface {
    std::string name;
    std::vector<Operation> operations;
    std::optional<SemanticAnnotation> annotation;

    const Operation* find_operation(std::string_view op_name) const;

    bool operator==(const Interface&) const = default;
};

struct Service {
    std::string name;
    ServiceKind kind = ServiceKind::atomic;
    Interface interface;
    std::vector<std::string> components;
    std::optional<std::string> behavior_ref;

    bool operator==(const Service&) const = default;
};

/// A complex-type field. Field types are XML Schema built-in local names.
struct Field {
    std::string name;
    std::string type;

    bool operator==(const Field&) const = default;
};

struct DataType {
    std::string name;
    TypeKind kind = TypeKind::simple;
    std::optional<std::string> base_type;  // simple only
    std::vector<Field> fields;             // complex only
    std::optional<SemanticAnnotation> annotation;
    std::optional<Mapping> mapping;

    bool operator==(const DataType&) const = default;
};

struct ServiceModel {
    std::string namespace_uri;
    std::vector<Service> services;
    std::vector<DataType> data_types;

    const Service* find_service(std::string_view name) const;
    const DataType* find_type(std::string_view name) const;

    bool operator==(const ServiceModel&) const = default;
};

struct ParseOptions {
    /// Unknown object keys are a SyntaxError when set; ignored otherwise.
    bool strict = true;
};

/// Parses a model document and binds every name reference.
/// Throws SyntaxError, UnresolvedReference or DuplicateName.
ServiceModel parse_model(std::string_view document, const ParseOptions& options = {});

/// Canonical JSON document for a valid model. Throws InvalidModel.
std::string serialize_model(const ServiceModel& model);

/// Checks every metamodel invariant. Never throws; the report is sorted by
/// entity path, then rule code.
ValidationReport validate(const ServiceModel& model);

/// Atomic services reached from `service_name`, depth-first in declaration
/// order, each listed once. An atomic service is its own closure.
/// Throws UnknownService or CompositionCycle.
std::vector<std::string> composition_closure(const ServiceModel& model, std::string_view service_name);

/// Data types referenced by the service's interface, in model declaration
/// order.
std::vector<std::string> reachable_types(const ServiceModel& model, const Service& service);

/// The model cut down to one service and the types its interface reaches.
ServiceModel restrict_to(const ServiceModel& model, std::string_view service_name);

/// Field shape of a message carrying a value of the named type: the fields
/// of a complex type, or a single field named after a simple type. Empty
/// when the type is unknown.
std::vector<Field> message_fields(const ServiceModel& model, std::string_view type_name);

std::string_view to_string(ServiceKind kind);
std::string_view to_string(TypeKind kind);

}  // namespace swsforge::pim
