#pragma once

// Orchestration graph of a composite service (a BPMN subset), its validation
// and its decomposition into a well-nested structured form.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swsforge/condition.hpp"
#include "swsforge/error.hpp"
#include "swsforge/pim.hpp"

namespace swsforge::behavior {

enum class NodeKind {
    start_event,
    end_event,
    receive_task,
    reply_task,
    invoke_task,
    exclusive_gateway,
    parallel_gateway,
};

std::string_view to_string(NodeKind kind);
bool is_task(NodeKind kind);
bool is_gateway(NodeKind kind);

using Assignment = std::vector<std::pair<std::string, condition::Operand>>;

struct Node {
    std::string id;
    NodeKind kind = NodeKind::start_event;
    std::optional<std::string> label;
    std::string service;    // invoke
    std::string operation;  // receive: composite operation; invoke: component operation
    // receive: variable receiving the request; invoke: variable receiving the
    // response (or the fault record).
    std::optional<std::string> variable;
    Assignment assign;  // invoke: request fields; reply: response fields
    std::optional<std::string> fault;  // reply

    /// Label if set, otherwise the id.
    const std::string& display_label() const { return label ? *label : id; }

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::string from;
    std::string to;
    std::optional<condition::Predicate> condition;
    bool is_default = false;

    bool operator==(const Edge&) const = default;
};

struct Variable {
    std::string name;
    std::optional<std::string> type;  // data type name; absent for fault-only records

    bool operator==(const Variable&) const = default;
};

struct BehaviorModel {
    std::string process_name;
    std::vector<Variable> variables;
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    const Node* find_node(std::string_view id) const;
    const Variable* find_variable(std::string_view name) const;
    std::vector<const Edge*> outgoing(std::string_view id) const;
    std::vector<const Edge*> incoming(std::string_view id) const;

    bool operator==(const BehaviorModel&) const = default;
};

/// Parses the JSON behavior document and resolves edge endpoints.
/// Throws SyntaxError, DuplicateName or UnresolvedReference.
BehaviorModel parse_behavior(std::string_view document);

/// As above, and also binds invoke targets and variable types against the
/// model. Throws UnresolvedReference when they do not resolve.
BehaviorModel parse_behavior(std::string_view document, const pim::ServiceModel& model);

std::string serialize_behavior(const BehaviorModel& b);

/// Never throws; an empty report means the behavior is valid for the
/// composite. Sorted like pim::validate.
ValidationReport validate_behavior(const BehaviorModel& b, const pim::ServiceModel& model,
                                   std::string_view composite_name);

// ---------------------------------------------------------------- structured

struct Step;
using Block = std::vector<Step>;

struct Branch {
    condition::Predicate condition;
    Block body;

    bool operator==(const Branch&) const = default;
};

struct Step {
    enum class Kind { task, choice, parallel, loop };

    Kind kind = Kind::task;
    Node task;  // task
    std::string gateway;  // id of the split (choice, parallel) or loop header
    std::vector<Branch> branches;   // choice: in edge order; loop: exactly one
    std::optional<Block> otherwise; // choice: body of the default edge
    std::vector<Block> blocks;      // parallel

    bool operator==(const Step&) const = default;
};

struct StructuredBehavior {
    std::string process_name;
    std::vector<Variable> variables;
    Block body;

    bool operator==(const StructuredBehavior&) const = default;
};

/// Decomposes the graph into nested single-entry single-exit regions.
/// Throws UnstructuredGraph naming the entry of the offending region.
StructuredBehavior normalize_to_structured(const BehaviorModel& b);

/// Mechanical re-expansion of a structured tree into a graph. Task nodes keep
/// their ids; gateways and events get fresh ids.
BehaviorModel expand_to_graph(const StructuredBehavior& s);

/// Task nodes of the tree in document order.
std::vector<const Node*> leaves(const StructuredBehavior& s);

}  // namespace swsforge::behavior
