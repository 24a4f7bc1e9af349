#pragma once

// Desk-scale interpreter for generated BPEL processes. Partner services are
// replaced by table-driven stubs; the result is a deterministic trace.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swsforge/bpel.hpp"
#include "swsforge/condition.hpp"

namespace swsforge::sim {

using condition::Message;

struct StubCase {
    /// Guard over `$request`; absent on the default case.
    std::optional<condition::Predicate> when;
    Message respond;
    std::optional<std::string> fault;

    bool operator==(const StubCase&) const = default;
};

struct Stub {
    std::string service;
    std::string operation;
    std::vector<StubCase> cases;  // the last one is guard-free

    bool operator==(const Stub&) const = default;
};

struct StubRegistry {
    std::vector<Stub> stubs;

    const Stub* find(std::string_view service, std::string_view operation) const;
};

/// `{stubs:[{service, operation, cases:[{when?, respond?, fault?}]}]}`.
/// Throws SyntaxError, including for a case list without a final default.
StubRegistry parse_stubs(std::string_view json);

/// A JSON object of literals; nested objects flatten to dotted keys.
/// Throws SyntaxError.
Message parse_message(std::string_view json);

struct Event {
    enum class Kind { received, invoked, evaluated, replied, completed, faulted };

    Kind kind = Kind::completed;
    std::string label;      // received, invoked, replied
    std::string service;    // invoked
    std::string operation;  // invoked
    Message request;        // invoked
    Message message;        // received, replied; invoked: the response
    std::optional<std::string> fault;  // invoked (stub fault), replied (fault reply)
    std::string condition;             // evaluated
    bool value = false;                // evaluated
    std::string name;                  // faulted
    std::string detail;                // faulted

    bool operator==(const Event&) const = default;
};

using ExecutionTrace = std::vector<Event>;

std::string_view to_string(Event::Kind kind);

/// Faulted names raised by the interpreter itself.
inline constexpr std::string_view kNoMatchingBranch = "NO_MATCHING_BRANCH";
inline constexpr std::string_view kLoopLimit = "LOOP_LIMIT";
inline constexpr std::string_view kSelectionFailure = "SELECTION_FAILURE";

struct Options {
    std::size_t loop_limit = 10000;  // iterations per while traversal
};

/// Runs the process once on `initial`. Throws MissingStub when an invoke
/// target has no stub, TypeMismatch when `initial` does not fit the receive
/// message or a comparison mixes kinds. Runtime faults end the trace with a
/// Faulted event instead of throwing.
ExecutionTrace simulate(const bpel::BPELDocument& doc, const StubRegistry& stubs, const Message& initial,
                        const Options& options = {});

/// One JSON object per line.
std::string to_jsonl(const ExecutionTrace& trace);

/// Matches an event when every set field agrees.
struct EventMatcher {
    Event::Kind kind;
    std::optional<std::string> service;
    std::optional<std::string> operation;
    std::optional<std::string> fault;  // "" matches only events without a fault
    std::optional<std::string> condition;
    std::optional<bool> value;
    std::optional<std::string> name;

    std::string describe() const;
};

struct TraceMatch {
    bool ok = true;
    std::string diagnostic;  // first matcher that found no event, and where the search stopped
};

/// Ordered-subsequence match: each matcher takes the first matching event
/// after the previous match.
TraceMatch assert_trace(const ExecutionTrace& trace, const std::vector<EventMatcher>& pattern);

}  // namespace swsforge::sim
