#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swsforge {

/// A single rule violation found by one of the validators.
///
/// Violations are data, not failures: validators return them in a report and
/// callers decide whether to abort.
struct Violation {
    std::string code;  // e.g. COMPOSITE_MIN_COMPONENTS
    std::string path;  // entity path, e.g. services/ElectronicSale
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Sorts by entity path, then rule code, then message.
void sort_report(ValidationReport& report);

std::string format_violation(const Violation& v);

/// Base of every error raised by the toolchain.
///
/// exit_code() follows the CLI contract: 1 for domain errors (the model is
/// wrong), 2 for input errors (the file could not be read or parsed).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, int exit_code = 1)
        : std::runtime_error(message), code_(std::move(code)), exit_code_(exit_code) {}

    const std::string& code() const noexcept { return code_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string code_;
    int exit_code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class XmlSyntaxError : public Error {
public:
    XmlSyntaxError(const std::string& message, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnresolvedReference : public Error {
public:
    UnresolvedReference(const std::string& identifier, const std::string& where)
        : Error("UNRESOLVED_REFERENCE", "unresolved reference '" + identifier + "' at " + where),
          identifier_(identifier) {}
    const std::string& identifier() const noexcept { return identifier_; }

private:
    std::string identifier_;
};

class DuplicateName : public Error {
public:
    DuplicateName(const std::string& name, const std::string& where)
        : Error("DUPLICATE_NAME", "duplicate name '" + name + "' at " + where) {}
};

/// Raised when an operation requires a valid model; carries the report.
class InvalidModel : public Error {
public:
    explicit InvalidModel(ValidationReport violations, const std::string& what = "invalid model");
    const ValidationReport& violations() const noexcept { return violations_; }

private:
    ValidationReport violations_;
};

class UnknownService : public Error {
public:
    explicit UnknownService(const std::string& name)
        : Error("UNKNOWN_SERVICE", "unknown service '" + name + "'") {}
};

class CompositionCycle : public Error {
public:
    explicit CompositionCycle(const std::string& name)
        : Error("COMPOSITION_CYCLE", "composition cycle through '" + name + "'") {}
};

class NotComposite : public Error {
public:
    explicit NotComposite(const std::string& name)
        : Error("NOT_COMPOSITE", "service '" + name + "' is not composite") {}
};

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& message)
        : Error("INVARIANT_VIOLATION", message) {}
};

class UnsupportedFeature : public Error {
public:
    explicit UnsupportedFeature(const std::string& element)
        : Error("UNSUPPORTED_FEATURE", "unsupported feature: " + element), element_(element) {}
    const std::string& element() const noexcept { return element_; }

private:
    std::string element_;
};

class MissingNamespace : public Error {
public:
    explicit MissingNamespace(const std::string& message)
        : Error("MISSING_NAMESPACE", message, 2) {}
};

class AmbiguousReverse : public Error {
public:
    explicit AmbiguousReverse(const std::string& node)
        : Error("AMBIGUOUS_REVERSE", "no model counterpart for " + node), node_(node) {}
    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

class UnstructuredGraph : public Error {
public:
    UnstructuredGraph(const std::string& entry, const std::string& detail)
        : Error("UNSTRUCTURED_GRAPH", "unstructured region at '" + entry + "': " + detail),
          entry_(entry) {}
    const std::string& entry() const noexcept { return entry_; }

private:
    std::string entry_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("IO_ERROR", message, 2) {}
};

class MissingStub : public Error {
public:
    MissingStub(const std::string& service, const std::string& operation)
        : Error("MISSING_STUB", "no stub for " + service + "." + operation, 2) {}
};

class TypeMismatch : public Error {
public:
    explicit TypeMismatch(const std::string& message) : Error("TYPE_MISMATCH", message, 2) {}
};

}  // namespace swsforge
