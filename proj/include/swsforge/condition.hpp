#pragma once

// Condition language shared by behavior edges, BPEL if/while conditions,
// assign operands and stub guards:
//
//   expr       := conj ('or' conj)*
//   conj       := term ('and' term)*
//   term       := ['not'] comparison
//   comparison := path op literal
//   path       := '$' var ('.' field)*
//   literal    := integer | "text" | true | false

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swsforge::condition {

using Value = std::variant<std::int64_t, std::string, bool>;

/// Flat record; nested fields use dotted keys ("card.number").
using Message = std::map<std::string, Value>;

/// Variable name to message.
using Environment = std::map<std::string, Message>;

struct Path {
    std::string variable;
    std::vector<std::string> fields;

    /// Dotted key into the variable's message.
    std::string key() const;
    std::string text() const;

    bool operator==(const Path&) const = default;
};

enum class Op { eq, ne, lt, le, gt, ge };

struct Comparison {
    bool negated = false;
    Path path;
    Op op = Op::eq;
    Value literal;

    bool operator==(const Comparison&) const = default;
};

/// Disjunction of conjunctions, as written.
struct Predicate {
    std::string text;
    std::vector<std::vector<Comparison>> disjuncts;

    std::set<std::string> variables() const;

    bool operator==(const Predicate& other) const { return disjuncts == other.disjuncts; }
};

/// Either a path or a literal; the right-hand side of an assignment.
struct Operand {
    std::optional<Path> path;
    Value literal;

    std::string text() const;

    bool operator==(const Operand&) const = default;
};

/// Throws SyntaxError (column is 1-based within the text).
Predicate parse(std::string_view text);
Path parse_path(std::string_view text);
/// A path or a literal in the grammar's syntax.
Operand parse_operand(std::string_view text);

/// A comparison whose path is absent from the environment is false (and its
/// negation true). Throws TypeMismatch when the stored value and the literal
/// differ in kind, or when booleans are ordered.
bool evaluate(const Predicate& predicate, const Environment& env);

/// Looks a path up; nullopt when the variable or field is absent.
std::optional<Value> lookup(const Path& path, const Environment& env);

std::string_view kind_name(const Value& v);
/// Literal syntax: 42, "text", true.
std::string literal_text(const Value& v);

}  // namespace swsforge::condition
