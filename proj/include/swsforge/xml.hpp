#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace swsforge::xml {

struct QName {
    std::string ns;
    std::string local;

    bool operator==(const QName&) const = default;
};

struct Attribute {
    std::string prefix;
    std::string local;
    std::string ns;  // empty for unprefixed attributes
    std::string value;
};

/// Namespace-resolved element of a parsed document.
struct Element {
    std::string prefix;
    std::string local;
    std::string ns;
    std::vector<Attribute> attributes;  // xmlns declarations excluded
    std::map<std::string, std::string> scope;  // in-scope prefix bindings; "" is the default namespace
    std::vector<Element> children;
    std::string text;  // direct character data, concatenated
    std::size_t line = 0;
    std::size_t column = 0;

    bool is(std::string_view namespace_uri, std::string_view local_name) const {
        return ns == namespace_uri && local == local_name;
    }

    /// Unqualified attribute by local name.
    const std::string* attribute(std::string_view local_name) const;
    const std::string* attribute(std::string_view namespace_uri, std::string_view local_name) const;

    /// Resolves a QName-valued attribute against this element's scope.
    /// Unprefixed values take the default namespace. Returns nullopt when the
    /// prefix is unbound.
    std::optional<QName> resolve(std::string_view qname_value) const;

    /// "{ns}local" or "local".
    std::string expanded_name() const;
};

/// Parses a complete document and returns its root element.
///
/// Supports elements, attributes, character data, CDATA, comments, processing
/// instructions and the predefined plus numeric character references. DTDs
/// are rejected. Throws XmlSyntaxError with a line and column.
Element parse(std::string_view document);

/// Whitespace-, prefix- and attribute-order-insensitive rendering of a
/// parsed tree, suitable for structural comparison of two documents.
std::string canonical_form(const Element& root);

/// Output tree for the emitters. Attributes are written in insertion order.
struct Tag {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Tag> children;
    std::optional<std::string> text;

    Tag& attr(std::string key, std::string value) {
        attributes.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Tag& add(Tag child) {
        children.push_back(std::move(child));
        return children.back();
    }
};

/// Serializes with a UTF-8 declaration and two-space indentation.
std::string write_document(const Tag& root);

std::string escape(std::string_view text, bool attribute);

}  // namespace swsforge::xml
