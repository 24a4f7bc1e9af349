#include "swsforge/names.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "swsforge/error.hpp"

namespace swsforge {

namespace {

bool is_name_start(unsigned char c) {
    return std::isalpha(c) != 0 || c == '_' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
    return is_name_start(c) || std::isdigit(c) != 0 || c == '-' || c == '.';
}

bool is_uri_char(unsigned char c) {
    if (std::isalnum(c) != 0) return true;
    constexpr std::string_view allowed = "-._~:/?#[]@!$&'()*+,;=%";
    return allowed.find(static_cast<char>(c)) != std::string_view::npos;
}

constexpr std::array<std::string_view, 12> kIntegerTypes = {
    "integer", "int",          "long",         "short",           "byte",          "nonNegativeInteger",
    "positiveInteger", "negativeInteger", "nonPositiveInteger", "unsignedInt", "unsignedLong", "unsignedShort"};

constexpr std::array<std::string_view, 14> kOtherTypes = {
    "string",  "boolean", "decimal",  "float",        "double",    "date",    "dateTime",
    "time",    "anyURI",  "token",    "base64Binary", "hexBinary", "QName",   "normalizedString"};

}  // namespace

bool is_ncname(std::string_view s) {
    if (s.empty() || !is_name_start(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return is_name_char(static_cast<unsigned char>(c)); });
}

bool is_absolute_uri(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    if (std::isalpha(static_cast<unsigned char>(s[0])) == 0) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (std::isalnum(c) == 0 && c != '+' && c != '-' && c != '.') return false;
    }
    if (colon + 1 >= s.size()) return false;
    for (std::size_t i = colon + 1; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (!is_uri_char(c)) return false;
        if (c == '%') {
            if (i + 2 >= s.size() || std::isxdigit(static_cast<unsigned char>(s[i + 1])) == 0 ||
                std::isxdigit(static_cast<unsigned char>(s[i + 2])) == 0)
                return false;
        }
    }
    return true;
}

bool is_path_identifier(std::string_view s) {
    if (s.empty()) return false;
    const auto first = static_cast<unsigned char>(s.front());
    if (std::isalpha(first) == 0 && first != '_') return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
        const auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) != 0 || c == '_' || c == '-';
    });
}

bool is_xsd_builtin(std::string_view local_name) {
    return std::find(kIntegerTypes.begin(), kIntegerTypes.end(), local_name) != kIntegerTypes.end() ||
           std::find(kOtherTypes.begin(), kOtherTypes.end(), local_name) != kOtherTypes.end();
}

ValueKind value_kind_of_builtin(std::string_view local_name) {
    if (std::find(kIntegerTypes.begin(), kIntegerTypes.end(), local_name) != kIntegerTypes.end())
        return ValueKind::integer;
    if (local_name == "boolean") return ValueKind::boolean;
    return ValueKind::text;
}

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::integer: return "integer";
        case ValueKind::boolean: return "boolean";
        case ValueKind::text: return "text";
    }
    return "text";
}

std::string to_ncname(std::string_view s) {
    std::string out;
    for (const char c : s) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
        out += keep ? c : '_';
    }
    if (out.empty() || !(std::isalpha(static_cast<unsigned char>(out[0])) || out[0] == '_')) out.insert(out.begin(), '_');
    return out;
}

std::string trim(std::string_view s) {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    auto b = std::find_if_not(s.begin(), s.end(), is_space);
    auto e = std::find_if_not(s.rbegin(), std::string_view::reverse_iterator(b), is_space).base();
    return std::string(b, e);
}

std::string lower_first(std::string_view s) {
    std::string out(s);
    if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
    return out;
}

std::string upper_first(std::string_view s) {
    std::string out(s);
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

// error.hpp support lives here to keep the library's translation units few.

void sort_report(ValidationReport& report) {
    std::stable_sort(report.begin(), report.end(), [](const Violation& a, const Violation& b) {
        if (a.path != b.path) return a.path < b.path;
        if (a.code != b.code) return a.code < b.code;
        return a.message < b.message;
    });
}

std::string format_violation(const Violation& v) {
    return v.code + " " + v.path + " " + v.message;
}

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : Error("SYNTAX_ERROR",
            line > 0 ? message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                     : message,
            2),
      line_(line),
      column_(column) {}

XmlSyntaxError::XmlSyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : Error("XML_SYNTAX_ERROR",
            message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")", 2),
      line_(line),
      column_(column) {}

InvalidModel::InvalidModel(ValidationReport violations, const std::string& what)
    : Error("INVALID_MODEL",
            [&] {
                std::string msg = what;
                for (const auto& v : violations) msg += "\n  " + format_violation(v);
                return msg;
            }()),
      violations_(std::move(violations)) {}

}  // namespace swsforge
