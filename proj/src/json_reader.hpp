#pragma once

// Strict reading helpers over nlohmann::json for the JSON input documents.

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "swsforge/error.hpp"

namespace swsforge::detail {

using Json = nlohmann::json;

/// Parses text, mapping parser failures to SyntaxError with line/column.
Json parse_json(std::string_view text);

/// Tracks which keys of a JSON object were consumed so unknown keys can be
/// reported in strict mode.
class ObjectReader {
public:
    ObjectReader(const Json& value, std::string path, bool strict);

    const std::string& path() const { return path_; }

    std::string required_string(const char* key);
    std::optional<std::string> optional_string(const char* key);
    const Json& required(const char* key);
    const Json* optional(const char* key);
    /// Missing key yields an empty array.
    const Json& array(const char* key);
    std::optional<bool> optional_bool(const char* key);

    /// Throws SyntaxError for unconsumed keys in strict mode.
    void finish() const;

private:
    const Json& value_;
    std::string path_;
    bool strict_;
    std::set<std::string> seen_;
};

std::string expect_string(const Json& value, const std::string& path);

}  // namespace swsforge::detail
