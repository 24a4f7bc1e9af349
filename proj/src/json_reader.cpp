#include "json_reader.hpp"

namespace swsforge::detail {

namespace {

const Json& empty_array() {
    static const Json value = Json::array();
    return value;
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw SyntaxError("malformed JSON", line, column);
    }
}

ObjectReader::ObjectReader(const Json& value, std::string path, bool strict)
    : value_(value), path_(std::move(path)), strict_(strict) {
    if (!value_.is_object()) throw SyntaxError(path_ + ": expected an object");
}

const Json* ObjectReader::optional(const char* key) {
    seen_.insert(key);
    const auto it = value_.find(key);
    if (it == value_.end() || it->is_null()) return nullptr;
    return &*it;
}

const Json& ObjectReader::required(const char* key) {
    const Json* v = optional(key);
    if (v == nullptr) throw SyntaxError(path_ + ": missing required key '" + key + "'");
    return *v;
}

std::string ObjectReader::required_string(const char* key) {
    return expect_string(required(key), path_ + "/" + key);
}

std::optional<std::string> ObjectReader::optional_string(const char* key) {
    const Json* v = optional(key);
    if (v == nullptr) return std::nullopt;
    return expect_string(*v, path_ + "/" + key);
}

const Json& ObjectReader::array(const char* key) {
    const Json* v = optional(key);
    if (v == nullptr) return empty_array();
    if (!v->is_array()) throw SyntaxError(path_ + "/" + key + ": expected an array");
    return *v;
}

std::optional<bool> ObjectReader::optional_bool(const char* key) {
    const Json* v = optional(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) throw SyntaxError(path_ + "/" + key + ": expected a boolean");
    return v->get<bool>();
}

void ObjectReader::finish() const {
    if (!strict_) return;
    for (const auto& [key, _] : value_.items())
        if (seen_.count(key) == 0) throw SyntaxError(path_ + ": unknown key '" + key + "'");
}

std::string expect_string(const Json& value, const std::string& path) {
    if (!value.is_string()) throw SyntaxError(path + ": expected a string");
    return value.get<std::string>();
}

}  // namespace swsforge::detail
