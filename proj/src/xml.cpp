#include "swsforge/xml.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>

#include "swsforge/error.hpp"
#include "swsforge/names.hpp"

namespace swsforge::xml {

namespace {

constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

struct RawAttribute {
    std::string name;
    std::string value;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Element parse_document() {
        skip_bom();
        skip_misc();
        if (at_end() || peek() != '<') fail("expected root element");
        Element root = parse_element({{"xml", std::string(kXmlNs)}});
        skip_misc();
        if (!at_end()) fail("content after root element");
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[noreturn]] void fail(const std::string& msg) const { throw XmlSyntaxError(msg, line_, col_); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    char advance() {
        if (at_end()) fail("unexpected end of document");
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void expect(std::string_view s) {
        if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
        for (std::size_t i = 0; i < s.size(); ++i) advance();
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())) != 0) advance();
    }

    void skip_bom() {
        if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
    }

    void skip_until(std::string_view terminator) {
        while (!starts_with(terminator)) advance();
        expect(terminator);
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<!DOCTYPE")) {
                fail("DTD is not supported");
            } else {
                return;
            }
        }
    }

    void skip_comment() {
        expect("<!--");
        while (!starts_with("-->")) {
            if (starts_with("--")) fail("'--' inside comment");
            advance();
        }
        expect("-->");
    }

    std::string parse_name() {
        const std::size_t start = pos_;
        while (!at_end()) {
            const auto c = static_cast<unsigned char>(peek());
            if (std::isalnum(c) != 0 || c == '_' || c == '-' || c == '.' || c == ':' || c >= 0x80) {
                advance();
            } else {
                break;
            }
        }
        if (start == pos_) fail("expected a name");
        std::string name(text_.substr(start, pos_ - start));
        const auto colon = name.find(':');
        const bool ok = colon == std::string::npos
                            ? is_ncname(name)
                            : is_ncname(std::string_view(name).substr(0, colon)) &&
                                  is_ncname(std::string_view(name).substr(colon + 1));
        if (!ok) fail("invalid name '" + name + "'");
        return name;
    }

    void parse_reference(std::string& out) {
        expect("&");
        if (peek() == '#') {
            advance();
            int base = 10;
            if (peek() == 'x') {
                advance();
                base = 16;
            }
            std::string digits;
            while (!at_end() && peek() != ';') digits += advance();
            expect(";");
            if (digits.empty()) fail("empty character reference");
            std::uint32_t cp = 0;
            for (char d : digits) {
                const auto c = static_cast<unsigned char>(d);
                std::uint32_t v = 0;
                if (std::isdigit(c) != 0) {
                    v = c - '0';
                } else if (base == 16 && std::isxdigit(c) != 0) {
                    v = static_cast<std::uint32_t>(std::tolower(c) - 'a' + 10);
                } else {
                    fail("invalid character reference");
                }
                cp = cp * static_cast<std::uint32_t>(base) + v;
                if (cp > 0x10FFFF) fail("character reference out of range");
            }
            append_utf8(out, cp);
            return;
        }
        std::string name;
        while (!at_end() && peek() != ';') name += advance();
        expect(";");
        if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "amp") out += '&';
        else if (name == "quot") out += '"';
        else if (name == "apos") out += '\'';
        else fail("undefined entity '" + name + "'");
    }

    std::string parse_attribute_value() {
        const char quote = peek();
        if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
        advance();
        std::string value;
        while (peek() != quote) {
            if (at_end()) fail("unterminated attribute value");
            if (peek() == '<') fail("'<' in attribute value");
            if (peek() == '&') {
                parse_reference(value);
                continue;
            }
            const char c = advance();
            value += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
        }
        advance();
        return value;
    }

    static std::pair<std::string, std::string> split_qname(const std::string& name) {
        const auto colon = name.find(':');
        if (colon == std::string::npos) return {"", name};
        return {name.substr(0, colon), name.substr(colon + 1)};
    }

    Element parse_element(std::map<std::string, std::string> scope) {
        Element el;
        el.line = line_;
        el.column = col_;
        expect("<");
        const std::string name = parse_name();
        std::vector<RawAttribute> raw;
        for (;;) {
            const std::size_t before = pos_;
            skip_ws();
            if (peek() == '>' || peek() == '/') break;
            if (before == pos_) fail("expected whitespace before attribute");
            RawAttribute a;
            a.name = parse_name();
            skip_ws();
            expect("=");
            skip_ws();
            a.value = parse_attribute_value();
            for (const auto& other : raw)
                if (other.name == a.name) fail("duplicate attribute '" + a.name + "'");
            raw.push_back(std::move(a));
        }

        for (const auto& a : raw) {
            if (a.name == "xmlns") {
                scope[""] = a.value;
            } else if (a.name.rfind("xmlns:", 0) == 0) {
                if (a.value.empty()) fail("empty namespace binding for '" + a.name + "'");
                scope[a.name.substr(6)] = a.value;
            }
        }

        auto [prefix, local] = split_qname(name);
        const auto bound = scope.find(prefix);
        if (!prefix.empty() && bound == scope.end()) fail("unbound prefix '" + prefix + "'");
        el.prefix = prefix;
        el.local = local;
        el.ns = bound == scope.end() ? "" : bound->second;

        for (auto& a : raw) {
            if (a.name == "xmlns" || a.name.rfind("xmlns:", 0) == 0) continue;
            auto [apfx, alocal] = split_qname(a.name);
            Attribute attr{apfx, alocal, "", std::move(a.value)};
            if (!apfx.empty()) {
                const auto it = scope.find(apfx);
                if (it == scope.end()) fail("unbound prefix '" + apfx + "'");
                attr.ns = it->second;
            }
            for (const auto& other : el.attributes)
                if (other.ns == attr.ns && other.local == attr.local)
                    fail("duplicate attribute '" + a.name + "'");
            el.attributes.push_back(std::move(attr));
        }
        el.scope = scope;

        if (starts_with("/>")) {
            expect("/>");
            return el;
        }
        expect(">");
        for (;;) {
            if (at_end()) fail("unterminated element '" + name + "'");
            if (starts_with("</")) {
                expect("</");
                const std::string closing = parse_name();
                if (closing != name) fail("mismatched closing tag '" + closing + "' for '" + name + "'");
                skip_ws();
                expect(">");
                return el;
            }
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<![CDATA[")) {
                expect("<![CDATA[");
                while (!starts_with("]]>")) el.text += advance();
                expect("]]>");
            } else if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!")) {
                fail("unsupported markup declaration");
            } else if (peek() == '<') {
                el.children.push_back(parse_element(scope));
            } else if (peek() == '&') {
                parse_reference(el.text);
            } else {
                const char c = advance();
                el.text += c;
            }
        }
    }
};

void canonical_into(const Element& el, std::ostringstream& out, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out << indent << el.expanded_name();
    std::vector<std::pair<std::string, std::string>> attrs;
    for (const auto& a : el.attributes)
        attrs.emplace_back(a.ns.empty() ? a.local : "{" + a.ns + "}" + a.local, a.value);
    std::sort(attrs.begin(), attrs.end());
    for (const auto& [k, v] : attrs) out << " " << k << "=\"" << escape(v, true) << "\"";
    const std::string text = trim(el.text);
    if (!text.empty()) out << " text=\"" << escape(text, true) << "\"";
    out << "\n";
    for (const auto& child : el.children) canonical_into(child, out, depth + 1);
}

void write_tag(const Tag& tag, std::string& out, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out += indent + "<" + tag.name;
    for (const auto& [k, v] : tag.attributes) out += " " + k + "=\"" + escape(v, true) + "\"";
    if (tag.children.empty() && !tag.text) {
        out += "/>\n";
        return;
    }
    out += ">";
    if (tag.text) out += escape(*tag.text, false);
    if (!tag.children.empty()) {
        out += "\n";
        for (const auto& child : tag.children) write_tag(child, out, depth + 1);
        out += indent;
    }
    out += "</" + tag.name + ">\n";
}

}  // namespace

const std::string* Element::attribute(std::string_view local_name) const {
    for (const auto& a : attributes)
        if (a.ns.empty() && a.local == local_name) return &a.value;
    return nullptr;
}

const std::string* Element::attribute(std::string_view namespace_uri, std::string_view local_name) const {
    for (const auto& a : attributes)
        if (a.ns == namespace_uri && a.local == local_name) return &a.value;
    return nullptr;
}

std::optional<QName> Element::resolve(std::string_view qname_value) const {
    const std::string value = trim(qname_value);
    const auto colon = value.find(':');
    const std::string prefix = colon == std::string::npos ? "" : value.substr(0, colon);
    const std::string local = colon == std::string::npos ? value : value.substr(colon + 1);
    const auto it = scope.find(prefix);
    if (it == scope.end()) {
        if (!prefix.empty()) return std::nullopt;
        return QName{"", local};
    }
    return QName{it->second, local};
}

std::string Element::expanded_name() const {
    return ns.empty() ? local : "{" + ns + "}" + local;
}

Element parse(std::string_view document) {
    return Parser(document).parse_document();
}

std::string canonical_form(const Element& root) {
    std::ostringstream out;
    canonical_into(root, out, 0);
    return out.str();
}

std::string escape(std::string_view text, bool attribute) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += attribute ? "&quot;" : "\""; break;
            case '\n': out += attribute ? "&#10;" : "\n"; break;
            case '\t': out += attribute ? "&#9;" : "\t"; break;
            case '\r': out += "&#13;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string write_document(const Tag& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_tag(root, out, 0);
    return out;
}

}  // namespace swsforge::xml
