#include "swsforge/condition.hpp"

#include <cctype>
#include <charconv>

#include "swsforge/error.hpp"
#include "swsforge/names.hpp"

namespace swsforge::condition {

namespace {

enum class Tok { path, integer, text, word, op, end };

struct Token {
    Tok kind;
    std::string value;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::size_t col = pos_ + 1;
        if (pos_ >= s_.size()) return {Tok::end, "", col};
        const char c = s_[pos_];
        if (c == '$') {
            std::size_t end = pos_ + 1;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_' ||
                                       s_[end] == '-' || s_[end] == '.'))
                ++end;
            Token t{Tok::path, std::string(s_.substr(pos_, end - pos_)), col};
            pos_ = end;
            return t;
        }
        if (c == '"') {
            std::string out;
            ++pos_;
            while (true) {
                if (pos_ >= s_.size()) throw SyntaxError("unterminated text literal", 1, col);
                const char d = s_[pos_++];
                if (d == '"') break;
                if (d == '\\') {
                    if (pos_ >= s_.size()) throw SyntaxError("unterminated text literal", 1, col);
                    out += s_[pos_++];
                } else {
                    out += d;
                }
            }
            return {Tok::text, out, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            std::size_t end = pos_ + 1;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
            Token t{Tok::integer, std::string(s_.substr(pos_, end - pos_)), col};
            pos_ = end;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
            Token t{Tok::word, std::string(s_.substr(pos_, end - pos_)), col};
            pos_ = end;
            return t;
        }
        for (const char* op : {"!=", "<=", ">=", "=", "<", ">"}) {
            const std::string_view o(op);
            if (s_.substr(pos_, o.size()) == o) {
                pos_ += o.size();
                return {Tok::op, std::string(o), col};
            }
        }
        throw SyntaxError(std::string("unexpected character '") + c + "' in condition", 1, col);
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

Path path_from_token(const Token& t) {
    Path p;
    std::string_view body = std::string_view(t.value).substr(1);
    std::size_t start = 0;
    bool first = true;
    while (true) {
        const auto dot = body.find('.', start);
        const auto seg = body.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        if (!is_path_identifier(seg)) throw SyntaxError("malformed path '" + t.value + "'", 1, t.column);
        if (first) {
            p.variable = std::string(seg);
            first = false;
        } else {
            p.fields.emplace_back(seg);
        }
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return p;
}

std::optional<Value> literal_from_token(const Token& t) {
    switch (t.kind) {
        case Tok::text:
            return Value{t.value};
        case Tok::integer: {
            std::int64_t v = 0;
            const auto* first = t.value.data();
            const auto* last = first + t.value.size();
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last) throw SyntaxError("malformed integer '" + t.value + "'", 1, t.column);
            return Value{v};
        }
        case Tok::word:
            if (t.value == "true") return Value{true};
            if (t.value == "false") return Value{false};
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) { advance(); }

    Predicate predicate() {
        Predicate p;
        p.disjuncts.push_back(conjunction());
        while (is_word("or")) {
            advance();
            p.disjuncts.push_back(conjunction());
        }
        expect_end();
        return p;
    }

    Operand operand() {
        Operand o;
        if (cur_.kind == Tok::path) {
            o.path = path_from_token(cur_);
        } else if (auto lit = literal_from_token(cur_)) {
            o.literal = *lit;
        } else {
            throw SyntaxError("expected a path or a literal", 1, cur_.column);
        }
        advance();
        expect_end();
        return o;
    }

    Path path() {
        if (cur_.kind != Tok::path) throw SyntaxError("expected a path", 1, cur_.column);
        Path p = path_from_token(cur_);
        advance();
        expect_end();
        return p;
    }

private:
    void advance() { cur_ = lex_.next(); }
    bool is_word(const char* w) const { return cur_.kind == Tok::word && cur_.value == w; }

    void expect_end() {
        if (cur_.kind != Tok::end) throw SyntaxError("unexpected '" + cur_.value + "' in condition", 1, cur_.column);
    }

    std::vector<Comparison> conjunction() {
        std::vector<Comparison> out{comparison()};
        while (is_word("and")) {
            advance();
            out.push_back(comparison());
        }
        return out;
    }

    Comparison comparison() {
        Comparison c;
        if (is_word("not")) {
            c.negated = true;
            advance();
        }
        if (cur_.kind != Tok::path) throw SyntaxError("expected a path", 1, cur_.column);
        c.path = path_from_token(cur_);
        advance();
        if (cur_.kind != Tok::op) throw SyntaxError("expected a comparison operator", 1, cur_.column);
        const std::string& op = cur_.value;
        c.op = op == "=" ? Op::eq : op == "!=" ? Op::ne : op == "<" ? Op::lt : op == "<=" ? Op::le : op == ">" ? Op::gt : Op::ge;
        advance();
        auto lit = literal_from_token(cur_);
        if (!lit) throw SyntaxError("expected a literal", 1, cur_.column);
        c.literal = *lit;
        advance();
        return c;
    }

    Lexer lex_;
    Token cur_{Tok::end, "", 0};
};

template <typename T>
bool compare(const T& a, const T& b, Op op) {
    switch (op) {
        case Op::eq: return a == b;
        case Op::ne: return a != b;
        case Op::lt: return a < b;
        case Op::le: return a <= b;
        case Op::gt: return a > b;
        case Op::ge: return a >= b;
    }
    return false;
}

bool evaluate_comparison(const Comparison& c, const Environment& env) {
    const auto value = lookup(c.path, env);
    bool result = false;
    if (value) {
        if (value->index() != c.literal.index())
            throw TypeMismatch("'" + c.path.text() + "' holds " + std::string(kind_name(*value)) + ", compared with " +
                               std::string(kind_name(c.literal)) + " " + literal_text(c.literal));
        if (const auto* b = std::get_if<bool>(&*value)) {
            if (c.op != Op::eq && c.op != Op::ne) throw TypeMismatch("booleans support only = and !=");
            result = compare(*b, std::get<bool>(c.literal), c.op);
        } else if (const auto* i = std::get_if<std::int64_t>(&*value)) {
            result = compare(*i, std::get<std::int64_t>(c.literal), c.op);
        } else {
            result = compare(std::get<std::string>(*value), std::get<std::string>(c.literal), c.op);
        }
    }
    return c.negated ? !result : result;
}

}  // namespace

std::string Path::key() const {
    std::string out;
    for (const auto& f : fields) {
        if (!out.empty()) out += '.';
        out += f;
    }
    return out;
}

std::string Path::text() const {
    std::string out = "$" + variable;
    for (const auto& f : fields) out += "." + f;
    return out;
}

std::set<std::string> Predicate::variables() const {
    std::set<std::string> out;
    for (const auto& conj : disjuncts)
        for (const auto& c : conj) out.insert(c.path.variable);
    return out;
}

std::string Operand::text() const { return path ? path->text() : literal_text(literal); }

Predicate parse(std::string_view text) {
    Predicate p = Parser(text).predicate();
    p.text = trim(text);
    return p;
}

Path parse_path(std::string_view text) { return Parser(text).path(); }

Operand parse_operand(std::string_view text) { return Parser(text).operand(); }

std::optional<Value> lookup(const Path& path, const Environment& env) {
    const auto var = env.find(path.variable);
    if (var == env.end()) return std::nullopt;
    const auto field = var->second.find(path.key());
    if (field == var->second.end()) return std::nullopt;
    return field->second;
}

bool evaluate(const Predicate& predicate, const Environment& env) {
    for (const auto& conj : predicate.disjuncts) {
        bool all = true;
        for (const auto& c : conj) {
            if (!evaluate_comparison(c, env)) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

std::string_view kind_name(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return "integer";
    if (std::holds_alternative<bool>(v)) return "boolean";
    return "text";
}

std::string literal_text(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    std::string out = "\"";
    for (const char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace swsforge::condition
