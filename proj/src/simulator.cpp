#include "swsforge/simulator.hpp"

#include <map>
#include <set>

#include "json_reader.hpp"
#include "swsforge/names.hpp"

namespace swsforge::sim {

using condition::Environment;
using condition::Value;
using detail::Json;
using detail::ObjectReader;

namespace {

void flatten(const Json& j, const std::string& prefix, Message& out, const std::string& where) {
    if (!j.is_object()) throw SyntaxError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!is_path_identifier(key)) throw SyntaxError(where + ": '" + key + "' is not a field name");
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten(value, name, out, where);
        } else if (value.is_boolean()) {
            out[name] = value.get<bool>();
        } else if (value.is_number_integer()) {
            out[name] = value.get<std::int64_t>();
        } else if (value.is_string()) {
            out[name] = value.get<std::string>();
        } else {
            throw SyntaxError(where + ": field '" + name + "' is not an integer, text or boolean");
        }
    }
}

Json message_json(const Message& m) {
    auto j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m) std::visit([&](const auto& x) { j[k] = x; }, v);
    return j;
}

ValueKind kind_of(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return ValueKind::integer;
    if (std::holds_alternative<bool>(v)) return ValueKind::boolean;
    return ValueKind::text;
}

Event event(Event::Kind kind) {
    Event e;
    e.kind = kind;
    return e;
}

struct RuntimeFault {
    std::string name;
    std::string detail;
};

struct Frame;

struct Thread {
    std::vector<Frame> stack;
};

struct Frame {
    explicit Frame(const bpel::Activity* a) : activity(a) {}

    const bpel::Activity* activity;
    std::size_t next = 0;
    bool started = false;
    std::size_t iterations = 0;
    std::vector<Thread> threads;
    std::size_t cursor = 0;
};

class Interpreter {
public:
    Interpreter(const bpel::BPELDocument& doc, const StubRegistry& stubs, const Message& initial, const Options& options)
        : doc_(doc), stubs_(stubs), initial_(initial), options_(options) {}

    ExecutionTrace run() {
        precheck(doc_.body);
        check_initial();
        Thread main;
        main.stack.emplace_back(&doc_.body);
        try {
            while (step(main)) {
            }
            trace_.push_back(event(Event::Kind::completed));
        } catch (const RuntimeFault& f) {
            Event e = event(Event::Kind::faulted);
            e.name = f.name;
            e.detail = f.detail;
            trace_.push_back(std::move(e));
        }
        return std::move(trace_);
    }

private:
    static std::string label_of(const bpel::Activity& a) {
        if (a.label) return *a.label;
        if (a.name) return *a.name;
        return a.operation;
    }

    std::string service_of(const bpel::Activity& a) const {
        const auto s = bpel::naming::service_of_port_type(a.port_type);
        if (!s) throw InvariantViolation("invoke port type '" + a.port_type + "' names no partner service");
        return *s;
    }

    void precheck(const bpel::Activity& a) {
        if (a.kind == bpel::Activity::Kind::invoke) {
            const auto service = service_of(a);
            if (stubs_.find(service, a.operation) == nullptr) throw MissingStub(service, a.operation);
        }
        if (a.kind == bpel::Activity::Kind::receive && receive_ == nullptr) receive_ = &a;
        for (const auto& c : a.children) precheck(c);
    }

    void check_initial() const {
        if (receive_ == nullptr || !receive_->variable) throw InvariantViolation("process has no receive");
        const auto* decl = doc_.find_variable(*receive_->variable);
        if (decl == nullptr || decl->fields.empty()) return;
        std::set<std::string> expected;
        for (const auto& f : decl->fields) {
            expected.insert(f.name);
            const auto it = initial_.find(f.name);
            if (it == initial_.end()) throw TypeMismatch("input message lacks field '" + f.name + "'");
            const auto want = value_kind_of_builtin(f.type);
            if (kind_of(it->second) != want)
                throw TypeMismatch("input field '" + f.name + "' is " + std::string(condition::kind_name(it->second)) +
                                   ", expected " + std::string(to_string(want)));
        }
        for (const auto& [k, _] : initial_)
            if (expected.count(k) == 0) throw TypeMismatch("input field '" + k + "' is not part of the request message");
    }

    bool evaluate(const std::string& text) {
        const bool value = condition::evaluate(condition::parse(text), env_);
        Event e = event(Event::Kind::evaluated);
        e.condition = text;
        e.value = value;
        trace_.push_back(std::move(e));
        return value;
    }

    const Message& read(const std::string& variable) const {
        const auto it = env_.find(variable);
        if (it == env_.end()) throw RuntimeFault{std::string(kSelectionFailure), "variable '" + variable + "' is uninitialized"};
        return it->second;
    }

    void store_part(const std::string& variable, const std::string& part, const Value& v) {
        if (const auto* decl = doc_.find_variable(variable)) {
            for (const auto& f : decl->fields) {
                if (f.name == part && kind_of(v) != value_kind_of_builtin(f.type))
                    throw TypeMismatch("copy of a " + std::string(condition::kind_name(v)) + " into " + variable + "." + part +
                                       " of type " + f.type);
            }
        }
        env_[variable][part] = v;
    }

    void copy(const bpel::Copy& c) {
        std::optional<Message> whole;
        std::optional<Value> scalar;
        if (c.from_variable) {
            whole = read(*c.from_variable);
        } else {
            const auto operand = condition::parse_operand(c.from_expression.value_or(""));
            if (!operand.path) {
                scalar = operand.literal;
            } else if (operand.path->fields.empty()) {
                whole = read(operand.path->variable);
            } else {
                read(operand.path->variable);
                scalar = condition::lookup(*operand.path, env_);
                if (!scalar) {
                    // A prefix of a nested record copies the whole sub-record.
                    const std::string prefix = operand.path->key() + ".";
                    Message sub;
                    for (const auto& [k, v] : env_.at(operand.path->variable))
                        if (k.compare(0, prefix.size(), prefix) == 0) sub[k.substr(prefix.size())] = v;
                    if (sub.empty())
                        throw RuntimeFault{std::string(kSelectionFailure), operand.path->text() + " selects nothing"};
                    whole = std::move(sub);
                }
            }
        }
        if (!c.to_part) {
            if (!whole) throw RuntimeFault{std::string(kSelectionFailure), "a single value cannot replace " + c.to_variable};
            env_[c.to_variable] = *whole;
        } else if (scalar) {
            store_part(c.to_variable, *c.to_part, *scalar);
        } else {
            auto& target = env_[c.to_variable];
            for (const auto& [k, v] : *whole) target[*c.to_part + "." + k] = v;
        }
    }

    void invoke(const bpel::Activity& a) {
        const auto service = service_of(a);
        const auto* stub = stubs_.find(service, a.operation);
        Message request = a.input_variable ? read(*a.input_variable) : Message{};
        const Environment guard_env = {{"request", request}};
        const StubCase* chosen = nullptr;
        for (const auto& c : stub->cases) {
            if (!c.when || condition::evaluate(*c.when, guard_env)) {
                chosen = &c;
                break;
            }
        }
        Event e = event(Event::Kind::invoked);
        e.label = label_of(a);
        e.service = service;
        e.operation = a.operation;
        e.request = std::move(request);
        e.message = chosen->respond;
        e.fault = chosen->fault;
        Message response = chosen->respond;
        if (chosen->fault) response["fault"] = *chosen->fault;
        if (a.output_variable) env_[*a.output_variable] = std::move(response);
        trace_.push_back(std::move(e));
    }

    void basic(const bpel::Activity& a) {
        using K = bpel::Activity::Kind;
        switch (a.kind) {
            case K::receive: {
                if (received_) throw RuntimeFault{"UNEXPECTED_RECEIVE", "the process receives a second message"};
                received_ = true;
                env_[a.variable.value_or("")] = initial_;
                Event e = event(Event::Kind::received);
                e.label = label_of(a);
                e.message = initial_;
                trace_.push_back(std::move(e));
                return;
            }
            case K::assign:
                for (const auto& c : a.copies) copy(c);
                return;
            case K::invoke:
                invoke(a);
                return;
            case K::reply: {
                Event e = event(Event::Kind::replied);
                e.label = label_of(a);
                if (a.variable) e.message = read(*a.variable);
                e.fault = a.fault_name;
                trace_.push_back(std::move(e));
                return;
            }
            default:
                return;
        }
    }

    // Runs the thread until it has executed one basic activity (true) or has
    // nothing left to do (false).
    bool step(Thread& t) {
        using K = bpel::Activity::Kind;
        while (!t.stack.empty()) {
            const std::size_t top = t.stack.size() - 1;
            const bpel::Activity& a = *t.stack[top].activity;
            switch (a.kind) {
                case K::sequence: {
                    auto& f = t.stack[top];
                    if (f.next < a.children.size()) {
                        const auto* child = &a.children[f.next++];
                        t.stack.emplace_back(child);
                    } else {
                        t.stack.pop_back();
                    }
                    break;
                }
                case K::if_: {
                    if (t.stack[top].started) {
                        t.stack.pop_back();
                        break;
                    }
                    t.stack[top].started = true;
                    const bpel::Activity* chosen = nullptr;
                    for (std::size_t i = 0; i < a.conditions.size() && chosen == nullptr; ++i)
                        if (evaluate(a.conditions[i])) chosen = &a.children[i];
                    if (chosen == nullptr && a.has_else) chosen = &a.children.back();
                    if (chosen == nullptr)
                        throw RuntimeFault{std::string(kNoMatchingBranch), "no branch of '" + a.bpmn_id.value_or("if") + "' applies"};
                    t.stack.emplace_back(chosen);
                    break;
                }
                case K::while_: {
                    if (!evaluate(a.conditions.at(0))) {
                        t.stack.pop_back();
                        break;
                    }
                    if (++t.stack[top].iterations > options_.loop_limit)
                        throw RuntimeFault{std::string(kLoopLimit),
                                           "'" + a.bpmn_id.value_or("while") + "' exceeded " + std::to_string(options_.loop_limit) +
                                               " iterations"};
                    t.stack.emplace_back(&a.children.at(0));
                    break;
                }
                case K::flow: {
                    auto& f = t.stack[top];
                    if (!f.started) {
                        f.started = true;
                        for (const auto& c : a.children) {
                            f.threads.emplace_back();
                            f.threads.back().stack.emplace_back(&c);
                        }
                    }
                    const std::size_t n = f.threads.size();
                    for (std::size_t k = 0; k < n; ++k) {
                        const std::size_t i = (f.cursor + k) % n;
                        if (f.threads[i].stack.empty()) continue;
                        if (step(f.threads[i])) {
                            f.cursor = i + 1;
                            return true;
                        }
                    }
                    t.stack.pop_back();
                    break;
                }
                default:
                    t.stack.pop_back();
                    basic(a);
                    return true;
            }
        }
        return false;
    }

    const bpel::BPELDocument& doc_;
    const StubRegistry& stubs_;
    const Message& initial_;
    const Options& options_;
    const bpel::Activity* receive_ = nullptr;
    bool received_ = false;
    Environment env_;
    ExecutionTrace trace_;
};

bool matches(const EventMatcher& m, const Event& e) {
    if (m.kind != e.kind) return false;
    if (m.service && *m.service != e.service) return false;
    if (m.operation && *m.operation != e.operation) return false;
    if (m.fault && *m.fault != e.fault.value_or("")) return false;
    if (m.condition && *m.condition != e.condition) return false;
    if (m.value && *m.value != e.value) return false;
    if (m.name && *m.name != e.name) return false;
    return true;
}

}  // namespace

const Stub* StubRegistry::find(std::string_view service, std::string_view operation) const {
    for (const auto& s : stubs)
        if (s.service == service && s.operation == operation) return &s;
    return nullptr;
}

StubRegistry parse_stubs(std::string_view text) {
    const Json doc = detail::parse_json(text);
    if (!doc.is_object()) throw SyntaxError("stub document must be a JSON object");
    ObjectReader top(doc, "", true);
    StubRegistry reg;
    const auto& list = top.array("stubs");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "stubs[" + std::to_string(i) + "]";
        if (!list[i].is_object()) throw SyntaxError(path + " must be an object");
        ObjectReader r(list[i], path, true);
        Stub s;
        s.service = r.required_string("service");
        s.operation = r.required_string("operation");
        if (reg.find(s.service, s.operation) != nullptr)
            throw SyntaxError(path + ": second stub for " + s.service + "." + s.operation);
        const auto& cases = r.array("cases");
        for (std::size_t k = 0; k < cases.size(); ++k) {
            const std::string cpath = path + ".cases[" + std::to_string(k) + "]";
            if (!cases[k].is_object()) throw SyntaxError(cpath + " must be an object");
            ObjectReader cr(cases[k], cpath, true);
            StubCase c;
            if (const auto when = cr.optional_string("when")) {
                try {
                    c.when = condition::parse(*when);
                } catch (const SyntaxError& e) {
                    throw SyntaxError(cpath + ".when: " + e.what());
                }
                for (const auto& v : c.when->variables())
                    if (v != "request") throw SyntaxError(cpath + ".when may only test $request, not $" + v);
            }
            if (const auto* respond = cr.optional("respond")) flatten(*respond, "", c.respond, cpath + ".respond");
            c.fault = cr.optional_string("fault");
            if (c.fault && !is_ncname(*c.fault)) throw SyntaxError(cpath + ".fault is not an NCName");
            cr.finish();
            s.cases.push_back(std::move(c));
        }
        if (s.cases.empty() || s.cases.back().when)
            throw SyntaxError(path + ": the case list must end with a case without 'when'");
        r.finish();
        reg.stubs.push_back(std::move(s));
    }
    top.finish();
    return reg;
}

Message parse_message(std::string_view text) {
    Message m;
    flatten(detail::parse_json(text), "", m, "message");
    return m;
}

std::string_view to_string(Event::Kind kind) {
    switch (kind) {
        case Event::Kind::received: return "Received";
        case Event::Kind::invoked: return "Invoked";
        case Event::Kind::evaluated: return "Evaluated";
        case Event::Kind::replied: return "Replied";
        case Event::Kind::completed: return "Completed";
        case Event::Kind::faulted: return "Faulted";
    }
    return "?";
}

ExecutionTrace simulate(const bpel::BPELDocument& doc, const StubRegistry& stubs, const Message& initial,
                        const Options& options) {
    return Interpreter(doc, stubs, initial, options).run();
}

std::string to_jsonl(const ExecutionTrace& trace) {
    std::string out;
    for (const auto& e : trace) {
        nlohmann::ordered_json j;
        j["event"] = to_string(e.kind);
        switch (e.kind) {
            case Event::Kind::received:
                j["label"] = e.label;
                j["message"] = message_json(e.message);
                break;
            case Event::Kind::invoked:
                j["label"] = e.label;
                j["service"] = e.service;
                j["operation"] = e.operation;
                j["request"] = message_json(e.request);
                j["outcome"] = e.fault ? "fault" : "ok";
                if (e.fault) j["fault"] = *e.fault;
                j["response"] = message_json(e.message);
                break;
            case Event::Kind::evaluated:
                j["condition"] = e.condition;
                j["value"] = e.value;
                break;
            case Event::Kind::replied:
                j["label"] = e.label;
                if (e.fault) j["fault"] = *e.fault;
                j["message"] = message_json(e.message);
                break;
            case Event::Kind::completed:
                break;
            case Event::Kind::faulted:
                j["name"] = e.name;
                j["detail"] = e.detail;
                break;
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string EventMatcher::describe() const {
    std::string out(to_string(kind));
    std::vector<std::string> parts;
    if (service) parts.push_back("service=" + *service);
    if (operation) parts.push_back("operation=" + *operation);
    if (fault) parts.push_back("fault=" + *fault);
    if (condition) parts.push_back("condition=" + *condition);
    if (value) parts.push_back(std::string("value=") + (*value ? "true" : "false"));
    if (name) parts.push_back("name=" + *name);
    if (!parts.empty()) {
        out += '(';
        for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
        out += ')';
    }
    return out;
}

TraceMatch assert_trace(const ExecutionTrace& trace, const std::vector<EventMatcher>& pattern) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const std::size_t from = pos;
        while (pos < trace.size() && !matches(pattern[i], trace[pos])) ++pos;
        if (pos == trace.size())
            return {false, "matcher " + std::to_string(i) + " " + pattern[i].describe() + " found no event at or after index " +
                               std::to_string(from) + " of " + std::to_string(trace.size())};
        ++pos;
    }
    return {};
}

}  // namespace swsforge::sim
