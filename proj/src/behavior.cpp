#include "swsforge/behavior.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json_reader.hpp"
#include "swsforge/names.hpp"

namespace swsforge::behavior {

using detail::Json;
using detail::ObjectReader;

namespace {

constexpr std::pair<NodeKind, std::string_view> kKindNames[] = {
    {NodeKind::start_event, "StartEvent"},
    {NodeKind::end_event, "EndEvent"},
    {NodeKind::receive_task, "ReceiveTask"},
    {NodeKind::reply_task, "ReplyTask"},
    {NodeKind::invoke_task, "InvokeTask"},
    {NodeKind::exclusive_gateway, "ExclusiveGateway"},
    {NodeKind::parallel_gateway, "ParallelGateway"},
};

condition::Operand read_operand(const Json& v, const std::string& path) {
    condition::Operand o;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (!s.empty() && s[0] == '$') {
            try {
                o.path = condition::parse_path(s);
            } catch (const SyntaxError& e) {
                throw SyntaxError(path + ": " + e.what());
            }
        } else {
            o.literal = s;
        }
    } else if (v.is_boolean()) {
        o.literal = v.get<bool>();
    } else if (v.is_number_integer()) {
        o.literal = v.get<std::int64_t>();
    } else {
        throw SyntaxError(path + ": expected a path, text, integer or boolean");
    }
    return o;
}

Json write_operand(const condition::Operand& o) {
    if (o.path) return o.path->text();
    if (const auto* i = std::get_if<std::int64_t>(&o.literal)) return *i;
    if (const auto* b = std::get_if<bool>(&o.literal)) return *b;
    return std::get<std::string>(o.literal);
}

Assignment read_assignment(ObjectReader& r, const char* key) {
    Assignment out;
    const Json* v = r.optional(key);
    if (v == nullptr) return out;
    if (!v->is_object()) throw SyntaxError(r.path() + "/" + key + ": expected an object");
    for (const auto& [field, operand] : v->items())
        out.emplace_back(field, read_operand(operand, r.path() + "/" + key + "/" + field));
    return out;
}

Node read_node(const Json& j, const std::string& path) {
    ObjectReader r(j, path, true);
    Node n;
    n.id = r.required_string("id");
    const std::string kind = r.required_string("kind");
    const auto it = std::find_if(std::begin(kKindNames), std::end(kKindNames),
                                 [&](const auto& p) { return p.second == kind; });
    if (it == std::end(kKindNames)) throw SyntaxError(path + "/kind: unknown node kind '" + kind + "'");
    n.kind = it->first;
    n.label = r.optional_string("label");
    switch (n.kind) {
        case NodeKind::receive_task:
            n.operation = r.required_string("operation");
            n.variable = r.optional_string("variable");
            break;
        case NodeKind::invoke_task:
            n.service = r.required_string("service");
            n.operation = r.required_string("operation");
            n.assign = read_assignment(r, "inputAssign");
            n.variable = r.optional_string("outputVar");
            break;
        case NodeKind::reply_task:
            n.assign = read_assignment(r, "assign");
            n.fault = r.optional_string("fault");
            break;
        default:
            break;
    }
    r.finish();
    return n;
}

void bind_against_model(const BehaviorModel& b, const pim::ServiceModel& model) {
    for (const auto& v : b.variables)
        if (v.type && model.find_type(*v.type) == nullptr) throw UnresolvedReference(*v.type, "variables/" + v.name);
    for (const auto& n : b.nodes) {
        if (n.kind != NodeKind::invoke_task) continue;
        const auto* s = model.find_service(n.service);
        if (s == nullptr) throw UnresolvedReference(n.service, "nodes/" + n.id + "/service");
        if (s->interface.find_operation(n.operation) == nullptr)
            throw UnresolvedReference(n.service + "." + n.operation, "nodes/" + n.id + "/operation");
    }
}

bool is_split(const BehaviorModel& b, const Node& n) {
    return n.kind == NodeKind::exclusive_gateway && b.outgoing(n.id).size() > 1;
}

std::string edge_path(const Edge& e) { return "edges/" + e.from + "->" + e.to; }

// -------------------------------------------------------------- validation

class Validator {
public:
    Validator(const BehaviorModel& b, const pim::ServiceModel& m, std::string_view composite)
        : b_(b), m_(m), composite_name_(composite) {}

    ValidationReport run() {
        graph();
        gateways();
        variables();
        labels();
        model_checks();
        sort_report(r_);
        return r_;
    }

private:
    void add(const char* code, std::string path, std::string message) {
        r_.push_back({code, std::move(path), std::move(message)});
    }

    static std::string node_path(const Node& n) { return "nodes/" + n.id; }

    void graph() {
        std::vector<const Node*> starts;
        bool has_end = false;
        std::set<std::string> ids;
        for (const auto& n : b_.nodes) {
            if (!ids.insert(n.id).second) add("DUPLICATE_NODE", node_path(n), "node id used twice");
            if (!is_ncname(n.id)) add("NAME_INVALID", node_path(n), "'" + n.id + "' is not an NCName");
            const auto in = b_.incoming(n.id).size();
            const auto out = b_.outgoing(n.id).size();
            switch (n.kind) {
                case NodeKind::start_event:
                    starts.push_back(&n);
                    if (in != 0) add("START_HAS_INCOMING", node_path(n), "start event has incoming edges");
                    if (out != 1) add("START_DEGREE", node_path(n), "start event needs exactly one outgoing edge");
                    break;
                case NodeKind::end_event:
                    has_end = true;
                    if (out != 0) add("END_HAS_OUTGOING", node_path(n), "end event has outgoing edges");
                    break;
                default:
                    if (out == 0) add("DEAD_END", node_path(n), "node has no outgoing edge");
                    if (is_task(n.kind) && (in > 1 || out > 1))
                        add("TASK_DEGREE", node_path(n), "tasks take one incoming and one outgoing edge; use gateways");
                    break;
            }
        }
        if (starts.size() != 1)
            add("START_COUNT", "process", std::to_string(starts.size()) + " start events; exactly one is required");
        if (!has_end) add("END_MISSING", "process", "no end event");
        if (starts.size() == 1) {
            std::set<std::string> seen{starts[0]->id};
            std::vector<std::string> work{starts[0]->id};
            while (!work.empty()) {
                const auto cur = work.back();
                work.pop_back();
                for (const auto* e : b_.outgoing(cur))
                    if (seen.insert(e->to).second) work.push_back(e->to);
            }
            for (const auto& n : b_.nodes)
                if (seen.count(n.id) == 0) add("UNREACHABLE_NODE", node_path(n), "not reachable from the start event");
        }
    }

    void gateways() {
        for (const auto& n : b_.nodes) {
            const auto out = b_.outgoing(n.id);
            const bool split = is_split(b_, n);
            std::size_t defaults = 0;
            for (const auto* e : out) {
                if (e->is_default) ++defaults;
                if (!split && e->condition)
                    add("CONDITION_OUTSIDE_SPLIT", edge_path(*e), "conditions belong on edges leaving an exclusive split");
                if (!split && e->is_default)
                    add("DEFAULT_OUTSIDE_SPLIT", edge_path(*e), "default edges belong to exclusive splits");
                if (split && e->is_default && e->condition)
                    add("DEFAULT_WITH_CONDITION", edge_path(*e), "a default edge carries no condition");
                if (split && !e->is_default && !e->condition)
                    add("UNGUARDED_BRANCH", edge_path(*e), "exclusive branch has neither condition nor default mark");
            }
            if (defaults > 1) add("MULTIPLE_DEFAULTS", node_path(n), "more than one default edge");
        }
        join_kinds();
    }

    // Each split must be closed by the nearest node every path from it goes
    // through (its immediate post-dominator), a join of the same kind.
    void join_kinds() {
        const std::size_t count = b_.nodes.size();
        const std::size_t exit = count;
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < count; ++i) index.emplace(b_.nodes[i].id, i);
        std::vector<std::vector<std::size_t>> succ(count + 1);
        for (const auto& e : b_.edges) succ[index.at(e.from)].push_back(index.at(e.to));
        for (std::size_t i = 0; i < count; ++i)
            if (b_.nodes[i].kind == NodeKind::end_event) succ[i].push_back(exit);

        std::vector<std::vector<bool>> pdom(count + 1, std::vector<bool>(count + 1, true));
        pdom[exit] = std::vector<bool>(count + 1, false);
        pdom[exit][exit] = true;
        for (std::size_t i = 0; i < count; ++i)
            if (succ[i].empty()) {
                pdom[i] = std::vector<bool>(count + 1, false);
                pdom[i][i] = true;
            }
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < count; ++i) {
                if (succ[i].empty()) continue;
                std::vector<bool> next(count + 1, true);
                for (const auto s : succ[i])
                    for (std::size_t k = 0; k <= count; ++k) next[k] = next[k] && pdom[s][k];
                next[i] = true;
                if (next != pdom[i]) {
                    pdom[i] = std::move(next);
                    changed = true;
                }
            }
        }
        auto size = [&](std::size_t i) { return std::count(pdom[i].begin(), pdom[i].end(), true); };

        for (std::size_t i = 0; i < count; ++i) {
            const auto& n = b_.nodes[i];
            if (!is_gateway(n.kind) || succ[i].size() < 2) continue;
            std::optional<std::size_t> ipdom;
            for (std::size_t k = 0; k <= count; ++k) {
                if (k == i || !pdom[i][k]) continue;
                if (!ipdom || size(k) > size(*ipdom)) ipdom = k;
            }
            if (!ipdom) continue;
            if (*ipdom == exit) {
                add("SPLIT_WITHOUT_JOIN", node_path(n), "branches never meet again before the process ends");
                continue;
            }
            const auto& join = b_.nodes[*ipdom];
            if (!is_gateway(join.kind) || join.kind == n.kind) continue;
            // A loop test also reaches its exit node, but through one edge only;
            // a mismatched join is entered from several branches of the split.
            std::set<std::size_t> reach{i};
            std::vector<std::size_t> work{i};
            while (!work.empty()) {
                const auto cur = work.back();
                work.pop_back();
                if (cur == *ipdom) continue;
                for (const auto s : succ[cur])
                    if (s != exit && reach.insert(s).second) work.push_back(s);
            }
            std::size_t entering = 0;
            for (const auto* e : b_.incoming(join.id))
                if (reach.count(index.at(e->from)) != 0 && e->from != join.id) ++entering;
            if (entering >= 2)
                add("GATEWAY_KIND_MISMATCH", node_path(n),
                    std::string(to_string(n.kind)) + " split is joined by " + std::string(to_string(join.kind)) +
                        " '" + join.id + "'");
        }
    }

    void require_variable(const std::string& name, const std::string& path) {
        if (b_.find_variable(name) == nullptr) add("UNDECLARED_VARIABLE", path, "variable '" + name + "' is not declared");
    }

    void variables() {
        std::set<std::string> names;
        for (const auto& v : b_.variables) {
            const std::string path = "variables/" + v.name;
            if (!is_path_identifier(v.name) || !is_ncname(v.name))
                add("NAME_INVALID", path, "'" + v.name + "' is not a valid variable name");
            if (!names.insert(v.name).second) add("DUPLICATE_VARIABLE", path, "variable declared twice");
            if (v.type && m_.find_type(*v.type) == nullptr)
                add("UNKNOWN_TYPE", path, "type '" + *v.type + "' is not declared");
        }
        for (const auto& n : b_.nodes) {
            if (n.variable) require_variable(*n.variable, node_path(n));
            for (const auto& [field, operand] : n.assign)
                if (operand.path) require_variable(operand.path->variable, node_path(n) + "/" + field);
        }
        for (const auto& e : b_.edges)
            if (e.condition)
                for (const auto& v : e.condition->variables()) require_variable(v, edge_path(e));
    }

    void labels() {
        std::map<std::string, std::string> seen;
        for (const auto& n : b_.nodes) {
            if (!is_task(n.kind)) continue;
            const auto name = to_ncname(n.display_label());
            const auto [it, fresh] = seen.emplace(name, n.id);
            if (!fresh) add("DUPLICATE_LABEL", node_path(n), "label '" + n.display_label() + "' also used by '" + it->second + "'");
        }
    }

    std::optional<ValueKind> operand_kind(const condition::Operand& o) const {
        if (!o.path) {
            if (std::holds_alternative<std::int64_t>(o.literal)) return ValueKind::integer;
            if (std::holds_alternative<bool>(o.literal)) return ValueKind::boolean;
            return ValueKind::text;
        }
        const auto* v = b_.find_variable(o.path->variable);
        if (v == nullptr || !v->type) return std::nullopt;
        for (const auto& f : pim::message_fields(m_, *v->type))
            if (f.name == o.path->key()) return value_kind_of_builtin(f.type);
        return std::nullopt;
    }

    // Assigned fields must be exactly the message fields, with matching kinds.
    void check_assignment(const Node& n, const std::vector<pim::Field>& fields, const std::string& what) {
        std::map<std::string, std::string> expected;
        for (const auto& f : fields) expected.emplace(f.name, f.type);
        std::set<std::string> assigned;
        for (const auto& [field, operand] : n.assign) {
            assigned.insert(field);
            const auto it = expected.find(field);
            if (it == expected.end()) {
                add("ASSIGN_UNKNOWN_FIELD", node_path(n), "'" + field + "' is not a field of " + what);
                continue;
            }
            const auto kind = operand_kind(operand);
            if (kind && *kind != value_kind_of_builtin(it->second))
                add("ASSIGN_TYPE_MISMATCH", node_path(n),
                    "'" + field + "' expects " + std::string(to_string(value_kind_of_builtin(it->second))) + ", got " +
                        std::string(to_string(*kind)));
        }
        for (const auto& f : fields)
            if (assigned.count(f.name) == 0) add("ASSIGN_MISSING_FIELD", node_path(n), "field '" + f.name + "' of " + what + " is not assigned");
    }

    void check_variable_type(const Node& n, const std::optional<std::string>& expected, const char* role) {
        if (!n.variable) return;
        const auto* v = b_.find_variable(*n.variable);
        if (v == nullptr || !v->type) return;
        if (!expected || *expected != *v->type)
            add("VARIABLE_TYPE_MISMATCH", node_path(n),
                "variable '" + v->name + "' has type " + *v->type + " but the " + role + " carries " +
                    (expected ? *expected : std::string("no message")));
    }

    void model_checks() {
        const auto* composite = m_.find_service(composite_name_);
        if (composite == nullptr) {
            add("UNKNOWN_SERVICE", "process", "service '" + composite_name_ + "' is not declared");
            return;
        }
        if (composite->kind != pim::ServiceKind::composite) {
            add("NOT_COMPOSITE", "process", "service '" + composite_name_ + "' is not composite");
            return;
        }
        if (composite->behavior_ref != b_.process_name)
            add("BEHAVIOR_MISMATCH", "process",
                "composite '" + composite_name_ + "' names behavior '" + composite->behavior_ref.value_or("") + "'");
        if (!is_ncname(b_.process_name)) add("NAME_INVALID", "process", "'" + b_.process_name + "' is not an NCName");

        std::set<std::string> closure;
        try {
            const auto c = pim::composition_closure(m_, composite_name_);
            closure.insert(c.begin(), c.end());
        } catch (const Error&) {
            // Cycles and dangling components are reported by pim::validate.
        }

        std::vector<const Node*> receives;
        for (const auto& n : b_.nodes)
            if (n.kind == NodeKind::receive_task) receives.push_back(&n);
        if (receives.size() != 1)
            add("RECEIVE_COUNT", "process", std::to_string(receives.size()) + " receive tasks; exactly one is required");
        const pim::Operation* entry = nullptr;
        if (!receives.empty()) {
            const Node& rcv = *receives.front();
            entry = composite->interface.find_operation(rcv.operation);
            if (entry == nullptr)
                add("UNKNOWN_OPERATION", node_path(rcv), "'" + rcv.operation + "' is not an operation of " + composite_name_);
            else
                check_variable_type(rcv, entry->inputs.empty() ? std::nullopt : std::optional(entry->inputs[0].type_ref), "request");
        }
        for (const auto& n : b_.nodes) {
            if (n.kind != NodeKind::start_event) continue;
            const auto out = b_.outgoing(n.id);
            if (out.size() == 1 && receives.size() == 1 && out[0]->to != receives[0]->id)
                add("RECEIVE_NOT_FIRST", node_path(*receives[0]), "the receive task must follow the start event");
        }

        for (const auto& n : b_.nodes) {
            if (n.kind == NodeKind::invoke_task) {
                if (closure.count(n.service) == 0) {
                    add("UNKNOWN_COMPONENT", node_path(n), "'" + n.service + "' is not a component of " + composite_name_);
                    continue;
                }
                const auto* op = m_.find_service(n.service)->interface.find_operation(n.operation);
                if (op == nullptr) {
                    add("UNKNOWN_OPERATION", node_path(n), "'" + n.operation + "' is not an operation of " + n.service);
                    continue;
                }
                const auto input = op->inputs.empty() ? std::string() : op->inputs[0].type_ref;
                check_assignment(n, pim::message_fields(m_, input), "the " + n.operation + " request");
                check_variable_type(n, op->outputs.empty() ? std::nullopt : std::optional(op->outputs[0].type_ref), "response");
            } else if (n.kind == NodeKind::reply_task && entry != nullptr) {
                if (n.fault) {
                    const pim::Fault* fault = nullptr;
                    for (const auto& f : entry->outfaults)
                        if (f.name == *n.fault) fault = &f;
                    if (fault == nullptr) {
                        add("UNKNOWN_FAULT", node_path(n), "'" + *n.fault + "' is not an outfault of " + entry->name);
                        continue;
                    }
                    if (!n.assign.empty() || fault->type_ref)
                        check_assignment(n, fault->type_ref ? pim::message_fields(m_, *fault->type_ref) : std::vector<pim::Field>{},
                                         "fault " + fault->name);
                } else if (entry->outputs.empty()) {
                    add("REPLY_WITHOUT_OUTPUT", node_path(n), entry->name + " has no output message");
                } else if (!n.assign.empty()) {
                    check_assignment(n, pim::message_fields(m_, entry->outputs[0].type_ref), "the " + entry->name + " response");
                }
            }
        }
    }

    const BehaviorModel& b_;
    const pim::ServiceModel& m_;
    std::string composite_name_;
    ValidationReport r_;
};

// ----------------------------------------------------------- normalization

class Normalizer {
public:
    explicit Normalizer(const BehaviorModel& b) : b_(b) {}

    StructuredBehavior run() {
        const Node* start = nullptr;
        for (const auto& n : b_.nodes)
            if (n.kind == NodeKind::start_event) {
                if (start != nullptr) throw UnstructuredGraph(n.id, "second start event");
                start = &n;
            }
        if (start == nullptr) throw UnstructuredGraph(b_.process_name, "no start event");
        find_back_edges(start->id);

        StructuredBehavior s;
        s.process_name = b_.process_name;
        s.variables = b_.variables;
        const auto out = b_.outgoing(start->id);
        if (out.size() != 1) throw UnstructuredGraph(start->id, "start event needs exactly one outgoing edge");
        visit(start->id, start->id);
        auto [block, exit] = chain(out[0]->to, start->id);
        if (node(exit).kind != NodeKind::end_event)
            throw UnstructuredGraph(start->id, "flow reaches '" + exit + "' instead of an end event");
        visit(exit, start->id);
        s.body = std::move(block);
        return s;
    }

private:
    const Node& node(const std::string& id) const {
        const auto* n = b_.find_node(id);
        if (n == nullptr) throw UnresolvedReference(id, "edges");
        return *n;
    }

    void find_back_edges(const std::string& start) {
        std::set<std::string> on_stack;
        std::set<std::string> done;
        // Iterative DFS keeps deep sequences off the call stack.
        struct Frame {
            std::string id;
            std::vector<const Edge*> out;
            std::size_t next = 0;
        };
        std::vector<Frame> stack{{start, b_.outgoing(start), 0}};
        on_stack.insert(start);
        while (!stack.empty()) {
            auto& f = stack.back();
            if (f.next == f.out.size()) {
                on_stack.erase(f.id);
                done.insert(f.id);
                stack.pop_back();
                continue;
            }
            const Edge* e = f.out[f.next++];
            if (on_stack.count(e->to) != 0) {
                back_edges_.insert(e);
                headers_.insert(e->to);
            } else if (done.count(e->to) == 0) {
                on_stack.insert(e->to);
                stack.push_back({e->to, b_.outgoing(e->to), 0});
            }
        }
    }

    void visit(const std::string& id, const std::string& entry) {
        if (!visited_.insert(id).second) throw UnstructuredGraph(entry, "node '" + id + "' is reached along two paths");
    }

    const std::string& single_successor(const std::string& id, const std::string& entry) const {
        const auto out = b_.outgoing(id);
        if (out.size() != 1)
            throw UnstructuredGraph(entry, "'" + id + "' has " + std::to_string(out.size()) + " outgoing edges where one is required");
        return out[0]->to;
    }

    // Follows a chain of steps from `id` until an end event, a join or the
    // header of an enclosing loop; returns the steps and that exit node.
    std::pair<Block, std::string> chain(std::string id, const std::string& entry) {
        Block block;
        while (true) {
            const Node& n = node(id);
            if (n.kind == NodeKind::end_event) return {std::move(block), id};
            if (headers_.count(id) != 0) {
                if (open_loops_.count(id) != 0) return {std::move(block), id};
                auto [step, next] = loop(id);
                block.push_back(std::move(step));
                id = next;
                continue;
            }
            const auto in = b_.incoming(id).size();
            if (is_gateway(n.kind) && in > 1) return {std::move(block), id};
            if (n.kind == NodeKind::start_event) throw UnstructuredGraph(entry, "flow re-enters the start event");
            if (in > 1) throw UnstructuredGraph(entry, "task '" + id + "' has several incoming edges");
            visit(id, entry);
            if (is_task(n.kind)) {
                Step step;
                step.kind = Step::Kind::task;
                step.task = n;
                block.push_back(std::move(step));
                id = single_successor(id, entry);
                continue;
            }
            const auto out = b_.outgoing(id);
            if (out.size() == 1) {
                id = out[0]->to;
                continue;
            }
            if (out.empty()) throw UnstructuredGraph(entry, "'" + id + "' has no outgoing edge");
            auto [step, next] = split(n);
            block.push_back(std::move(step));
            id = next;
        }
    }

    std::pair<Step, std::string> split(const Node& s) {
        Step step;
        step.kind = s.kind == NodeKind::parallel_gateway ? Step::Kind::parallel : Step::Kind::choice;
        step.gateway = s.id;
        const auto out = b_.outgoing(s.id);
        std::optional<std::string> join;
        for (const Edge* e : out) {
            if (back_edges_.count(e) != 0) throw UnstructuredGraph(s.id, "branch to '" + e->to + "' jumps back");
            auto [block, exit] = chain(e->to, s.id);
            if (join && *join != exit)
                throw UnstructuredGraph(s.id, "branches end at '" + *join + "' and '" + exit + "'");
            join = exit;
            if (step.kind == Step::Kind::parallel) {
                step.blocks.push_back(std::move(block));
            } else if (e->is_default) {
                step.otherwise = std::move(block);
            } else if (e->condition) {
                step.branches.push_back({*e->condition, std::move(block)});
            } else {
                throw UnstructuredGraph(s.id, "branch to '" + e->to + "' has no condition");
            }
        }
        const Node& j = node(*join);
        if (!is_gateway(j.kind) || headers_.count(j.id) != 0)
            throw UnstructuredGraph(s.id, "branches do not meet at a join gateway");
        if (j.kind != s.kind)
            throw UnstructuredGraph(s.id, "split is joined by " + std::string(to_string(j.kind)) + " '" + j.id + "'");
        if (b_.incoming(j.id).size() != out.size())
            throw UnstructuredGraph(s.id, "join '" + j.id + "' is also entered from outside the region");
        visit(j.id, s.id);
        return {std::move(step), single_successor(j.id, s.id)};
    }

    // Loop header: an exclusive merge (entry edge plus back edge) followed by,
    // or combined with, an exclusive test whose conditional edge enters the
    // body and whose default edge leaves the loop.
    std::pair<Step, std::string> loop(const std::string& header) {
        const Node& h = node(header);
        visit(header, header);
        const auto in = b_.incoming(header);
        std::size_t back = 0;
        for (const Edge* e : in)
            if (back_edges_.count(e) != 0) ++back;
        if (h.kind != NodeKind::exclusive_gateway || in.size() != 2 || back != 1)
            throw UnstructuredGraph(header, "a loop header is an exclusive merge with one entry and one back edge");

        std::string test = header;
        if (b_.outgoing(header).size() == 1) {
            test = b_.outgoing(header)[0]->to;
            const Node& t = node(test);
            if (t.kind != NodeKind::exclusive_gateway || b_.incoming(test).size() != 1 || b_.outgoing(test).size() != 2)
                throw UnstructuredGraph(header, "the loop test must follow the loop header");
            visit(test, header);
        }
        const auto out = b_.outgoing(test);
        const Edge* body = nullptr;
        const Edge* exit = nullptr;
        for (const Edge* e : out) {
            if (e->is_default) exit = e;
            else if (e->condition) body = e;
        }
        if (out.size() != 2 || body == nullptr || exit == nullptr)
            throw UnstructuredGraph(header, "the loop test needs one conditional body edge and one default exit edge");

        open_loops_.insert(header);
        auto [block, end] = chain(body->to, header);
        open_loops_.erase(header);
        if (end != header) throw UnstructuredGraph(header, "the loop body leaves through '" + end + "'");

        Step step;
        step.kind = Step::Kind::loop;
        step.gateway = header;
        step.branches.push_back({*body->condition, std::move(block)});
        return {std::move(step), exit->to};
    }

    const BehaviorModel& b_;
    std::set<const Edge*> back_edges_;
    std::set<std::string> headers_;
    std::set<std::string> open_loops_;
    std::set<std::string> visited_;
};

// -------------------------------------------------------------- expansion

class Expander {
public:
    explicit Expander(const StructuredBehavior& s) : s_(s) {
        collect_ids(s.body);
    }

    BehaviorModel run() {
        g_.process_name = s_.process_name;
        g_.variables = s_.variables;
        const auto start = add(NodeKind::start_event, "start");
        const auto end_id = fresh("end");
        auto [first, last] = block(s_.body);
        if (first) {
            connect(start, *first);
            connect(*last, end_id);
        } else {
            connect(start, end_id);
        }
        Node end;
        end.id = end_id;
        end.kind = NodeKind::end_event;
        g_.nodes.push_back(std::move(end));
        return std::move(g_);
    }

private:
    void collect_ids(const Block& b) {
        for (const auto& s : b) {
            if (s.kind == Step::Kind::task) used_.insert(s.task.id);
            for (const auto& br : s.branches) collect_ids(br.body);
            if (s.otherwise) collect_ids(*s.otherwise);
            for (const auto& bl : s.blocks) collect_ids(bl);
        }
    }

    std::string fresh(const std::string& base) {
        std::string id = base;
        for (int i = 1; used_.count(id) != 0; ++i) id = base + "_" + std::to_string(i);
        used_.insert(id);
        return id;
    }

    std::string add(NodeKind kind, const std::string& base) {
        Node n;
        n.id = fresh(base);
        n.kind = kind;
        g_.nodes.push_back(n);
        return n.id;
    }

    // Edges leaving a loop test toward the exit are its default edge.
    void connect(const std::string& from, const std::string& to, std::optional<condition::Predicate> cond = std::nullopt,
                 bool is_default = false) {
        if (loop_tests_.count(from) != 0 && !cond) is_default = true;
        g_.edges.push_back({from, to, std::move(cond), is_default});
    }

    using Span = std::pair<std::optional<std::string>, std::optional<std::string>>;

    Span block(const Block& b) {
        Span span;
        for (const auto& s : b) {
            auto [first, last] = step(s);
            if (!span.first) span.first = first;
            else connect(*span.second, first);
            span.second = last;
        }
        return span;
    }

    void branch(const std::string& split, const std::string& join, const Block& body,
                std::optional<condition::Predicate> cond, bool is_default) {
        auto [first, last] = block(body);
        if (first) {
            g_.edges.push_back({split, *first, std::move(cond), is_default});
            connect(*last, join);
        } else {
            g_.edges.push_back({split, join, std::move(cond), is_default});
        }
    }

    std::pair<std::string, std::string> step(const Step& s) {
        switch (s.kind) {
            case Step::Kind::task:
                g_.nodes.push_back(s.task);
                return {s.task.id, s.task.id};
            case Step::Kind::choice: {
                const auto split = add(NodeKind::exclusive_gateway, "xor_split");
                const auto join = fresh("xor_join");
                for (const auto& br : s.branches) branch(split, join, br.body, br.condition, false);
                if (s.otherwise) branch(split, join, *s.otherwise, std::nullopt, true);
                g_.nodes.push_back({join, NodeKind::exclusive_gateway, {}, {}, {}, {}, {}, {}});
                return {split, join};
            }
            case Step::Kind::parallel: {
                const auto split = add(NodeKind::parallel_gateway, "and_split");
                const auto join = fresh("and_join");
                for (const auto& bl : s.blocks) branch(split, join, bl, std::nullopt, false);
                g_.nodes.push_back({join, NodeKind::parallel_gateway, {}, {}, {}, {}, {}, {}});
                return {split, join};
            }
            case Step::Kind::loop: {
                const auto merge = add(NodeKind::exclusive_gateway, "loop_merge");
                const auto test = add(NodeKind::exclusive_gateway, "loop_test");
                g_.edges.push_back({merge, test, std::nullopt, false});
                const auto& body = s.branches.at(0);
                auto [first, last] = block(body.body);
                if (first) {
                    g_.edges.push_back({test, *first, body.condition, false});
                    connect(*last, merge);
                } else {
                    g_.edges.push_back({test, merge, body.condition, false});
                }
                loop_tests_.insert(test);
                return {merge, test};
            }
        }
        return {};
    }

    const StructuredBehavior& s_;
    BehaviorModel g_;
    std::set<std::string> used_;
    std::set<std::string> loop_tests_;
};

void collect_leaves(const Block& b, std::vector<const Node*>& out) {
    for (const auto& s : b) {
        if (s.kind == Step::Kind::task) out.push_back(&s.task);
        for (const auto& br : s.branches) collect_leaves(br.body, out);
        if (s.otherwise) collect_leaves(*s.otherwise, out);
        for (const auto& bl : s.blocks) collect_leaves(bl, out);
    }
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "?";
}

bool is_task(NodeKind kind) {
    return kind == NodeKind::receive_task || kind == NodeKind::reply_task || kind == NodeKind::invoke_task;
}

bool is_gateway(NodeKind kind) {
    return kind == NodeKind::exclusive_gateway || kind == NodeKind::parallel_gateway;
}

const Node* BehaviorModel::find_node(std::string_view id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const Variable* BehaviorModel::find_variable(std::string_view name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

std::vector<const Edge*> BehaviorModel::outgoing(std::string_view id) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges)
        if (e.from == id) out.push_back(&e);
    return out;
}

std::vector<const Edge*> BehaviorModel::incoming(std::string_view id) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges)
        if (e.to == id) out.push_back(&e);
    return out;
}

BehaviorModel parse_behavior(std::string_view document) {
    const Json root = detail::parse_json(document);
    ObjectReader r(root, "behavior", true);
    BehaviorModel b;
    b.process_name = r.required_string("process");

    std::size_t i = 0;
    for (const auto& item : r.array("variables")) {
        ObjectReader vr(item, "variables/" + std::to_string(i++), true);
        Variable v;
        v.name = vr.required_string("name");
        v.type = vr.optional_string("type");
        vr.finish();
        if (b.find_variable(v.name) != nullptr) throw DuplicateName(v.name, "variables");
        b.variables.push_back(std::move(v));
    }
    i = 0;
    for (const auto& item : r.array("nodes")) {
        Node n = read_node(item, "nodes/" + std::to_string(i++));
        if (b.find_node(n.id) != nullptr) throw DuplicateName(n.id, "nodes");
        b.nodes.push_back(std::move(n));
    }
    i = 0;
    for (const auto& item : r.array("edges")) {
        const std::string path = "edges/" + std::to_string(i++);
        ObjectReader er(item, path, true);
        Edge e;
        e.from = er.required_string("from");
        e.to = er.required_string("to");
        if (const auto text = er.optional_string("condition")) {
            try {
                e.condition = condition::parse(*text);
            } catch (const SyntaxError& ex) {
                throw SyntaxError(path + "/condition: " + ex.what(), 0, ex.column());
            }
        }
        e.is_default = er.optional_bool("default").value_or(false);
        er.finish();
        if (b.find_node(e.from) == nullptr) throw UnresolvedReference(e.from, path + "/from");
        if (b.find_node(e.to) == nullptr) throw UnresolvedReference(e.to, path + "/to");
        b.edges.push_back(std::move(e));
    }
    r.finish();
    return b;
}

BehaviorModel parse_behavior(std::string_view document, const pim::ServiceModel& model) {
    BehaviorModel b = parse_behavior(document);
    bind_against_model(b, model);
    return b;
}

std::string serialize_behavior(const BehaviorModel& b) {
    using OJson = nlohmann::ordered_json;
    OJson root;
    root["process"] = b.process_name;
    root["variables"] = OJson::array();
    for (const auto& v : b.variables) {
        OJson o{{"name", v.name}};
        if (v.type) o["type"] = *v.type;
        root["variables"].push_back(std::move(o));
    }
    root["nodes"] = OJson::array();
    for (const auto& n : b.nodes) {
        OJson o{{"id", n.id}, {"kind", std::string(to_string(n.kind))}};
        if (n.label) o["label"] = *n.label;
        auto assignment = [&](const char* key) {
            if (n.assign.empty()) return;
            OJson a = OJson::object();
            for (const auto& [field, operand] : n.assign) a[field] = write_operand(operand);
            o[key] = std::move(a);
        };
        if (n.kind == NodeKind::receive_task) {
            o["operation"] = n.operation;
            if (n.variable) o["variable"] = *n.variable;
        } else if (n.kind == NodeKind::invoke_task) {
            o["service"] = n.service;
            o["operation"] = n.operation;
            assignment("inputAssign");
            if (n.variable) o["outputVar"] = *n.variable;
        } else if (n.kind == NodeKind::reply_task) {
            assignment("assign");
            if (n.fault) o["fault"] = *n.fault;
        }
        root["nodes"].push_back(std::move(o));
    }
    root["edges"] = OJson::array();
    for (const auto& e : b.edges) {
        OJson o{{"from", e.from}, {"to", e.to}};
        if (e.condition) o["condition"] = e.condition->text;
        if (e.is_default) o["default"] = true;
        root["edges"].push_back(std::move(o));
    }
    return root.dump(2) + "\n";
}

ValidationReport validate_behavior(const BehaviorModel& b, const pim::ServiceModel& model,
                                   std::string_view composite_name) {
    return Validator(b, model, composite_name).run();
}

StructuredBehavior normalize_to_structured(const BehaviorModel& b) { return Normalizer(b).run(); }

BehaviorModel expand_to_graph(const StructuredBehavior& s) { return Expander(s).run(); }

std::vector<const Node*> leaves(const StructuredBehavior& s) {
    std::vector<const Node*> out;
    collect_leaves(s.body, out);
    return out;
}

}  // namespace swsforge::behavior
