#include "swsforge/bpel.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "swsforge/names.hpp"
#include "swsforge/sawsdl.hpp"
#include "swsforge/transform.hpp"
#include "swsforge/xml.hpp"

namespace swsforge::bpel {

using behavior::Block;
using behavior::Node;
using behavior::NodeKind;
using behavior::Step;

// ------------------------------------------------------------------ naming

namespace naming {

std::string interface_link_type(std::string_view process) { return std::string(process) + "AndInterface"; }
std::string interface_role(std::string_view process) { return std::string(process) + "_for_Interface"; }
std::string interface_port_type(std::string_view process) { return std::string(process) + ":ForInterface"; }

std::string component_link_type(std::string_view process, std::string_view service) {
    return std::string(process) + "AndProcessForPortType" + std::string(service) + "SoapPlk";
}

std::string component_role(std::string_view process) { return "Process1_for_" + std::string(process); }
std::string component_port_type(std::string_view service) { return "tns:" + std::string(service) + "ServiceSoap"; }

std::string partner_link(std::string_view link_type) {
    std::string name(link_type);
    if (name.size() < 3 || name.compare(name.size() - 3, 3, "Plk") != 0) name += "Plk";
    return lower_first(name) + "Var";
}

std::optional<std::string> service_of_port_type(std::string_view port_type) {
    constexpr std::string_view prefix = "tns:";
    constexpr std::string_view suffix = "ServiceSoap";
    if (port_type.substr(0, prefix.size()) != prefix) return std::nullopt;
    auto local = port_type.substr(prefix.size());
    if (local.size() <= suffix.size() || local.substr(local.size() - suffix.size()) != suffix) return std::nullopt;
    return std::string(local.substr(0, local.size() - suffix.size()));
}

std::string process_namespace(std::string_view model_namespace, std::string_view composite, std::string_view process) {
    return transform::description_namespace(model_namespace, composite) + "/" + std::string(process);
}

}  // namespace naming

namespace {

constexpr const char* kThisPortType = "this:ForInterface";

const pim::Service& require_composite(const pim::ServiceModel& model, std::string_view name) {
    const auto* s = model.find_service(name);
    if (s == nullptr) throw UnknownService(std::string(name));
    if (s->kind != pim::ServiceKind::composite) throw NotComposite(std::string(name));
    return *s;
}

void check_process_name(const std::string& process) {
    if (!is_ncname(process)) throw InvariantViolation("process name '" + process + "' is not an NCName");
    // The process name doubles as a namespace prefix in the process WSDL.
    static const std::set<std::string> taken = {"wsdl", "pnlk", "tns", "this", "Process1", "bpel", "bpmn", "sim", "xs"};
    if (taken.count(process) != 0 || process.rfind("xml", 0) == 0 || process.rfind("XML", 0) == 0)
        throw InvariantViolation("process name '" + process + "' collides with a reserved namespace prefix");
}

std::string fields_attribute(const std::vector<pim::Field>& fields) {
    std::string out;
    for (const auto& f : fields) {
        if (!out.empty()) out += ' ';
        out += f.name + ":" + f.type;
    }
    return out;
}

std::vector<pim::Field> parse_fields_attribute(std::string_view value) {
    std::vector<pim::Field> out;
    std::istringstream in{std::string(value)};
    std::string item;
    while (in >> item) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
            throw InvariantViolation("malformed sim:fields entry '" + item + "'");
        out.push_back({item.substr(0, colon), item.substr(colon + 1)});
    }
    return out;
}

// ------------------------------------------------------------- generation

class Generator {
public:
    Generator(const pim::ServiceModel& model, const behavior::StructuredBehavior& s, const pim::Service& composite)
        : m_(model), s_(s), c_(composite) {}

    BPELDocument run() {
        const std::string& process = s_.process_name;
        check_process_name(process);
        if (c_.behavior_ref != process)
            throw InvariantViolation("composite '" + c_.name + "' does not own behavior '" + process + "'");

        BPELDocument doc;
        doc.name = process;
        doc.target_namespace = naming::process_namespace(m_.namespace_uri, c_.name, process);
        doc.interface_namespace = transform::description_namespace(m_.namespace_uri, c_.name);
        doc.imports.push_back({doc.target_namespace, c_.name + "-Process.wsdl", std::string(kWsdl11Ns)});
        doc.imports.push_back({doc.interface_namespace, c_.name + ".wsdl", std::string(kWsdlNs)});

        interface_link_ = naming::partner_link(naming::interface_link_type(process));
        doc.partner_links.push_back(
            {interface_link_, "tns:" + naming::interface_link_type(process), naming::interface_role(process), std::nullopt});
        for (const auto& svc : pim::composition_closure(m_, c_.name)) {
            const auto type = naming::component_link_type(process, svc);
            component_links_[svc] = naming::partner_link(type);
            doc.partner_links.push_back({component_links_[svc], "tns:" + type, std::nullopt, naming::component_role(process)});
        }

        const auto leaves = behavior::leaves(s_);
        if (s_.body.empty() || s_.body.front().kind != Step::Kind::task ||
            s_.body.front().task.kind != NodeKind::receive_task)
            throw InvariantViolation("the process body must start with its receive task");
        for (std::size_t i = 1; i < leaves.size(); ++i)
            if (leaves[i]->kind == NodeKind::receive_task)
                throw InvariantViolation("second receive task '" + leaves[i]->id + "'");
        entry_ = c_.interface.find_operation(s_.body.front().task.operation);
        if (entry_ == nullptr)
            throw InvariantViolation("'" + s_.body.front().task.operation + "' is not an operation of " + c_.name);

        declare_variables(leaves);
        doc.variables = variables_;
        doc.body.kind = Activity::Kind::sequence;
        doc.body.children = block(s_.body);
        return doc;
    }

private:
    void declare(VariableDecl v) {
        if (!names_.insert(v.name).second) throw InvariantViolation("variable name '" + v.name + "' is generated twice");
        variables_.push_back(std::move(v));
    }

    std::string type_of(const std::vector<pim::Parameter>& params) const {
        return params.empty() ? std::string() : params.front().type_ref;
    }

    const pim::Operation& component_operation(const Node& n) const {
        if (component_links_.count(n.service) == 0)
            throw InvariantViolation("'" + n.service + "' is not a component of " + c_.name);
        const auto* op = m_.find_service(n.service)->interface.find_operation(n.operation);
        if (op == nullptr) throw InvariantViolation("'" + n.operation + "' is not an operation of " + n.service);
        return *op;
    }

    const pim::Fault* entry_fault(const std::string& name) const {
        for (const auto& f : entry_->outfaults)
            if (f.name == name) return &f;
        throw InvariantViolation("'" + name + "' is not an outfault of " + entry_->name);
    }

    std::string request_variable(const Node& n) const {
        const auto& services = op_services_.at(n.operation);
        const std::string prefix = services.size() > 1 ? n.service : std::string("tns");
        return prefix + upper_first(n.operation) + "RequestMsg";
    }

    static std::string response_variable(const Node& n) {
        return n.service + "Service" + upper_first(n.operation) + "ResponseMsg";
    }

    std::string fault_variable(const std::string& fault) const {
        return "this" + entry_->name + fault + "FaultMsg";
    }

    void collect_references(const Block& b, std::set<std::string>& out) const {
        for (const auto& step : b) {
            if (step.kind == Step::Kind::task) {
                if (step.task.variable) out.insert(*step.task.variable);
                for (const auto& [_, operand] : step.task.assign)
                    if (operand.path) out.insert(operand.path->variable);
            }
            for (const auto& br : step.branches) {
                for (const auto& v : br.condition.variables()) out.insert(v);
                collect_references(br.body, out);
            }
            if (step.otherwise) collect_references(*step.otherwise, out);
            for (const auto& bl : step.blocks) collect_references(bl, out);
        }
    }

    void declare_variables(const std::vector<const Node*>& leaves) {
        const std::string& op = entry_->name;
        declare({"this" + op + "RequestMsg", "this:" + op + "Request", std::nullopt, std::nullopt,
                 pim::message_fields(m_, type_of(entry_->inputs))});
        bool plain_reply = false;
        std::vector<std::string> typed_faults;
        for (const auto* n : leaves) {
            if (n->kind != NodeKind::reply_task) continue;
            if (!n->fault) {
                plain_reply = true;
            } else if (const auto* f = entry_fault(*n->fault); f->type_ref) {
                if (std::find(typed_faults.begin(), typed_faults.end(), f->name) == typed_faults.end())
                    typed_faults.push_back(f->name);
            }
        }
        if (plain_reply) {
            if (entry_->outputs.empty()) throw InvariantViolation(op + " has no output message to reply with");
            declare({"this" + op + "ResponseMsg", "this:" + op + "Response", std::nullopt, std::nullopt,
                     pim::message_fields(m_, type_of(entry_->outputs))});
        }
        for (const auto& fault : typed_faults)
            declare({fault_variable(fault), "this:" + fault, std::nullopt, std::nullopt,
                     pim::message_fields(m_, *entry_fault(fault)->type_ref)});

        for (const auto* n : leaves)
            if (n->kind == NodeKind::invoke_task) op_services_[n->operation].insert(n->service);
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto* n : leaves) {
            if (n->kind != NodeKind::invoke_task || !seen.insert({n->service, n->operation}).second) continue;
            const auto& op_def = component_operation(*n);
            declare({request_variable(*n), "tns:" + n->operation + "In", std::nullopt, std::nullopt,
                     pim::message_fields(m_, type_of(op_def.inputs))});
            declare({response_variable(*n), "Process1:" + n->operation + "Response", std::nullopt, std::nullopt,
                     pim::message_fields(m_, type_of(op_def.outputs))});
        }

        std::set<std::string> referenced;
        collect_references(s_.body, referenced);
        for (const auto& v : s_.variables) {
            if (referenced.count(v.name) == 0) continue;
            VariableDecl d{v.name, std::nullopt, std::nullopt, std::nullopt, {}};
            if (v.type) {
                d.element = "this:" + *v.type;
                d.fields = pim::message_fields(m_, *v.type);
            } else {
                d.type = "xs:anyType";
            }
            declare(std::move(d));
        }
        for (const auto& r : referenced)
            if (names_.count(r) == 0) throw InvariantViolation("variable '" + r + "' is not declared by the behavior");
    }

    static void annotate(Activity& a, const Node& n) {
        a.name = to_ncname(n.display_label());
        a.label = n.display_label();
        a.bpmn_id = n.id;
    }

    // Copies for every field of the target message, taken from the task's
    // assignment; the assignment must cover exactly those fields.
    static Activity assign_fields(const Node& n, const std::vector<pim::Field>& fields, const std::string& target) {
        std::map<std::string, const condition::Operand*> given;
        for (const auto& [field, operand] : n.assign) given.emplace(field, &operand);
        Activity a;
        a.kind = Activity::Kind::assign;
        for (const auto& f : fields) {
            const auto it = given.find(f.name);
            if (it == given.end()) throw InvariantViolation("'" + n.id + "' leaves field '" + f.name + "' of " + target + " unassigned");
            a.copies.push_back({std::nullopt, it->second->text(), target, f.name});
            given.erase(it);
        }
        if (!given.empty())
            throw InvariantViolation("'" + n.id + "' assigns '" + given.begin()->first + "', which " + target + " does not carry");
        return a;
    }

    static Activity copy_variable(const std::string& from, const std::string& to) {
        Activity a;
        a.kind = Activity::Kind::assign;
        a.copies.push_back({from, std::nullopt, to, std::nullopt});
        return a;
    }

    void task(const Node& n, std::vector<Activity>& out) {
        switch (n.kind) {
            case NodeKind::receive_task: {
                Activity a;
                a.kind = Activity::Kind::receive;
                a.partner_link = interface_link_;
                a.port_type = kThisPortType;
                a.operation = n.operation;
                a.variable = "this" + entry_->name + "RequestMsg";
                a.create_instance = true;
                annotate(a, n);
                out.push_back(std::move(a));
                if (n.variable) out.push_back(copy_variable(*out.back().variable, *n.variable));
                return;
            }
            case NodeKind::invoke_task: {
                const auto& op = component_operation(n);
                const auto request = request_variable(n);
                const auto response = response_variable(n);
                out.push_back(assign_fields(n, pim::message_fields(m_, type_of(op.inputs)), request));
                Activity a;
                a.kind = Activity::Kind::invoke;
                a.partner_link = component_links_.at(n.service);
                a.port_type = naming::component_port_type(n.service);
                a.operation = n.operation;
                a.input_variable = request;
                a.output_variable = response;
                annotate(a, n);
                out.push_back(std::move(a));
                if (n.variable) out.push_back(copy_variable(response, *n.variable));
                return;
            }
            case NodeKind::reply_task: {
                Activity a;
                a.kind = Activity::Kind::reply;
                a.partner_link = interface_link_;
                a.port_type = kThisPortType;
                a.operation = entry_->name;
                annotate(a, n);
                if (n.fault) {
                    const auto* f = entry_fault(*n.fault);
                    a.fault_name = f->name;
                    if (f->type_ref) {
                        a.variable = fault_variable(f->name);
                        out.push_back(assign_fields(n, pim::message_fields(m_, *f->type_ref), *a.variable));
                    } else if (!n.assign.empty()) {
                        throw InvariantViolation("'" + n.id + "' assigns fields of fault " + f->name + ", which carries no message");
                    }
                } else {
                    a.variable = "this" + entry_->name + "ResponseMsg";
                    if (!n.assign.empty())
                        out.push_back(assign_fields(n, pim::message_fields(m_, type_of(entry_->outputs)), *a.variable));
                }
                out.push_back(std::move(a));
                return;
            }
            default:
                throw InvariantViolation("'" + n.id + "' is not a task");
        }
    }

    Activity sequence(const Block& b) {
        Activity a;
        a.kind = Activity::Kind::sequence;
        a.children = block(b);
        return a;
    }

    std::vector<Activity> block(const Block& b) {
        std::vector<Activity> out;
        for (const auto& step : b) {
            switch (step.kind) {
                case Step::Kind::task:
                    task(step.task, out);
                    break;
                case Step::Kind::choice: {
                    Activity a;
                    a.kind = Activity::Kind::if_;
                    a.bpmn_id = step.gateway;
                    for (const auto& br : step.branches) {
                        a.conditions.push_back(br.condition.text);
                        a.children.push_back(sequence(br.body));
                    }
                    if (step.otherwise) {
                        a.has_else = true;
                        a.children.push_back(sequence(*step.otherwise));
                    }
                    out.push_back(std::move(a));
                    break;
                }
                case Step::Kind::parallel: {
                    Activity a;
                    a.kind = Activity::Kind::flow;
                    a.bpmn_id = step.gateway;
                    for (const auto& bl : step.blocks) a.children.push_back(sequence(bl));
                    out.push_back(std::move(a));
                    break;
                }
                case Step::Kind::loop: {
                    Activity a;
                    a.kind = Activity::Kind::while_;
                    a.bpmn_id = step.gateway;
                    a.conditions.push_back(step.branches.at(0).condition.text);
                    a.children.push_back(sequence(step.branches.at(0).body));
                    out.push_back(std::move(a));
                    break;
                }
            }
        }
        return out;
    }

    const pim::ServiceModel& m_;
    const behavior::StructuredBehavior& s_;
    const pim::Service& c_;
    const pim::Operation* entry_ = nullptr;
    std::string interface_link_;
    std::map<std::string, std::string> component_links_;
    std::map<std::string, std::set<std::string>> op_services_;
    std::vector<VariableDecl> variables_;
    std::set<std::string> names_;
};

// ---------------------------------------------------------------- checking

class Checker {
public:
    explicit Checker(const BPELDocument& d) : d_(d) {}

    ValidationReport run() {
        std::set<std::string> names;
        for (const auto& v : d_.variables)
            if (!names.insert(v.name).second) add("DUPLICATE_VARIABLE", "variables/" + v.name, "declared twice");
        std::set<std::string> links;
        for (const auto& p : d_.partner_links)
            if (!links.insert(p.name).second) add("DUPLICATE_PARTNER_LINK", "partnerLinks/" + p.name, "declared twice");

        if (d_.body.kind != Activity::Kind::sequence || d_.body.children.empty() ||
            d_.body.children.front().kind != Activity::Kind::receive || !d_.body.children.front().create_instance)
            add("RECEIVE_NOT_FIRST", "process", "the body must open with a createInstance receive");
        walk(d_.body, "process");
        for (const auto& v : d_.variables)
            if (used_.count(v.name) == 0) add("UNUSED_VARIABLE", "variables/" + v.name, "never referenced");
        sort_report(r_);
        return r_;
    }

private:
    void add(const char* code, std::string path, std::string message) {
        r_.push_back({code, std::move(path), std::move(message)});
    }

    void use_variable(const std::string& name, const std::string& path) {
        used_.insert(name);
        if (d_.find_variable(name) == nullptr) add("UNDECLARED_VARIABLE", path, "variable '" + name + "' is not declared");
    }

    void use_condition(const std::string& text, const std::string& path) {
        try {
            for (const auto& v : condition::parse(text).variables()) use_variable(v, path);
        } catch (const SyntaxError& e) {
            add("CONDITION_SYNTAX", path, e.what());
        }
    }

    void walk(const Activity& a, const std::string& parent) {
        const std::string path = parent + "/" + (a.name ? *a.name : a.bpmn_id ? *a.bpmn_id : std::string("activity"));
        if (a.create_instance && &a != &d_.body.children.front())
            add("CREATE_INSTANCE", path, "only the leading receive creates the instance");
        if (a.label && !labels_.insert(*a.label).second) add("DUPLICATE_LABEL", path, "label '" + *a.label + "' used twice");
        switch (a.kind) {
            case Activity::Kind::receive:
            case Activity::Kind::invoke:
            case Activity::Kind::reply:
                if (d_.find_partner_link(a.partner_link) == nullptr)
                    add("UNDECLARED_PARTNER_LINK", path, "partner link '" + a.partner_link + "' is not declared");
                for (const auto* v : {&a.variable, &a.input_variable, &a.output_variable})
                    if (*v) use_variable(**v, path);
                if (a.kind == Activity::Kind::invoke && (!a.input_variable || !a.output_variable))
                    add("INVOKE_VARIABLES", path, "invoke needs input and output variables");
                if (a.kind == Activity::Kind::receive && !a.variable) add("RECEIVE_VARIABLE", path, "receive needs a variable");
                break;
            case Activity::Kind::assign:
                if (a.copies.empty()) add("EMPTY_ASSIGN", path, "assign without copy");
                for (const auto& c : a.copies) {
                    if (c.from_variable) use_variable(*c.from_variable, path);
                    if (c.from_expression) {
                        try {
                            const auto o = condition::parse_operand(*c.from_expression);
                            if (o.path) use_variable(o.path->variable, path);
                        } catch (const SyntaxError& e) {
                            add("COPY_SYNTAX", path, e.what());
                        }
                    }
                    if (c.from_variable.has_value() == c.from_expression.has_value())
                        add("COPY_SOURCE", path, "copy needs exactly one source");
                    use_variable(c.to_variable, path);
                }
                break;
            case Activity::Kind::if_:
                if (a.conditions.empty() || a.conditions.size() + (a.has_else ? 1 : 0) != a.children.size())
                    add("IF_SHAPE", path, "conditions and branches disagree");
                for (const auto& c : a.conditions) use_condition(c, path);
                break;
            case Activity::Kind::while_:
                if (a.conditions.size() != 1 || a.children.size() != 1) add("WHILE_SHAPE", path, "while takes one condition and one body");
                for (const auto& c : a.conditions) use_condition(c, path);
                break;
            default:
                break;
        }
        for (const auto& child : a.children) walk(child, path);
    }

    const BPELDocument& d_;
    ValidationReport r_;
    std::set<std::string> used_;
    std::set<std::string> labels_;
};

void throw_if_unsound(const BPELDocument& doc) {
    const auto report = check(doc);
    if (report.empty()) return;
    std::string msg = "process document violates its invariants:";
    for (const auto& v : report) msg += "\n  " + format_violation(v);
    throw InvariantViolation(msg);
}

// --------------------------------------------------------------- emission

void optional_attr(xml::Tag& t, const char* key, const std::optional<std::string>& value) {
    if (value) t.attr(key, *value);
}

xml::Tag condition_tag(const std::string& text) { return {"bpel:condition", {}, {}, text}; }

xml::Tag activity_tag(const Activity& a) {
    using K = Activity::Kind;
    auto hints = [&](xml::Tag& t) {
        optional_attr(t, "bpmn:label", a.label);
        optional_attr(t, "name", a.name);
        optional_attr(t, "bpmn:id", a.bpmn_id);
    };
    switch (a.kind) {
        case K::sequence:
        case K::flow: {
            xml::Tag t{a.kind == K::sequence ? "bpel:sequence" : "bpel:flow", {}, {}, {}};
            hints(t);
            for (const auto& c : a.children) t.add(activity_tag(c));
            return t;
        }
        case K::if_: {
            xml::Tag t{"bpel:if", {}, {}, {}};
            hints(t);
            for (std::size_t i = 0; i < a.conditions.size(); ++i) {
                if (i == 0) {
                    t.add(condition_tag(a.conditions[i]));
                    t.add(activity_tag(a.children[i]));
                } else {
                    auto& elseif = t.add({"bpel:elseif", {}, {}, {}});
                    elseif.add(condition_tag(a.conditions[i]));
                    elseif.add(activity_tag(a.children[i]));
                }
            }
            if (a.has_else) t.add({"bpel:else", {}, {}, {}}).add(activity_tag(a.children.back()));
            return t;
        }
        case K::while_: {
            xml::Tag t{"bpel:while", {}, {}, {}};
            hints(t);
            t.add(condition_tag(a.conditions.at(0)));
            t.add(activity_tag(a.children.at(0)));
            return t;
        }
        case K::receive:
        case K::reply: {
            xml::Tag t{a.kind == K::receive ? "bpel:receive" : "bpel:reply", {}, {}, {}};
            t.attr("partnerLink", a.partner_link).attr("portType", a.port_type).attr("operation", a.operation);
            optional_attr(t, "variable", a.variable);
            optional_attr(t, "faultName", a.fault_name);
            if (a.create_instance) t.attr("createInstance", "yes");
            hints(t);
            return t;
        }
        case K::invoke: {
            xml::Tag t{"bpel:invoke", {}, {}, {}};
            t.attr("partnerLink", a.partner_link).attr("portType", a.port_type).attr("operation", a.operation);
            optional_attr(t, "inputVariable", a.input_variable);
            optional_attr(t, "outputVariable", a.output_variable);
            hints(t);
            return t;
        }
        case K::assign: {
            xml::Tag t{"bpel:assign", {}, {}, {}};
            hints(t);
            for (const auto& c : a.copies) {
                auto& copy = t.add({"bpel:copy", {}, {}, {}});
                xml::Tag from{"bpel:from", {}, {}, {}};
                optional_attr(from, "variable", c.from_variable);
                from.text = c.from_expression;
                copy.add(std::move(from));
                xml::Tag to{"bpel:to", {{"variable", c.to_variable}}, {}, {}};
                optional_attr(to, "part", c.to_part);
                copy.add(std::move(to));
            }
            return t;
        }
    }
    return {};
}

// ----------------------------------------------------------------- parsing

class BpelParser {
public:
    BPELDocument parse(const xml::Element& root) {
        if (root.local == "process" && root.ns != kBpelNs)
            throw MissingNamespace("root 'process' is not in the WS-BPEL namespace " + std::string(kBpelNs));
        if (!root.is(kBpelNs, "process")) throw UnsupportedFeature(root.expanded_name());
        BPELDocument d;
        d.name = attr(root, "name");
        d.target_namespace = attr(root, "targetNamespace");
        if (const auto it = root.scope.find("this"); it != root.scope.end()) d.interface_namespace = it->second;
        bool have_body = false;
        for (const auto& c : root.children) {
            if (c.is(kBpelNs, "import")) {
                d.imports.push_back({attr(c, "namespace"), attr(c, "location"), opt(c, "importType")});
            } else if (c.is(kBpelNs, "partnerLinks")) {
                for (const auto& p : c.children) {
                    expect(p, "partnerLink");
                    d.partner_links.push_back({attr(p, "name"), attr(p, "partnerLinkType"), opt(p, "myRole"), opt(p, "partnerRole")});
                }
            } else if (c.is(kBpelNs, "variables")) {
                for (const auto& v : c.children) {
                    expect(v, "variable");
                    VariableDecl decl{attr(v, "name"), opt(v, "messageType"), opt(v, "element"), opt(v, "type"), {}};
                    if (const auto* f = v.attribute(kSimExtNs, "fields")) decl.fields = parse_fields_attribute(*f);
                    d.variables.push_back(std::move(decl));
                }
            } else if (!have_body && c.ns == kBpelNs) {
                d.body = activity(c);
                have_body = true;
            } else {
                throw UnsupportedFeature(c.expanded_name());
            }
        }
        if (!have_body) throw InvariantViolation("process has no activity");
        return d;
    }

private:
    static std::string attr(const xml::Element& e, const char* name) {
        const auto* v = e.attribute(name);
        if (v == nullptr)
            throw InvariantViolation(e.expanded_name() + " at line " + std::to_string(e.line) + " lacks '" + name + "'");
        return *v;
    }

    static std::optional<std::string> opt(const xml::Element& e, const char* name) {
        const auto* v = e.attribute(name);
        return v ? std::optional<std::string>(*v) : std::nullopt;
    }

    static void expect(const xml::Element& e, const char* local) {
        if (!e.is(kBpelNs, local)) throw UnsupportedFeature(e.expanded_name());
    }

    static std::string condition(const xml::Element& e) {
        expect(e, "condition");
        return trim(e.text);
    }

    Activity activity(const xml::Element& e) {
        using K = Activity::Kind;
        if (e.ns != kBpelNs) throw UnsupportedFeature(e.expanded_name());
        Activity a;
        a.name = opt(e, "name");
        if (const auto* v = e.attribute(kBpmnNs, "label")) a.label = *v;
        if (const auto* v = e.attribute(kBpmnNs, "id")) a.bpmn_id = *v;
        const auto& l = e.local;
        if (l == "sequence" || l == "flow") {
            a.kind = l == "sequence" ? K::sequence : K::flow;
            for (const auto& c : e.children) a.children.push_back(activity(c));
        } else if (l == "if") {
            a.kind = K::if_;
            if (e.children.size() < 2) throw InvariantViolation("if at line " + std::to_string(e.line) + " is incomplete");
            a.conditions.push_back(condition(e.children[0]));
            a.children.push_back(activity(e.children[1]));
            for (std::size_t i = 2; i < e.children.size(); ++i) {
                const auto& c = e.children[i];
                if (a.has_else) throw UnsupportedFeature("branch after else");
                if (c.is(kBpelNs, "elseif") && c.children.size() == 2) {
                    a.conditions.push_back(condition(c.children[0]));
                    a.children.push_back(activity(c.children[1]));
                } else if (c.is(kBpelNs, "else") && c.children.size() == 1) {
                    a.has_else = true;
                    a.children.push_back(activity(c.children[0]));
                } else {
                    throw UnsupportedFeature(c.expanded_name());
                }
            }
        } else if (l == "while") {
            a.kind = K::while_;
            if (e.children.size() != 2) throw InvariantViolation("while at line " + std::to_string(e.line) + " needs a condition and a body");
            a.conditions.push_back(condition(e.children[0]));
            a.children.push_back(activity(e.children[1]));
        } else if (l == "receive" || l == "reply" || l == "invoke") {
            a.kind = l == "receive" ? K::receive : l == "reply" ? K::reply : K::invoke;
            a.partner_link = attr(e, "partnerLink");
            a.port_type = attr(e, "portType");
            a.operation = attr(e, "operation");
            a.variable = opt(e, "variable");
            a.fault_name = opt(e, "faultName");
            a.input_variable = opt(e, "inputVariable");
            a.output_variable = opt(e, "outputVariable");
            a.create_instance = opt(e, "createInstance") == std::optional<std::string>("yes");
            if (!e.children.empty()) throw UnsupportedFeature(e.children[0].expanded_name());
        } else if (l == "assign") {
            a.kind = K::assign;
            for (const auto& c : e.children) {
                expect(c, "copy");
                if (c.children.size() != 2) throw InvariantViolation("copy at line " + std::to_string(c.line) + " needs from and to");
                const auto& from = c.children[0];
                const auto& to = c.children[1];
                expect(from, "from");
                expect(to, "to");
                Copy copy;
                copy.from_variable = opt(from, "variable");
                if (!copy.from_variable) copy.from_expression = trim(from.text);
                copy.to_variable = attr(to, "variable");
                copy.to_part = opt(to, "part");
                a.copies.push_back(std::move(copy));
            }
        } else {
            throw UnsupportedFeature(e.expanded_name());
        }
        return a;
    }
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

const VariableDecl* BPELDocument::find_variable(std::string_view name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

const PartnerLink* BPELDocument::find_partner_link(std::string_view name) const {
    for (const auto& p : partner_links)
        if (p.name == name) return &p;
    return nullptr;
}

ProcessWSDL gen_process_wsdl(const pim::ServiceModel& model, std::string_view composite_name) {
    const auto& c = require_composite(model, composite_name);
    if (!c.behavior_ref) throw InvariantViolation("composite '" + c.name + "' has no behavior");
    const std::string& process = *c.behavior_ref;
    check_process_name(process);
    ProcessWSDL w;
    w.name = process;
    w.target_namespace = naming::process_namespace(model.namespace_uri, c.name, process);
    w.imports.push_back({transform::description_namespace(model.namespace_uri, c.name), c.name + ".wsdl", std::nullopt});
    const auto closure = pim::composition_closure(model, c.name);
    for (const auto& s : closure)
        w.imports.push_back({transform::description_namespace(model.namespace_uri, s), "Service/" + s + ".wsdl", std::nullopt});
    for (const auto& s : closure)
        w.partner_link_types.push_back(
            {naming::component_link_type(process, s), naming::component_role(process), naming::component_port_type(s)});
    w.partner_link_types.push_back(
        {naming::interface_link_type(process), naming::interface_role(process), naming::interface_port_type(process)});
    return w;
}

std::string emit_process_wsdl(const ProcessWSDL& w) {
    check_process_name(w.name);
    xml::Tag root{"wsdl:definitions", {}, {}, {}};
    root.attr("xmlns:wsdl", std::string(kWsdl11Ns));
    root.attr("xmlns:pnlk", std::string(kPlnkNs));
    root.attr("xmlns:tns", w.target_namespace);
    root.attr("xmlns:" + w.name, w.target_namespace);
    root.attr("name", w.name);
    root.attr("targetNamespace", w.target_namespace);
    for (const auto& i : w.imports) root.add({"wsdl:import", {{"namespace", i.namespace_uri}, {"location", i.location}}, {}, {}});
    for (const auto& p : w.partner_link_types) {
        auto& t = root.add({"pnlk:partnerLinkType", {{"name", p.name}}, {}, {}});
        t.add({"pnlk:role", {{"name", p.role}, {"portType", p.port_type}}, {}, {}});
    }
    return xml::write_document(root);
}

BPELDocument gen_bpel(const pim::ServiceModel& model, const behavior::StructuredBehavior& structured,
                      std::string_view composite_name) {
    const auto& c = require_composite(model, composite_name);
    BPELDocument doc = Generator(model, structured, c).run();
    throw_if_unsound(doc);
    return doc;
}

std::string emit_bpel(const BPELDocument& doc) {
    throw_if_unsound(doc);
    xml::Tag root{"bpel:process", {}, {}, {}};
    root.attr("xmlns:bpel", std::string(kBpelNs));
    root.attr("xmlns:bpmn", std::string(kBpmnNs));
    root.attr("xmlns:sim", std::string(kSimExtNs));
    root.attr("xmlns:xs", std::string(kXsdNs));
    if (!doc.interface_namespace.empty()) root.attr("xmlns:this", doc.interface_namespace);
    root.attr("xmlns:tns", doc.target_namespace);
    root.attr("xmlns:Process1", doc.target_namespace);
    root.attr("name", doc.name);
    root.attr("targetNamespace", doc.target_namespace);
    for (const auto& i : doc.imports) {
        xml::Tag t{"bpel:import", {{"namespace", i.namespace_uri}, {"location", i.location}}, {}, {}};
        optional_attr(t, "importType", i.import_type);
        root.add(std::move(t));
    }
    auto& links = root.add({"bpel:partnerLinks", {}, {}, {}});
    for (const auto& p : doc.partner_links) {
        xml::Tag t{"bpel:partnerLink", {{"name", p.name}, {"partnerLinkType", p.partner_link_type}}, {}, {}};
        optional_attr(t, "myRole", p.my_role);
        optional_attr(t, "partnerRole", p.partner_role);
        links.add(std::move(t));
    }
    auto& vars = root.add({"bpel:variables", {}, {}, {}});
    for (const auto& v : doc.variables) {
        xml::Tag t{"bpel:variable", {{"name", v.name}}, {}, {}};
        optional_attr(t, "messageType", v.message_type);
        optional_attr(t, "element", v.element);
        optional_attr(t, "type", v.type);
        if (!v.fields.empty()) t.attr("sim:fields", fields_attribute(v.fields));
        vars.add(std::move(t));
    }
    root.add(activity_tag(doc.body));
    return xml::write_document(root);
}

BPELDocument parse_bpel(std::string_view text) {
    const auto root = xml::parse(text);
    BPELDocument doc = BpelParser().parse(root);
    throw_if_unsound(doc);
    return doc;
}

ValidationReport check(const BPELDocument& doc) { return Checker(doc).run(); }

std::vector<std::filesystem::path> emit_process_artifacts(const pim::ServiceModel& model,
                                                          const behavior::BehaviorModel& behavior,
                                                          std::string_view composite_name,
                                                          const std::filesystem::path& out_dir) {
    auto report = pim::validate(model);
    if (!report.empty()) throw InvalidModel(std::move(report));
    const auto& c = require_composite(model, composite_name);
    auto behavior_report = behavior::validate_behavior(behavior, model, composite_name);
    if (!behavior_report.empty()) throw InvalidModel(std::move(behavior_report), "invalid behavior");

    const auto structured = behavior::normalize_to_structured(behavior);
    const std::string interface_doc = sawsdl::emit_sawsdl(transform::pim_to_psm(model, c.name).description);
    const std::string process_doc = emit_process_wsdl(gen_process_wsdl(model, c.name));
    const std::string bpel_doc = emit_bpel(gen_bpel(model, structured, c.name));

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    const std::vector<std::filesystem::path> paths = {
        out_dir / (c.name + ".wsdl"), out_dir / (c.name + "-Process.wsdl"), out_dir / (c.name + ".bpel")};
    write_file(paths[0], interface_doc);
    write_file(paths[1], process_doc);
    write_file(paths[2], bpel_doc);
    return paths;
}

}  // namespace swsforge::bpel
