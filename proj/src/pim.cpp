#include "swsforge/pim.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "json_reader.hpp"
#include "swsforge/names.hpp"

namespace swsforge::pim {

using detail::Json;
using detail::ObjectReader;

namespace {

// ---------------------------------------------------------------- parsing

std::optional<SemanticAnnotation> read_concept(ObjectReader& r) {
    const Json* v = r.optional("concept");
    if (v == nullptr) return std::nullopt;
    SemanticAnnotation a;
    if (v->is_string()) {
        a.concept_uris.push_back(v->get<std::string>());
    } else if (v->is_array()) {
        for (const auto& item : *v) a.concept_uris.push_back(detail::expect_string(item, r.path() + "/concept"));
    } else {
        throw SyntaxError(r.path() + "/concept: expected a string or an array of strings");
    }
    return a;
}

std::vector<Parameter> read_parameters(ObjectReader& parent, const char* key, Direction dir, bool strict) {
    std::vector<Parameter> out;
    std::size_t i = 0;
    for (const auto& item : parent.array(key)) {
        ObjectReader r(item, parent.path() + "/" + key + "/" + std::to_string(i++), strict);
        Parameter p;
        p.name = r.required_string("name");
        p.type_ref = r.required_string("type");
        p.direction = dir;
        r.finish();
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Fault> read_faults(ObjectReader& parent, const char* key, Direction dir, bool strict) {
    std::vector<Fault> out;
    std::size_t i = 0;
    for (const auto& item : parent.array(key)) {
        ObjectReader r(item, parent.path() + "/" + key + "/" + std::to_string(i++), strict);
        Fault f;
        f.name = r.required_string("name");
        f.type_ref = r.optional_string("type");
        f.direction = dir;
        r.finish();
        out.push_back(std::move(f));
    }
    return out;
}

Operation read_operation(const Json& j, const std::string& path, bool strict) {
    ObjectReader r(j, path, strict);
    Operation op;
    op.name = r.required_string("name");
    op.annotation = read_concept(r);
    op.inputs = read_parameters(r, "inputs", Direction::in, strict);
    op.outputs = read_parameters(r, "outputs", Direction::out, strict);
    op.infaults = read_faults(r, "infaults", Direction::in, strict);
    op.outfaults = read_faults(r, "outfaults", Direction::out, strict);
    r.finish();
    return op;
}

Service read_service(const Json& j, const std::string& path, bool strict) {
    ObjectReader r(j, path, strict);
    Service s;
    s.name = r.required_string("name");
    const std::string kind = r.required_string("kind");
    if (kind == "atomic") {
        s.kind = ServiceKind::atomic;
    } else if (kind == "composite") {
        s.kind = ServiceKind::composite;
    } else {
        throw SyntaxError(path + "/kind: expected \"atomic\" or \"composite\"");
    }
    for (const auto& c : r.array("components")) s.components.push_back(detail::expect_string(c, path + "/components"));
    s.behavior_ref = r.optional_string("behavior");

    ObjectReader ir(r.required("interface"), path + "/interface", strict);
    s.interface.name = ir.required_string("name");
    s.interface.annotation = read_concept(ir);
    std::size_t i = 0;
    for (const auto& op : ir.array("operations"))
        s.interface.operations.push_back(read_operation(op, ir.path() + "/operations/" + std::to_string(i++), strict));
    ir.finish();
    r.finish();
    return s;
}

DataType read_type(const Json& j, const std::string& path, bool strict) {
    ObjectReader r(j, path, strict);
    DataType t;
    t.name = r.required_string("name");
    const std::string kind = r.required_string("kind");
    if (kind == "simple") {
        t.kind = TypeKind::simple;
    } else if (kind == "complex") {
        t.kind = TypeKind::complex;
    } else {
        throw SyntaxError(path + "/kind: expected \"simple\" or \"complex\"");
    }
    t.base_type = r.optional_string("baseType");
    std::size_t i = 0;
    for (const auto& f : r.array("fields")) {
        ObjectReader fr(f, path + "/fields/" + std::to_string(i++), strict);
        Field field;
        field.name = fr.required_string("name");
        field.type = fr.required_string("type");
        fr.finish();
        t.fields.push_back(std::move(field));
    }
    t.annotation = read_concept(r);
    auto lowering = r.optional_string("lowering");
    auto lifting = r.optional_string("lifting");
    if (lowering || lifting) t.mapping = Mapping{std::move(lowering), std::move(lifting)};
    r.finish();
    return t;
}

void bind_references(const ServiceModel& m) {
    std::set<std::string> types;
    for (const auto& t : m.data_types) {
        if (!types.insert(t.name).second) throw DuplicateName(t.name, "dataTypes");
        if (t.base_type && !is_xsd_builtin(*t.base_type))
            throw UnresolvedReference(*t.base_type, "dataTypes/" + t.name + "/baseType");
        for (const auto& f : t.fields)
            if (!is_xsd_builtin(f.type)) throw UnresolvedReference(f.type, "dataTypes/" + t.name + "/fields/" + f.name);
    }
    std::set<std::string> services;
    for (const auto& s : m.services)
        if (!services.insert(s.name).second) throw DuplicateName(s.name, "services");

    for (const auto& s : m.services) {
        const std::string base = "services/" + s.name;
        for (const auto& c : s.components)
            if (services.count(c) == 0) throw UnresolvedReference(c, base + "/components");
        for (const auto& op : s.interface.operations) {
            const std::string opath = base + "/interface/operations/" + op.name;
            for (const auto* params : {&op.inputs, &op.outputs})
                for (const auto& p : *params)
                    if (types.count(p.type_ref) == 0) throw UnresolvedReference(p.type_ref, opath + "/" + p.name);
            for (const auto* faults : {&op.infaults, &op.outfaults})
                for (const auto& f : *faults)
                    if (f.type_ref && types.count(*f.type_ref) == 0)
                        throw UnresolvedReference(*f.type_ref, opath + "/faults/" + f.name);
        }
    }
}

// ------------------------------------------------------------- validation

class Validator {
public:
    explicit Validator(const ServiceModel& m) : m_(m) {}

    ValidationReport run() {
        if (!is_absolute_uri(m_.namespace_uri))
            add("NAMESPACE_INVALID", "model", "namespace '" + m_.namespace_uri + "' is not an absolute URI");
        std::set<std::string> type_names;
        for (const auto& t : m_.data_types) {
            check_type(t);
            if (!type_names.insert(t.name).second) add("DUPLICATE_TYPE", type_path(t), "type name declared twice");
        }
        std::set<std::string> service_names;
        for (const auto& s : m_.services) {
            check_service(s);
            if (!service_names.insert(s.name).second)
                add("DUPLICATE_SERVICE", service_path(s), "service name declared twice");
        }
        check_cycles();
        sort_report(report_);
        return std::move(report_);
    }

private:
    const ServiceModel& m_;
    ValidationReport report_;

    static std::string type_path(const DataType& t) { return "dataTypes/" + t.name; }
    static std::string service_path(const Service& s) { return "services/" + s.name; }

    void add(std::string code, std::string path, std::string message) {
        report_.push_back({std::move(code), std::move(path), std::move(message)});
    }

    void check_name(std::string_view name, const std::string& path) {
        if (!is_ncname(name)) add("NAME_INVALID", path, "'" + std::string(name) + "' is not an NCName");
    }

    void check_annotation(const std::optional<SemanticAnnotation>& a, const std::string& path) {
        if (!a) return;
        if (a->concept_uris.empty()) add("ANNOTATION_EMPTY", path, "semantic annotation lists no concept");
        for (const auto& uri : a->concept_uris)
            if (!is_absolute_uri(uri)) add("URI_INVALID", path, "concept '" + uri + "' is not an absolute URI");
    }

    void check_type(const DataType& t) {
        const std::string path = type_path(t);
        check_name(t.name, path);
        check_annotation(t.annotation, path);
        if (t.kind == TypeKind::simple) {
            if (!t.base_type || !t.fields.empty())
                add("SIMPLE_TYPE_SHAPE", path, "simple type needs a base type and no fields");
            if (t.base_type && !is_xsd_builtin(*t.base_type))
                add("UNKNOWN_BUILTIN", path, "'" + *t.base_type + "' is not a supported XML Schema type");
        } else {
            if (t.fields.empty() || t.base_type)
                add("COMPLEX_TYPE_SHAPE", path, "complex type needs fields and no base type");
        }
        std::set<std::string> fields;
        for (const auto& f : t.fields) {
            const std::string fpath = path + "/fields/" + f.name;
            check_name(f.name, fpath);
            if (!fields.insert(f.name).second) add("DUPLICATE_FIELD", fpath, "field declared twice");
            if (!is_xsd_builtin(f.type))
                add("UNKNOWN_BUILTIN", fpath, "'" + f.type + "' is not a supported XML Schema type");
        }
        if (t.mapping) {
            if (!t.mapping->lowering_schema && !t.mapping->lifting_schema)
                add("MAPPING_EMPTY", path, "mapping has neither lowering nor lifting schema");
            for (const auto* uri : {&t.mapping->lowering_schema, &t.mapping->lifting_schema})
                if (*uri && !is_absolute_uri(**uri))
                    add("URI_INVALID", path, "schema mapping '" + **uri + "' is not an absolute URI");
        }
    }

    void check_service(const Service& s) {
        const std::string path = service_path(s);
        check_name(s.name, path);
        if (s.kind == ServiceKind::atomic) {
            if (!s.components.empty()) add("ATOMIC_HAS_COMPONENTS", path, "atomic service lists components");
            if (s.behavior_ref) add("ATOMIC_HAS_BEHAVIOR", path, "atomic service references a behavior");
        } else {
            if (s.components.size() < 2)
                add("COMPOSITE_MIN_COMPONENTS", path,
                    "composite aggregates " + std::to_string(s.components.size()) + " service(s); needs two or more");
            if (!s.behavior_ref || s.behavior_ref->empty())
                add("COMPOSITE_MISSING_BEHAVIOR", path, "composite service has no behavior");
        }
        std::set<std::string> seen;
        for (const auto& c : s.components) {
            if (!seen.insert(c).second) add("DUPLICATE_COMPONENT", path, "component '" + c + "' listed twice");
            if (m_.find_service(c) == nullptr) add("UNRESOLVED_COMPONENT", path, "component '" + c + "' is not declared");
        }
        check_interface(s.interface, path + "/interface");
    }

    void check_interface(const Interface& itf, const std::string& path) {
        check_name(itf.name, path);
        check_annotation(itf.annotation, path);
        if (itf.operations.empty()) add("INTERFACE_NO_OPERATIONS", path, "interface declares no operation");
        std::set<std::string> ops;
        std::map<std::string, std::optional<std::string>> fault_types;
        for (const auto& op : itf.operations) {
            const std::string opath = path + "/operations/" + op.name;
            if (!ops.insert(op.name).second) add("DUPLICATE_OPERATION", opath, "operation declared twice");
            check_operation(op, opath);
            for (const auto* faults : {&op.infaults, &op.outfaults}) {
                for (const auto& f : *faults) {
                    auto [it, fresh] = fault_types.emplace(f.name, f.type_ref);
                    if (!fresh && it->second != f.type_ref)
                        add("FAULT_TYPE_CONFLICT", path, "fault '" + f.name + "' is used with different types");
                }
            }
        }
    }

    void check_operation(const Operation& op, const std::string& path) {
        check_name(op.name, path);
        check_annotation(op.annotation, path);
        if (op.inputs.size() != 1)
            add("OPERATION_INPUT_ARITY", path,
                "operation has " + std::to_string(op.inputs.size()) + " input parameters; exactly one is required");
        if (op.outputs.size() > 1)
            add("OPERATION_OUTPUT_ARITY", path,
                "operation has " + std::to_string(op.outputs.size()) + " output parameters; at most one is allowed");
        std::set<std::string> params;
        auto check_params = [&](const std::vector<Parameter>& ps, Direction expected) {
            for (const auto& p : ps) {
                const std::string ppath = path + "/params/" + p.name;
                check_name(p.name, ppath);
                if (!params.insert(p.name).second) add("DUPLICATE_PARAMETER", ppath, "parameter declared twice");
                if (p.direction != expected) add("PARAMETER_DIRECTION", ppath, "parameter direction disagrees with its list");
                if (m_.find_type(p.type_ref) == nullptr)
                    add("UNRESOLVED_TYPE", ppath, "type '" + p.type_ref + "' is not declared");
            }
        };
        check_params(op.inputs, Direction::in);
        check_params(op.outputs, Direction::out);
        auto check_faults = [&](const std::vector<Fault>& fs, Direction expected, const char* list) {
            std::set<std::string> names;
            for (const auto& f : fs) {
                const std::string fpath = path + "/" + list + "/" + f.name;
                check_name(f.name, fpath);
                if (!names.insert(f.name).second) add("DUPLICATE_FAULT", fpath, "fault listed twice");
                if (f.direction != expected) add("PARAMETER_DIRECTION", fpath, "fault direction disagrees with its list");
                if (f.type_ref && m_.find_type(*f.type_ref) == nullptr)
                    add("UNRESOLVED_TYPE", fpath, "type '" + *f.type_ref + "' is not declared");
            }
        };
        check_faults(op.infaults, Direction::in, "infaults");
        check_faults(op.outfaults, Direction::out, "outfaults");
    }

    void check_cycles() {
        for (const auto& s : m_.services) {
            if (s.kind != ServiceKind::composite) continue;
            std::set<std::string> visited;
            std::vector<std::string> stack(s.components.begin(), s.components.end());
            bool cyclic = false;
            while (!stack.empty() && !cyclic) {
                const std::string cur = stack.back();
                stack.pop_back();
                if (cur == s.name) {
                    cyclic = true;
                    break;
                }
                if (!visited.insert(cur).second) continue;
                if (const Service* next = m_.find_service(cur))
                    stack.insert(stack.end(), next->components.begin(), next->components.end());
            }
            if (cyclic) add("COMPOSITION_CYCLE", service_path(s), "service reaches itself through its components");
        }
    }
};

// ---------------------------------------------------------- serialization

using OJson = nlohmann::ordered_json;

OJson concept_json(const SemanticAnnotation& a) {
    OJson arr = OJson::array();
    for (const auto& uri : a.concept_uris) arr.push_back(uri);
    return arr;
}

OJson params_json(const std::vector<Parameter>& ps) {
    OJson arr = OJson::array();
    for (const auto& p : ps) arr.push_back(OJson{{"name", p.name}, {"type", p.type_ref}});
    return arr;
}

OJson faults_json(const std::vector<Fault>& fs) {
    OJson arr = OJson::array();
    for (const auto& f : fs) {
        OJson o{{"name", f.name}};
        if (f.type_ref) o["type"] = *f.type_ref;
        arr.push_back(std::move(o));
    }
    return arr;
}

}  // namespace

const Operation* Interface::find_operation(std::string_view op_name) const {
    for (const auto& op : operations)
        if (op.name == op_name) return &op;
    return nullptr;
}

const Service* ServiceModel::find_service(std::string_view name) const {
    for (const auto& s : services)
        if (s.name == name) return &s;
    return nullptr;
}

const DataType* ServiceModel::find_type(std::string_view name) const {
    for (const auto& t : data_types)
        if (t.name == name) return &t;
    return nullptr;
}

ServiceModel parse_model(std::string_view document, const ParseOptions& options) {
    const Json root = detail::parse_json(document);
    ObjectReader r(root, "model", options.strict);
    ServiceModel m;
    m.namespace_uri = r.required_string("namespace");
    std::size_t i = 0;
    for (const auto& t : r.array("dataTypes"))
        m.data_types.push_back(read_type(t, "dataTypes/" + std::to_string(i++), options.strict));
    i = 0;
    for (const auto& s : r.array("services"))
        m.services.push_back(read_service(s, "services/" + std::to_string(i++), options.strict));
    r.finish();
    bind_references(m);
    return m;
}

std::string serialize_model(const ServiceModel& model) {
    ValidationReport report = validate(model);
    if (!report.empty()) throw InvalidModel(std::move(report));

    OJson root;
    root["namespace"] = model.namespace_uri;
    OJson types = OJson::array();
    for (const auto& t : model.data_types) {
        OJson o{{"name", t.name}, {"kind", to_string(t.kind)}};
        if (t.base_type) o["baseType"] = *t.base_type;
        if (!t.fields.empty()) {
            OJson fields = OJson::array();
            for (const auto& f : t.fields) fields.push_back(OJson{{"name", f.name}, {"type", f.type}});
            o["fields"] = std::move(fields);
        }
        if (t.annotation) o["concept"] = concept_json(*t.annotation);
        if (t.mapping && t.mapping->lowering_schema) o["lowering"] = *t.mapping->lowering_schema;
        if (t.mapping && t.mapping->lifting_schema) o["lifting"] = *t.mapping->lifting_schema;
        types.push_back(std::move(o));
    }
    root["dataTypes"] = std::move(types);

    OJson services = OJson::array();
    for (const auto& s : model.services) {
        OJson o{{"name", s.name}, {"kind", to_string(s.kind)}};
        if (!s.components.empty()) o["components"] = s.components;
        if (s.behavior_ref) o["behavior"] = *s.behavior_ref;
        OJson itf{{"name", s.interface.name}};
        if (s.interface.annotation) itf["concept"] = concept_json(*s.interface.annotation);
        OJson ops = OJson::array();
        for (const auto& op : s.interface.operations) {
            OJson jo{{"name", op.name}};
            if (op.annotation) jo["concept"] = concept_json(*op.annotation);
            jo["inputs"] = params_json(op.inputs);
            jo["outputs"] = params_json(op.outputs);
            jo["infaults"] = faults_json(op.infaults);
            jo["outfaults"] = faults_json(op.outfaults);
            ops.push_back(std::move(jo));
        }
        itf["operations"] = std::move(ops);
        o["interface"] = std::move(itf);
        services.push_back(std::move(o));
    }
    root["services"] = std::move(services);
    return root.dump(2) + "\n";
}

ValidationReport validate(const ServiceModel& model) {
    return Validator(model).run();
}

std::vector<std::string> composition_closure(const ServiceModel& model, std::string_view service_name) {
    std::vector<std::string> out;
    std::set<std::string> emitted;
    std::vector<std::string> active;
    std::function<void(std::string_view)> visit = [&](std::string_view name) {
        const Service* s = model.find_service(name);
        if (s == nullptr) throw UnknownService(std::string(name));
        if (std::find(active.begin(), active.end(), name) != active.end()) throw CompositionCycle(std::string(name));
        if (s->kind == ServiceKind::atomic) {
            if (emitted.insert(s->name).second) out.push_back(s->name);
            return;
        }
        active.push_back(s->name);
        for (const auto& c : s->components) visit(c);
        active.pop_back();
    };
    visit(service_name);
    return out;
}

std::vector<std::string> reachable_types(const ServiceModel& model, const Service& service) {
    std::set<std::string> used;
    for (const auto& op : service.interface.operations) {
        for (const auto* ps : {&op.inputs, &op.outputs})
            for (const auto& p : *ps) used.insert(p.type_ref);
        for (const auto* fs : {&op.infaults, &op.outfaults})
            for (const auto& f : *fs)
                if (f.type_ref) used.insert(*f.type_ref);
    }
    std::vector<std::string> out;
    for (const auto& t : model.data_types)
        if (used.count(t.name) != 0) out.push_back(t.name);
    return out;
}

ServiceModel restrict_to(const ServiceModel& model, std::string_view service_name) {
    const Service* s = model.find_service(service_name);
    if (s == nullptr) throw UnknownService(std::string(service_name));
    ServiceModel out;
    out.namespace_uri = model.namespace_uri;
    out.services.push_back(*s);
    for (const auto& name : reachable_types(model, *s)) out.data_types.push_back(*model.find_type(name));
    return out;
}

std::vector<Field> message_fields(const ServiceModel& model, std::string_view type_name) {
    const auto* t = model.find_type(type_name);
    if (t == nullptr) return {};
    if (t->kind == TypeKind::complex) return t->fields;
    return {{t->name, t->base_type.value_or("string")}};
}

std::string_view to_string(ServiceKind kind) {
    return kind == ServiceKind::atomic ? "atomic" : "composite";
}

std::string_view to_string(TypeKind kind) {
    return kind == TypeKind::simple ? "simple" : "complex";
}

}  // namespace swsforge::pim
