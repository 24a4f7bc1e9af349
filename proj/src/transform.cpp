#include "swsforge/transform.hpp"

#include <map>
#include <set>

#include "swsforge/names.hpp"

namespace swsforge::transform {

namespace {

using pim::Direction;

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string_view::npos ? path.size() : slash;
        out.emplace_back(path.substr(start, end - start));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return out;
}

template <typename Range>
auto find_named(const Range& range, const std::string& name) -> decltype(&*range.begin()) {
    for (const auto& item : range)
        if (item.name == name) return &item;
    return nullptr;
}

class Forward {
public:
    Forward(const pim::ServiceModel& model, const pim::Service& service) : model_(model), service_(service) {}

    TransformResult run() {
        TransformResult r;
        r.description.target_namespace = description_namespace(model_.namespace_uri, service_.name);
        types(r);
        interface(r);
        return r;
    }

private:
    void link(TransformResult& r, const char* rule, std::string source, std::string target) {
        r.links.push_back({rule, std::move(source), std::move(target)});
    }

    void types(TransformResult& r) {
        for (const auto& name : pim::reachable_types(model_, service_)) {
            const auto& t = *model_.find_type(name);
            const std::string src = "dataTypes/" + t.name;
            const std::string dst = "schemaElements/" + t.name;
            sawsdl::XMLSchemaElement e;
            e.name = t.name;
            if (t.kind == pim::TypeKind::simple) {
                e.content = t.base_type.value_or("string");
            } else {
                sawsdl::ComplexContent children;
                for (const auto& f : t.fields) children.push_back({f.name, f.type});
                e.content = std::move(children);
            }
            link(r, "type", src, dst);
            if (t.annotation) {
                e.model_reference = sawsdl::ModelReference{t.annotation->concept_uris};
                link(r, "semantic-concept", src + "/concept", dst + "/modelReference");
            }
            if (t.mapping) {
                link(r, "mapping", src + "/mapping", dst + "/schemaMapping");
                if (t.mapping->lowering_schema) {
                    e.lowering_schema_mapping = {*t.mapping->lowering_schema};
                    link(r, "lowering-schema", src + "/mapping/lowering", dst + "/loweringSchemaMapping");
                }
                if (t.mapping->lifting_schema) {
                    e.lifting_schema_mapping = {*t.mapping->lifting_schema};
                    link(r, "lifting-schema", src + "/mapping/lifting", dst + "/liftingSchemaMapping");
                }
            }
            r.description.schema_elements.push_back(std::move(e));
        }
    }

    void interface(TransformResult& r) {
        const auto& itf = service_.interface;
        const std::string src = "services/" + service_.name + "/interface";
        const std::string dst = "interfaces/" + itf.name;
        sawsdl::WSDLInterface out;
        out.name = itf.name;
        link(r, "atomic-service", "services/" + service_.name, dst);
        if (itf.annotation) {
            out.model_reference = sawsdl::ModelReference{itf.annotation->concept_uris};
            link(r, "semantic-concept", src + "/concept", dst + "/modelReference");
        }
        std::set<std::string> declared;
        for (const auto& op : itf.operations) {
            const std::string osrc = src + "/operations/" + op.name;
            const std::string odst = dst + "/operations/" + op.name;
            sawsdl::WSDLOperation o;
            o.name = op.name;
            link(r, "operation", osrc, odst);
            o.pattern = std::string(op.outputs.empty() ? sawsdl::kMepInOnly : sawsdl::kMepInOut);
            link(r, "message-exchange-pattern", osrc, odst + "/pattern");
            if (op.annotation) {
                o.model_reference = sawsdl::ModelReference{op.annotation->concept_uris};
                link(r, "semantic-concept", osrc + "/concept", odst + "/modelReference");
            }
            for (const auto& p : op.inputs) {
                o.input = p.type_ref;
                if (p.name != p.type_ref) o.input_param = p.name;
                link(r, "in-param", osrc + "/params/" + p.name, odst + "/input");
            }
            for (const auto& p : op.outputs) {
                o.output = p.type_ref;
                if (p.name != p.type_ref) o.output_param = p.name;
                link(r, "out-param", osrc + "/params/" + p.name, odst + "/output");
            }
            auto faults = [&](const std::vector<pim::Fault>& fs, std::vector<sawsdl::FaultReference>& refs,
                              const char* rule, const std::string& list) {
                for (const auto& f : fs) {
                    if (declared.insert(f.name).second) out.faults.push_back({f.name, f.type_ref, std::nullopt});
                    refs.push_back({f.name, std::nullopt});
                    link(r, rule, osrc + "/" + list + "/" + f.name, odst + "/" + list + "/" + f.name);
                }
            };
            faults(op.infaults, o.infaults, "in-fault", "infaults");
            faults(op.outfaults, o.outfaults, "out-fault", "outfaults");
            out.operations.push_back(std::move(o));
        }
        r.description.interfaces.push_back(std::move(out));
    }

    const pim::ServiceModel& model_;
    const pim::Service& service_;
};

std::optional<pim::SemanticAnnotation> annotation_of(const std::optional<sawsdl::ModelReference>& ref) {
    if (!ref) return std::nullopt;
    return pim::SemanticAnnotation{ref->uris};
}

std::optional<std::string> single_mapping(const std::vector<std::string>& uris, const std::string& node) {
    if (uris.empty()) return std::nullopt;
    if (uris.size() > 1) throw AmbiguousReverse(node + " (more than one schema mapping URI)");
    return uris.front();
}

pim::Service reverse_interface(const sawsdl::WSDLInterface& itf, std::string service_name) {
    const std::string where = "interface '" + itf.name + "'";
    std::set<std::string> referenced;
    pim::Service s;
    s.name = std::move(service_name);
    s.kind = pim::ServiceKind::atomic;
    s.interface.name = itf.name;
    s.interface.annotation = annotation_of(itf.model_reference);
    for (const auto& f : itf.faults)
        if (f.model_reference) throw AmbiguousReverse("modelReference on fault '" + f.name + "' of " + where);

    for (const auto& o : itf.operations) {
        const std::string owhere = "operation '" + o.name + "' of " + where;
        pim::Operation op;
        op.name = o.name;
        op.annotation = annotation_of(o.model_reference);
        if (!o.input) throw AmbiguousReverse(owhere + " (no input message)");
        op.inputs.push_back({o.input_param.value_or(*o.input), *o.input, Direction::in});
        if (o.output) op.outputs.push_back({o.output_param.value_or(*o.output), *o.output, Direction::out});
        const auto derived = o.output ? sawsdl::kMepInOut : sawsdl::kMepInOnly;
        if (o.pattern != derived) throw AmbiguousReverse(owhere + " (pattern " + o.pattern + ")");
        auto faults = [&](const std::vector<sawsdl::FaultReference>& refs, std::vector<pim::Fault>& out, Direction d) {
            for (const auto& ref : refs) {
                const auto* decl = itf.find_fault(ref.fault);
                if (decl == nullptr) throw AmbiguousReverse("fault reference '" + ref.fault + "' in " + owhere);
                referenced.insert(ref.fault);
                out.push_back({ref.fault, decl->element, d});
            }
        };
        faults(o.infaults, op.infaults, Direction::in);
        faults(o.outfaults, op.outfaults, Direction::out);
        s.interface.operations.push_back(std::move(op));
    }
    for (const auto& f : itf.faults)
        if (referenced.count(f.name) == 0) throw AmbiguousReverse("fault '" + f.name + "' of " + where + " (never referenced)");
    return s;
}

// Splits "<ns>/<service>" as produced by description_namespace.
bool split_namespace(const std::string& tns, std::string& ns, std::string& service) {
    const auto slash = tns.rfind('/');
    if (slash == std::string::npos) return false;
    std::string prefix = tns.substr(0, slash);
    std::string suffix = tns.substr(slash + 1);
    if (!is_ncname(suffix) || !is_absolute_uri(prefix)) return false;
    // "http:/" or "http://" would lose the authority.
    const auto colon = prefix.find(':');
    const std::string rest = prefix.substr(colon + 1);
    if (rest.empty() || rest == "/" || rest == "//") return false;
    ns = std::move(prefix);
    service = std::move(suffix);
    return true;
}

}  // namespace

const std::vector<TransformRule>& list_rules() {
    static const std::vector<TransformRule> rules = {
        {"atomic-service", "AtomicSemanticWebService", "Stereotype", "WSDLInterface",
         "service interface becomes a WSDL interface named after it"},
        {"operation", "AtomicSemanticWebService's Method", "Stereotype", "WSDLOperation",
         "each interface operation becomes a WSDL operation of the same name"},
        {"in-param", "in param", "Stereotype", "WSDLInput",
         "the input parameter becomes the operation input referencing its type's element"},
        {"out-param", "out param", "Stereotype", "WSDLOutput",
         "the output parameter becomes the operation output referencing its type's element"},
        {"in-fault", "in fault", "Stereotype", "WSDLInfault",
         "an in fault becomes an infault reference to an interface fault"},
        {"out-fault", "out fault", "Stereotype", "WSDLOutfault",
         "an out fault becomes an outfault reference to an interface fault"},
        {"type", "Type", "Stereotype", "XMLSchemaElement",
         "a data type becomes a schema element; complex fields keep their order"},
        {"semantic-concept", "SemanticConcept", "Stereotype", "SAWSDLModelReference",
         "concept URIs become a modelReference on the generated node"},
        {"mapping", "Mapping", "Stereotype", "SAWSDLSchemaMapping",
         "a type mapping is carried by its lowering and lifting specializations"},
        {"lowering-schema", "LoweringSchema", "Tag Value", "SAWSDLLoweringSchema",
         "lowering URI becomes loweringSchemaMapping"},
        {"lifting-schema", "LiftingSchema", "Tag Value", "SAWSDLLiftingSchema",
         "lifting URI becomes liftingSchemaMapping"},
        {"message-exchange-pattern", "AtomicSemanticWebService's Method", "Derived", "WSDLOperation pattern",
         "operations without output are in-only, operations with one output in-out"},
    };
    return rules;
}

std::string description_namespace(std::string_view model_namespace, std::string_view service_name) {
    return std::string(model_namespace) + "/" + std::string(service_name);
}

TransformResult pim_to_psm(const pim::ServiceModel& model, std::string_view service_name) {
    const auto* service = model.find_service(service_name);
    if (service == nullptr) throw UnknownService(std::string(service_name));
    auto report = pim::validate(model);
    if (!report.empty()) throw InvalidModel(std::move(report));
    return Forward(model, *service).run();
}

pim::ServiceModel psm_to_pim(const sawsdl::WSDLDescription& desc) {
    pim::ServiceModel m;
    m.namespace_uri = desc.target_namespace;

    std::string ns;
    std::string service;
    const bool single = desc.interfaces.size() == 1 && split_namespace(desc.target_namespace, ns, service);
    if (single) m.namespace_uri = ns;
    for (const auto& itf : desc.interfaces) m.services.push_back(reverse_interface(itf, single ? service : itf.name));

    for (const auto& e : desc.schema_elements) {
        const std::string where = "schema element '" + e.name + "'";
        pim::DataType t;
        t.name = e.name;
        if (const auto* simple = std::get_if<sawsdl::SimpleContent>(&e.content)) {
            t.kind = pim::TypeKind::simple;
            t.base_type = *simple;
        } else {
            t.kind = pim::TypeKind::complex;
            for (const auto& c : std::get<sawsdl::ComplexContent>(e.content)) t.fields.push_back({c.name, c.type});
        }
        t.annotation = annotation_of(e.model_reference);
        auto lowering = single_mapping(e.lowering_schema_mapping, where);
        auto lifting = single_mapping(e.lifting_schema_mapping, where);
        if (lowering || lifting) t.mapping = pim::Mapping{std::move(lowering), std::move(lifting)};
        m.data_types.push_back(std::move(t));
    }
    return m;
}

bool resolves(const pim::ServiceModel& model, std::string_view path) {
    const auto seg = split_path(path);
    const auto n = seg.size();
    if (n >= 2 && seg[0] == "dataTypes") {
        const auto* t = model.find_type(seg[1]);
        if (t == nullptr) return false;
        if (n == 2) return true;
        if (n == 3 && seg[2] == "concept") return t->annotation.has_value();
        if (seg[2] != "mapping" || !t->mapping) return false;
        if (n == 3) return true;
        if (n == 4 && seg[3] == "lowering") return t->mapping->lowering_schema.has_value();
        if (n == 4 && seg[3] == "lifting") return t->mapping->lifting_schema.has_value();
        return false;
    }
    if (n < 2 || seg[0] != "services") return false;
    const auto* s = model.find_service(seg[1]);
    if (s == nullptr) return false;
    if (n == 2) return true;
    if (seg[2] != "interface") return false;
    if (n == 3) return true;
    if (n == 4) return seg[3] == "concept" && s->interface.annotation.has_value();
    if (seg[3] != "operations") return false;
    const auto* op = s->interface.find_operation(seg[4]);
    if (op == nullptr) return false;
    if (n == 5) return true;
    if (n == 6) return seg[5] == "concept" && op->annotation.has_value();
    if (n != 7) return false;
    if (seg[5] == "params") return find_named(op->inputs, seg[6]) || find_named(op->outputs, seg[6]);
    if (seg[5] == "infaults") return find_named(op->infaults, seg[6]) != nullptr;
    if (seg[5] == "outfaults") return find_named(op->outfaults, seg[6]) != nullptr;
    return false;
}

bool resolves(const sawsdl::WSDLDescription& desc, std::string_view path) {
    const auto seg = split_path(path);
    const auto n = seg.size();
    if (n >= 2 && seg[0] == "schemaElements") {
        const auto* e = desc.find_element(seg[1]);
        if (e == nullptr) return false;
        if (n == 2) return true;
        if (n != 3) return false;
        if (seg[2] == "modelReference") return e->model_reference.has_value();
        if (seg[2] == "loweringSchemaMapping") return !e->lowering_schema_mapping.empty();
        if (seg[2] == "liftingSchemaMapping") return !e->lifting_schema_mapping.empty();
        if (seg[2] == "schemaMapping")
            return !e->lowering_schema_mapping.empty() || !e->lifting_schema_mapping.empty();
        return false;
    }
    if (n < 2 || seg[0] != "interfaces") return false;
    const auto* itf = find_named(desc.interfaces, seg[1]);
    if (itf == nullptr) return false;
    if (n == 2) return true;
    if (n == 3) return seg[2] == "modelReference" && itf->model_reference.has_value();
    if (seg[2] == "faults") {
        const auto* f = itf->find_fault(seg[3]);
        if (f == nullptr) return false;
        return n == 4 || (n == 5 && seg[4] == "modelReference" && f->model_reference.has_value());
    }
    if (seg[2] != "operations") return false;
    const auto* op = find_named(itf->operations, seg[3]);
    if (op == nullptr) return false;
    if (n == 4) return true;
    if (n == 5) {
        if (seg[4] == "pattern") return true;
        if (seg[4] == "modelReference") return op->model_reference.has_value();
        if (seg[4] == "input") return op->input.has_value();
        if (seg[4] == "output") return op->output.has_value();
        return false;
    }
    if (n != 6) return false;
    auto has_ref = [&](const std::vector<sawsdl::FaultReference>& refs) {
        for (const auto& r : refs)
            if (r.fault == seg[5]) return true;
        return false;
    };
    if (seg[4] == "infaults") return has_ref(op->infaults);
    if (seg[4] == "outfaults") return has_ref(op->outfaults);
    return false;
}

}  // namespace swsforge::transform
