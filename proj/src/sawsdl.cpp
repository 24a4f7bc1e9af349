#include "swsforge/sawsdl.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "swsforge/names.hpp"
#include "swsforge/xml.hpp"

namespace swsforge::sawsdl {

namespace {

std::string join_uris(const std::vector<std::string>& uris) {
    std::string out;
    for (const auto& u : uris) {
        if (!out.empty()) out += ' ';
        out += u;
    }
    return out;
}

std::vector<std::string> split_uris(std::string_view value) {
    std::vector<std::string> out;
    std::istringstream in{std::string(value)};
    std::string item;
    while (in >> item) out.push_back(item);
    return out;
}

void add_sawsdl_attributes(xml::Tag& tag, const std::optional<ModelReference>& ref,
                           const std::vector<std::string>& lowering = {},
                           const std::vector<std::string>& lifting = {}) {
    if (ref) tag.attr("sawsdl:modelReference", join_uris(ref->uris));
    if (!lowering.empty()) tag.attr("sawsdl:loweringSchemaMapping", join_uris(lowering));
    if (!lifting.empty()) tag.attr("sawsdl:liftingSchemaMapping", join_uris(lifting));
}

void check_uris(ValidationReport& r, const std::string& path, const std::vector<std::string>& uris) {
    for (const auto& u : uris)
        if (!is_absolute_uri(u)) r.push_back({"URI_INVALID", path, "'" + u + "' is not an absolute URI"});
}

void check_reference(ValidationReport& r, const std::string& path, const std::optional<ModelReference>& ref) {
    if (!ref) return;
    if (ref->uris.empty()) r.push_back({"MODEL_REFERENCE_EMPTY", path, "modelReference lists no URI"});
    check_uris(r, path, ref->uris);
}

void check_name(ValidationReport& r, const std::string& path, std::string_view name) {
    if (!is_ncname(name)) r.push_back({"NAME_INVALID", path, "'" + std::string(name) + "' is not an NCName"});
}

// ------------------------------------------------------------------ parser

class DescriptionParser {
public:
    WSDLDescription parse(const xml::Element& root) {
        if (root.local != "description") {
            if (root.ns == kWsdlNs) throw UnsupportedFeature(root.expanded_name());
            throw UnsupportedFeature(root.expanded_name());
        }
        if (root.ns != kWsdlNs)
            throw MissingNamespace("root 'description' is not in the WSDL 2.0 namespace " + std::string(kWsdlNs));
        reject_misplaced_annotations(root);

        WSDLDescription desc;
        if (const auto* tns = root.attribute("targetNamespace")) desc.target_namespace = trim(*tns);
        for (const auto& child : root.children) {
            if (child.is(kWsdlNs, "documentation")) continue;
            if (child.is(kWsdlNs, "types")) {
                parse_types(child, desc);
            } else if (child.is(kWsdlNs, "interface")) {
                desc.interfaces.push_back(parse_interface(child));
            } else {
                throw UnsupportedFeature(child.expanded_name());
            }
        }
        return desc;
    }

private:
    static void reject_misplaced_annotations(const xml::Element& el) {
        if (el.attribute(kSawsdlNs, "modelReference") || el.attribute(kSawsdlNs, "loweringSchemaMapping") ||
            el.attribute(kSawsdlNs, "liftingSchemaMapping"))
            throw UnsupportedFeature("SAWSDL annotation on " + el.expanded_name());
    }

    static std::optional<ModelReference> model_reference(const xml::Element& el) {
        const auto* v = el.attribute(kSawsdlNs, "modelReference");
        if (v == nullptr) return std::nullopt;
        return ModelReference{split_uris(*v)};
    }

    static std::string required(const xml::Element& el, const char* name) {
        const auto* v = el.attribute(name);
        if (v == nullptr)
            throw InvariantViolation(el.expanded_name() + " at line " + std::to_string(el.line) +
                                     " lacks attribute '" + name + "'");
        return trim(*v);
    }

    static std::string builtin_type(const xml::Element& el) {
        const auto q = el.resolve(required(el, "type"));
        if (!q) throw InvariantViolation("unbound prefix in type of element at line " + std::to_string(el.line));
        if (q->ns != kXsdNs || !is_xsd_builtin(q->local))
            throw UnsupportedFeature("element type {" + q->ns + "}" + q->local);
        return q->local;
    }

    static std::string local_ref(const xml::Element& el, const char* attr) {
        const auto q = el.resolve(required(el, attr));
        if (!q) throw InvariantViolation("unbound prefix in '" + std::string(attr) + "' at line " + std::to_string(el.line));
        return q->local;
    }

    void parse_types(const xml::Element& types, WSDLDescription& desc) {
        for (const auto& child : types.children) {
            if (child.is(kXsdNs, "schema")) {
                for (const auto& el : child.children) {
                    if (el.is(kXsdNs, "annotation")) continue;
                    if (!el.is(kXsdNs, "element")) throw UnsupportedFeature(el.expanded_name());
                    desc.schema_elements.push_back(parse_schema_element(el));
                }
            } else if (child.is(kXsdNs, "element")) {
                desc.schema_elements.push_back(parse_schema_element(child));
            } else if (!child.is(kWsdlNs, "documentation")) {
                throw UnsupportedFeature(child.expanded_name());
            }
        }
    }

    XMLSchemaElement parse_schema_element(const xml::Element& el) {
        XMLSchemaElement out;
        out.name = required(el, "name");
        out.model_reference = model_reference(el);
        if (const auto* v = el.attribute(kSawsdlNs, "loweringSchemaMapping")) out.lowering_schema_mapping = split_uris(*v);
        if (const auto* v = el.attribute(kSawsdlNs, "liftingSchemaMapping")) out.lifting_schema_mapping = split_uris(*v);

        if (el.attribute("type") != nullptr) {
            if (!el.children.empty()) throw UnsupportedFeature("element with both type and inline content");
            out.content = builtin_type(el);
            return out;
        }
        if (el.children.size() != 1 || !el.children[0].is(kXsdNs, "complexType"))
            throw UnsupportedFeature("schema element '" + out.name + "' content");
        const auto& ct = el.children[0];
        reject_misplaced_annotations(ct);
        if (ct.children.size() != 1 || !ct.children[0].is(kXsdNs, "sequence"))
            throw UnsupportedFeature("complexType content of '" + out.name + "'");
        ComplexContent children;
        for (const auto& c : ct.children[0].children) {
            if (!c.is(kXsdNs, "element")) throw UnsupportedFeature(c.expanded_name());
            reject_misplaced_annotations(c);
            if (!c.children.empty()) throw UnsupportedFeature("nested content in '" + out.name + "'");
            children.push_back({required(c, "name"), builtin_type(c)});
        }
        out.content = std::move(children);
        return out;
    }

    WSDLInterface parse_interface(const xml::Element& el) {
        WSDLInterface itf;
        itf.name = required(el, "name");
        if (el.attribute("extends") != nullptr) throw UnsupportedFeature("interface extends");
        itf.model_reference = model_reference(el);
        for (const auto& child : el.children) {
            if (child.is(kWsdlNs, "documentation")) continue;
            if (child.is(kWsdlNs, "fault")) {
                WSDLInterfaceFault f;
                f.name = required(child, "name");
                if (child.attribute("element") != nullptr) f.element = local_ref(child, "element");
                f.model_reference = model_reference(child);
                itf.faults.push_back(std::move(f));
            } else if (child.is(kWsdlNs, "operation")) {
                itf.operations.push_back(parse_operation(child));
            } else {
                throw UnsupportedFeature(child.expanded_name());
            }
        }
        return itf;
    }

    static FaultReference fault_reference(const xml::Element& el) {
        FaultReference ref;
        ref.fault = local_ref(el, "ref");
        if (const auto* label = el.attribute("messageLabel")) ref.message_label = trim(*label);
        return ref;
    }

    WSDLOperation parse_operation(const xml::Element& el) {
        WSDLOperation op;
        op.name = required(el, "name");
        op.pattern = required(el, "pattern");
        if (op.pattern == kMepInAbbreviated) op.pattern = std::string(kMepInOnly);
        if (!is_supported_pattern(op.pattern)) throw UnsupportedFeature("pattern " + op.pattern);
        op.model_reference = model_reference(el);
        for (const auto& child : el.children) {
            if (child.is(kWsdlNs, "documentation")) continue;
            reject_misplaced_annotations(child);
            const auto* param = child.attribute(kPimExtNs, "param");
            if (child.is(kWsdlNs, "input")) {
                if (op.input) throw UnsupportedFeature("second wsdl:input in operation '" + op.name + "'");
                op.input = local_ref(child, "element");
                if (param) op.input_param = *param;
            } else if (child.is(kWsdlNs, "output")) {
                if (child.attribute("element") == nullptr && child.attribute("fault") != nullptr) {
                    // <output fault="X" .../> is read as <outfault ref="X"/>; its
                    // messageLabel names the fault rather than a message and is dropped.
                    op.outfaults.push_back({local_ref(child, "fault"), std::nullopt});
                    continue;
                }
                if (op.output) throw UnsupportedFeature("second wsdl:output in operation '" + op.name + "'");
                op.output = local_ref(child, "element");
                if (param) op.output_param = *param;
            } else if (child.is(kWsdlNs, "infault")) {
                op.infaults.push_back(fault_reference(child));
            } else if (child.is(kWsdlNs, "outfault")) {
                op.outfaults.push_back(fault_reference(child));
            } else {
                throw UnsupportedFeature(child.expanded_name());
            }
        }
        return op;
    }
};

}  // namespace

bool is_supported_pattern(std::string_view uri) {
    return uri == kMepInOnly || uri == kMepRobustInOnly || uri == kMepInOut || uri == kMepInOptOut;
}

const WSDLInterfaceFault* WSDLInterface::find_fault(std::string_view fault_name) const {
    for (const auto& f : faults)
        if (f.name == fault_name) return &f;
    return nullptr;
}

const XMLSchemaElement* WSDLDescription::find_element(std::string_view element_name) const {
    for (const auto& e : schema_elements)
        if (e.name == element_name) return &e;
    return nullptr;
}

ValidationReport check(const WSDLDescription& desc) {
    ValidationReport r;
    const bool empty = desc.schema_elements.empty() && desc.interfaces.empty();
    if (!(empty && desc.target_namespace.empty()) && !is_absolute_uri(desc.target_namespace))
        r.push_back({"NAMESPACE_INVALID", "description", "targetNamespace '" + desc.target_namespace + "' is not an absolute URI"});

    std::set<std::string> elements;
    for (const auto& e : desc.schema_elements) {
        const std::string path = "schemaElements/" + e.name;
        check_name(r, path, e.name);
        if (!elements.insert(e.name).second) r.push_back({"DUPLICATE_ELEMENT", path, "element declared twice"});
        check_reference(r, path, e.model_reference);
        check_uris(r, path, e.lowering_schema_mapping);
        check_uris(r, path, e.lifting_schema_mapping);
        if (const auto* simple = std::get_if<SimpleContent>(&e.content)) {
            if (!is_xsd_builtin(*simple)) r.push_back({"UNKNOWN_BUILTIN", path, "'" + *simple + "' is not a built-in type"});
        } else {
            const auto& children = std::get<ComplexContent>(e.content);
            if (children.empty()) r.push_back({"COMPLEX_TYPE_SHAPE", path, "complex element has no children"});
            std::set<std::string> names;
            for (const auto& c : children) {
                check_name(r, path + "/" + c.name, c.name);
                if (!names.insert(c.name).second) r.push_back({"DUPLICATE_FIELD", path + "/" + c.name, "child declared twice"});
                if (!is_xsd_builtin(c.type)) r.push_back({"UNKNOWN_BUILTIN", path + "/" + c.name, "'" + c.type + "' is not a built-in type"});
            }
        }
    }

    std::set<std::string> interfaces;
    for (const auto& itf : desc.interfaces) {
        const std::string ipath = "interfaces/" + itf.name;
        check_name(r, ipath, itf.name);
        if (!interfaces.insert(itf.name).second) r.push_back({"DUPLICATE_INTERFACE", ipath, "interface declared twice"});
        check_reference(r, ipath, itf.model_reference);
        std::set<std::string> faults;
        for (const auto& f : itf.faults) {
            const std::string fpath = ipath + "/faults/" + f.name;
            check_name(r, fpath, f.name);
            if (!faults.insert(f.name).second) r.push_back({"DUPLICATE_FAULT", fpath, "fault declared twice"});
            if (f.element && elements.count(*f.element) == 0)
                r.push_back({"UNRESOLVED_ELEMENT", fpath, "element '" + *f.element + "' is not declared"});
            check_reference(r, fpath, f.model_reference);
        }
        std::set<std::string> ops;
        for (const auto& op : itf.operations) {
            const std::string opath = ipath + "/operations/" + op.name;
            check_name(r, opath, op.name);
            if (!ops.insert(op.name).second) r.push_back({"DUPLICATE_OPERATION", opath, "operation declared twice"});
            if (!is_supported_pattern(op.pattern)) r.push_back({"PATTERN_UNSUPPORTED", opath, "pattern '" + op.pattern + "'"});
            check_reference(r, opath, op.model_reference);
            for (const auto* ref : {&op.input, &op.output})
                if (*ref && elements.count(**ref) == 0)
                    r.push_back({"UNRESOLVED_ELEMENT", opath, "element '" + **ref + "' is not declared"});
            for (const auto* refs : {&op.infaults, &op.outfaults})
                for (const auto& fr : *refs)
                    if (faults.count(fr.fault) == 0)
                        r.push_back({"UNRESOLVED_FAULT", opath, "fault '" + fr.fault + "' is not declared on the interface"});
        }
    }
    sort_report(r);
    return r;
}

std::string emit_sawsdl(const WSDLDescription& desc) {
    const auto report = check(desc);
    if (!report.empty()) {
        std::string msg = "description violates its invariants:";
        for (const auto& v : report) msg += "\n  " + format_violation(v);
        throw InvariantViolation(msg);
    }

    bool uses_param_ext = false;
    for (const auto& itf : desc.interfaces)
        for (const auto& op : itf.operations)
            uses_param_ext = uses_param_ext || op.input_param || op.output_param;

    xml::Tag root{"wsdl:description", {}, {}, {}};
    root.attr("xmlns:wsdl", std::string(kWsdlNs));
    root.attr("xmlns:sawsdl", std::string(kSawsdlNs));
    root.attr("xmlns:xs", std::string(kXsdNs));
    if (uses_param_ext) root.attr("xmlns:pim", std::string(kPimExtNs));
    if (!desc.target_namespace.empty()) {
        root.attr("xmlns:tns", desc.target_namespace);
        root.attr("targetNamespace", desc.target_namespace);
    }

    if (!desc.schema_elements.empty()) {
        auto& schema = root.add({"wsdl:types", {}, {}, {}}).add({"xs:schema", {}, {}, {}});
        schema.attr("targetNamespace", desc.target_namespace).attr("elementFormDefault", "qualified");
        for (const auto& e : desc.schema_elements) {
            xml::Tag el{"xs:element", {}, {}, {}};
            el.attr("name", e.name);
            if (const auto* simple = std::get_if<SimpleContent>(&e.content)) el.attr("type", "xs:" + *simple);
            add_sawsdl_attributes(el, e.model_reference, e.lowering_schema_mapping, e.lifting_schema_mapping);
            if (const auto* complex = std::get_if<ComplexContent>(&e.content)) {
                auto& seq = el.add({"xs:complexType", {}, {}, {}}).add({"xs:sequence", {}, {}, {}});
                for (const auto& c : *complex)
                    seq.add({"xs:element", {{"name", c.name}, {"type", "xs:" + c.type}}, {}, {}});
            }
            schema.add(std::move(el));
        }
    }

    for (const auto& itf : desc.interfaces) {
        xml::Tag it{"wsdl:interface", {}, {}, {}};
        it.attr("name", itf.name);
        add_sawsdl_attributes(it, itf.model_reference);
        for (const auto& f : itf.faults) {
            xml::Tag ft{"wsdl:fault", {{"name", f.name}}, {}, {}};
            if (f.element) ft.attr("element", "tns:" + *f.element);
            add_sawsdl_attributes(ft, f.model_reference);
            it.add(std::move(ft));
        }
        for (const auto& op : itf.operations) {
            xml::Tag ot{"wsdl:operation", {{"name", op.name}, {"pattern", op.pattern}}, {}, {}};
            add_sawsdl_attributes(ot, op.model_reference);
            auto message = [&](const char* tag, const std::optional<std::string>& element,
                               const std::optional<std::string>& param) {
                if (!element) return;
                xml::Tag m{tag, {{"element", "tns:" + *element}}, {}, {}};
                if (param) m.attr("pim:param", *param);
                ot.add(std::move(m));
            };
            message("wsdl:input", op.input, op.input_param);
            message("wsdl:output", op.output, op.output_param);
            auto faults = [&](const char* tag, const std::vector<FaultReference>& refs) {
                for (const auto& fr : refs) {
                    xml::Tag t{tag, {{"ref", "tns:" + fr.fault}}, {}, {}};
                    if (fr.message_label) t.attr("messageLabel", *fr.message_label);
                    ot.add(std::move(t));
                }
            };
            faults("wsdl:infault", op.infaults);
            faults("wsdl:outfault", op.outfaults);
            it.add(std::move(ot));
        }
        root.add(std::move(it));
    }
    return xml::write_document(root);
}

WSDLDescription parse_sawsdl(std::string_view text) {
    const xml::Element root = xml::parse(text);
    WSDLDescription desc = DescriptionParser().parse(root);
    const auto report = check(desc);
    if (!report.empty()) {
        std::string msg = "parsed description violates its invariants:";
        for (const auto& v : report) msg += "\n  " + format_violation(v);
        throw InvariantViolation(msg);
    }
    return desc;
}

WSDLDescription canonicalize(WSDLDescription desc) {
    auto by_name = [](const auto& a, const auto& b) { return a.name < b.name; };
    auto normalize_uris = [](std::vector<std::string>& uris) {
        for (auto& u : uris) u = trim(u);
        std::sort(uris.begin(), uris.end());
        uris.erase(std::unique(uris.begin(), uris.end()), uris.end());
    };
    auto normalize_ref = [&](std::optional<ModelReference>& ref) {
        if (ref) normalize_uris(ref->uris);
    };

    desc.target_namespace = trim(desc.target_namespace);
    for (auto& e : desc.schema_elements) {
        e.name = trim(e.name);
        normalize_ref(e.model_reference);
        normalize_uris(e.lowering_schema_mapping);
        normalize_uris(e.lifting_schema_mapping);
    }
    std::sort(desc.schema_elements.begin(), desc.schema_elements.end(), by_name);
    for (auto& itf : desc.interfaces) {
        itf.name = trim(itf.name);
        normalize_ref(itf.model_reference);
        for (auto& f : itf.faults) normalize_ref(f.model_reference);
        std::sort(itf.faults.begin(), itf.faults.end(), by_name);
        for (auto& op : itf.operations) {
            op.name = trim(op.name);
            op.pattern = trim(op.pattern);
            normalize_ref(op.model_reference);
            auto by_fault = [](const FaultReference& a, const FaultReference& b) { return a.fault < b.fault; };
            std::sort(op.infaults.begin(), op.infaults.end(), by_fault);
            std::sort(op.outfaults.begin(), op.outfaults.end(), by_fault);
        }
        std::sort(itf.operations.begin(), itf.operations.end(), by_name);
    }
    std::sort(desc.interfaces.begin(), desc.interfaces.end(), by_name);
    return desc;
}

}  // namespace swsforge::sawsdl
