// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria, so ctest fails when any of them does.

#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "swsforge/bpel.hpp"
#include "swsforge/cli.hpp"
#include "swsforge/sawsdl.hpp"
#include "swsforge/simulator.hpp"
#include "swsforge/transform.hpp"
#include "swsforge/xml.hpp"

using namespace swsforge;
using swsforge::testing::fixture_path;
using swsforge::testing::read_fixture;
using swsforge::testing::read_text;

namespace {

/// Collects failures of one criterion; the first few are printed.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 5) notes_.push_back(what);
    }
    bool ok() const { return failures_ == 0; }
    int failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    int failures_ = 0;
    std::vector<std::string> notes_;
};

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out) *out = o.str();
    if (code != 0) std::cerr << e.str();
    return code;
}

std::string fx(const char* rel) { return fixture_path(rel).string(); }

std::string canonical_description(const std::string& text) {
    return xml::canonical_form(xml::parse(sawsdl::emit_sawsdl(sawsdl::parse_sawsdl(text))));
}

// ------------------------------------------------------------------ 1

void reference_description(Check& c) {
    const auto dir = testing::scratch_dir("acceptance_reference");
    c.expect(cli({"gen", "sawsdl", fx("models/CardValidate.json"), "CardValidate", "-o", dir.string()}) == 0,
             "gen sawsdl failed");
    const auto generated = read_text(dir / "CardValidate.wsdl");
    const auto reference = read_fixture("sawsdl/CardValidate.reference.wsdl");
    c.expect(canonical_description(generated) == canonical_description(reference),
             "generated description differs canonically from the transcription");

    const auto d = sawsdl::parse_sawsdl(generated);
    c.expect(d.interfaces.size() == 1 && d.interfaces[0].name == "CardValidate", "interface name");
    if (d.interfaces.size() != 1) return;
    const auto& itf = d.interfaces[0];
    c.expect(itf.faults.size() == 1 && itf.faults[0].name == "CheckResult", "fault");
    c.expect(itf.operations.size() == 1 && itf.operations[0].name == "checkCreditCard", "operation");
    const auto* card = d.find_element("CreditCard");
    c.expect(card != nullptr, "CreditCard element");
    if (card == nullptr) return;
    const sawsdl::ComplexContent expected = {{"NumCard", "integer"}, {"ExpirationDate", "integer"}, {"TypeCard", "string"}};
    c.expect(!card->is_simple() && std::get<sawsdl::ComplexContent>(card->content) == expected, "CreditCard children");
    c.expect(card->model_reference &&
                 card->model_reference->uris ==
                     std::vector<std::string>{"http://www.w3.org/2002/ws/sawsdl/spec/ontology/ECommerce#CheckCreditCard"},
             "modelReference URI");
    c.expect(card->lowering_schema_mapping ==
                 std::vector<std::string>{"http://www.w3.org/2002/ws/sawsdl/spec/mapping/RDFOnt2CCreditCard.xml"},
             "loweringSchemaMapping URI");
}

// ------------------------------------------------------------------ 2

void rule_totality(Check& c) {
    // Profile rows: (element, kind, metaclass).
    const std::vector<std::tuple<std::string, std::string, std::string>> rows = {
        {"AtomicSemanticWebService", "Stereotype", "WSDLInterface"},
        {"AtomicSemanticWebService's Method", "Stereotype", "WSDLOperation"},
        {"in param", "Stereotype", "WSDLInput"},
        {"out param", "Stereotype", "WSDLOutput"},
        {"in fault", "Stereotype", "WSDLInfault"},
        {"out fault", "Stereotype", "WSDLOutfault"},
        {"Type", "Stereotype", "XMLSchemaElement"},
        {"SemanticConcept", "Stereotype", "SAWSDLModelReference"},
        {"Mapping", "Stereotype", "SAWSDLSchemaMapping"},
        {"LoweringSchema", "Tag Value", "SAWSDLLoweringSchema"},
        {"LiftingSchema", "Tag Value", "SAWSDLLiftingSchema"},
    };
    const auto& rules = transform::list_rules();
    for (const auto& [element, kind, metaclass] : rows) {
        const auto n = std::count_if(rules.begin(), rules.end(), [&](const transform::TransformRule& r) {
            return r.source_kind == element && r.source_type == kind && r.target_kind == metaclass;
        });
        c.expect(n == 1, "profile row " + element + " -> " + metaclass + " covered " + std::to_string(n) + " times");
    }

    testing::Rng rng(2001);
    int models = 0;
    std::set<std::string> rules_seen;
    while (models < 500) {
        const auto m = testing::random_model(rng, {1, 3, false});
        if (!pim::validate(m).empty()) {
            c.expect(false, "generator produced an invalid model");
            continue;
        }
        ++models;
        for (const auto& s : m.services) {
            const auto r = transform::pim_to_psm(m, s.name);
            const auto expected = testing::expected_sources(m, s.name);
            std::map<std::pair<std::string, std::string>, int> from, wanted;
            std::set<std::string> targets;
            for (const auto& l : r.links) {
                ++from[{l.rule_id, l.source_path}];
                rules_seen.insert(l.rule_id);
                c.expect(targets.insert(l.target_path).second, "target produced twice: " + l.target_path);
                c.expect(transform::resolves(r.description, l.target_path), "dangling target " + l.target_path);
            }
            for (const auto& e : expected) ++wanted[e];
            c.expect(from == wanted, "links of " + s.name + " are not one per model element");
        }
    }
    c.expect(rules_seen.size() == rules.size(), "some rules never fired over the generated corpus");
}

// ------------------------------------------------------------------ 3

void round_trips(Check& c) {
    testing::Rng rng(3001);
    for (int i = 0; i < 500; ++i) {
        const auto m = testing::random_model(rng, {1, 1, false});
        const auto& name = m.services[0].name;
        const auto text = sawsdl::emit_sawsdl(transform::pim_to_psm(m, name).description);
        c.expect(transform::psm_to_pim(sawsdl::parse_sawsdl(text)) == pim::restrict_to(m, name), "model round trip " + std::to_string(i));
    }
    for (int i = 0; i < 500; ++i) {
        const auto d = testing::random_description(rng);
        c.expect(sawsdl::parse_sawsdl(sawsdl::emit_sawsdl(d)) == d, "description round trip " + std::to_string(i));
    }
}

// ------------------------------------------------------------------ 4

void process_structure(Check& c) {
    const auto dir = testing::scratch_dir("acceptance_bpel");
    c.expect(cli({"gen", "bpel", fx("models/ElectronicSale.json"), fx("behaviors/ElectronicSale.json"),
                  "ElectronicSale", "-o", dir.string()}) == 0,
             "gen bpel failed");
    const auto process = xml::parse(read_text(dir / "ElectronicSale-Process.wsdl"));
    const std::string plnk = "http://docs.oasis-open.org/wsbpel/2.0/plnktype";
    const std::string wsdl11 = "http://schemas.xmlsoap.org/wsdl/";
    std::vector<std::string> plts, locations;
    for (const auto& child : process.children) {
        if (child.is(plnk, "partnerLinkType")) plts.push_back(*child.attribute("name"));
        if (child.is(wsdl11, "import")) locations.push_back(*child.attribute("location"));
    }
    c.expect(plts == std::vector<std::string>{"ElectronicSaleProcessAndProcessForPortTypeCardValidateSoapPlk",
                                              "ElectronicSaleProcessAndProcessForPortTypeePaymentSoapPlk",
                                              "ElectronicSaleProcessAndInterface"},
             "partner link types");
    for (const char* loc : {"Service/CardValidate.wsdl", "Service/ePayment.wsdl"})
        c.expect(std::count(locations.begin(), locations.end(), loc) == 1, std::string("import of ") + loc);

    const auto text = read_text(dir / "ElectronicSale.bpel");
    const auto doc = bpel::parse_bpel(text);
    c.expect(bpel::check(doc).empty(), "checker reports violations");
    c.expect(!doc.body.children.empty() && doc.body.children[0].kind == bpel::Activity::Kind::receive &&
                 doc.body.children[0].create_instance,
             "body does not begin with a createInstance receive");
    const std::string ns = "http://docs.oasis-open.org/wsbpel/2.0/process/executable";
    const auto root = xml::parse(text);
    std::map<std::string, int> declared;
    for (const auto& group : root.children)
        if (group.is(ns, "variables"))
            for (const auto& v : group.children) ++declared[*v.attribute("name")];
    const std::map<std::string, std::string> message_vars = {
        {"thisReceive_RequestRequestMsg", "this:Receive_RequestRequest"},
        {"thisReceive_RequestResponseMsg", "this:Receive_RequestResponse"},
        {"tnsCheckCreditCardRequestMsg", "tns:checkCreditCardIn"},
        {"CardValidateServiceCheckCreditCardResponseMsg", "Process1:checkCreditCardResponse"},
        {"tnsPayRequestMsg", "tns:payIn"},
        {"ePaymentServicePayResponseMsg", "Process1:payResponse"},
    };
    for (const auto& [name, type] : message_vars) {
        c.expect(declared[name] == 1, "variable " + name + " declared " + std::to_string(declared[name]) + " times");
        const auto* v = doc.find_variable(name);
        c.expect(v != nullptr && v->message_type == type, "message type of " + name);
    }
    for (const auto& [name, n] : declared) c.expect(n == 1, "variable " + name + " declared twice");
    c.expect(xml::canonical_form(root) == xml::canonical_form(xml::parse(read_fixture("golden/ElectronicSale.bpel"))),
             "BPEL differs from the golden document");
    c.expect(xml::canonical_form(process) ==
                 xml::canonical_form(xml::parse(read_fixture("golden/ElectronicSale-Process.wsdl"))),
             "process WSDL differs from the golden document");
}

// ------------------------------------------------------------------ 5

std::string project(const sim::ExecutionTrace& trace) {
    std::string out;
    for (const auto& e : trace) {
        if (e.kind == sim::Event::Kind::evaluated) continue;
        if (!out.empty()) out += ", ";
        out += sim::to_string(e.kind);
        if (e.kind == sim::Event::Kind::invoked) out += "(" + e.operation + ")";
        if (e.kind == sim::Event::Kind::replied && e.fault) out += "(fault " + *e.fault + ")";
    }
    return out;
}

void sale_semantics(Check& c) {
    const auto dir = testing::scratch_dir("acceptance_sale");
    cli({"gen", "bpel", fx("models/ElectronicSale.json"), fx("behaviors/ElectronicSale.json"), "ElectronicSale", "-o",
         dir.string()});
    const auto doc = bpel::parse_bpel(read_text(dir / "ElectronicSale.bpel"));
    const auto sale = sim::parse_message(read_fixture("messages/sale.json"));
    const auto valid = project(sim::simulate(doc, sim::parse_stubs(read_fixture("stubs/valid-card.json")), sale));
    c.expect(valid == "Received, Invoked(checkCreditCard), Invoked(pay), Replied, Completed", "valid card: " + valid);
    const auto invalid = project(sim::simulate(doc, sim::parse_stubs(read_fixture("stubs/invalid-card.json")), sale));
    c.expect(invalid == "Received, Invoked(checkCreditCard), Replied(fault CheckResult), Completed",
             "invalid card: " + invalid);
}

// ------------------------------------------------------------------ 6

void structuredness(Check& c, int& graphs) {
    for (const auto& entry : std::filesystem::directory_iterator(fixture_path("behaviors"))) {
        const auto b = behavior::parse_behavior(read_text(entry.path()));
        if (b.nodes.size() > 12) continue;
        const auto name = entry.path().stem().string();
        if (name == "Crossing") continue;
        ++graphs;
        try {
            const auto g = behavior::expand_to_graph(behavior::normalize_to_structured(b));
            c.expect(testing::token_game_traces(g) == testing::token_game_traces(b), name + " changes task traces");
        } catch (const Error& e) {
            c.expect(false, name + ": " + e.what());
        }
    }
    bool rejected = false;
    try {
        behavior::normalize_to_structured(behavior::parse_behavior(read_fixture("behaviors/Crossing.json")));
    } catch (const UnstructuredGraph&) {
        rejected = true;
    }
    c.expect(rejected, "crossing graph accepted");
    c.expect(graphs >= 5, "too few fixture graphs");
}

// ------------------------------------------------------------------ 7

void parallel_soundness(Check& c) {
    testing::Rng rng(7001);
    for (int i = 0; i < 200; ++i) {
        testing::Shape flow;
        flow.kind = testing::Shape::Kind::parallel;
        const int branches = testing::uniform(rng, 2, 3);
        for (int k = 0; k < branches; ++k) {
            testing::Shape branch;
            const int n = testing::uniform(rng, 1, 3);
            if (n > 1) {
                branch.kind = testing::Shape::Kind::sequence;
                branch.children.assign(static_cast<std::size_t>(n), testing::Shape{});
            }
            flow.children.push_back(branch);
        }
        const int tasks = testing::count_tasks(flow);
        const auto model = testing::worker_model(tasks);
        const auto doc = bpel::gen_bpel(model, behavior::normalize_to_structured(testing::build_graph(flow, tasks)),
                                        "Orchestrator");
        sim::StubRegistry stubs;
        for (int w = 0; w < tasks; ++w)
            stubs.stubs.push_back({"W" + std::to_string(w), "op", {{std::nullopt, {{"ok", true}, {"count", std::int64_t{w}}}, std::nullopt}}});
        const auto trace = sim::simulate(doc, stubs, {{"id", std::int64_t{1}}, {"note", std::string("n")}});

        testing::TaskTrace invoked;
        for (const auto& e : trace)
            if (e.kind == sim::Event::Kind::invoked) invoked.push_back("t" + e.service.substr(1));
        std::vector<testing::TaskTrace> lanes;
        int next = 0;
        for (const auto& branch : flow.children) {
            testing::TaskTrace lane;
            for (int k = 0; k < testing::count_tasks(branch); ++k) lane.push_back("t" + std::to_string(next++));
            lanes.push_back(lane);
        }
        const auto oracle = testing::interleavings(lanes);
        auto sorted = invoked;
        std::sort(sorted.begin(), sorted.end());
        auto expected = *oracle.begin();
        std::sort(expected.begin(), expected.end());
        c.expect(sorted == expected, "case " + std::to_string(i) + ": invoked multiset differs");
        c.expect(oracle.count(invoked) == 1, "case " + std::to_string(i) + ": order is not an interleaving");
        c.expect(!trace.empty() && trace.back().kind == sim::Event::Kind::completed,
                 "case " + std::to_string(i) + ": did not complete");
    }
}

// ------------------------------------------------------------------ 8

std::map<std::string, std::string> produce_everything(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    auto keep = [&](const std::string& key, const std::string& text) { out[key] = text; };
    for (const char* model : {"CardValidate", "ElectronicSale", "Workflow", "Travel"}) {
        const auto path = fx((std::string("models/") + model + ".json").c_str());
        const auto m = pim::parse_model(read_text(path));
        for (const auto& s : m.services) {
            if (s.kind != pim::ServiceKind::atomic) continue;
            const auto target = dir / model;
            cli({"gen", "sawsdl", path, s.name, "-o", target.string()});
            const auto wsdl = target / (s.name + ".wsdl");
            keep(wsdl.lexically_relative(dir).string(), read_text(wsdl));
            std::string imported;
            cli({"import", wsdl.string()}, &imported);
            keep(wsdl.lexically_relative(dir).string() + ".import", imported);
        }
    }
    const std::vector<std::tuple<std::string, std::string, std::string, std::vector<std::string>>> processes = {
        {"ElectronicSale", "ElectronicSale", "ElectronicSale", {"valid-card:sale", "invalid-card:sale", "guarded-card:expired-sale"}},
        {"Travel", "Travel", "Travel", {"travel:trip", "travel:unconfirmed-trip"}},
        {"Workflow", "Echo", "Echo", {"workflow:job", "workflow:big-job"}},
        {"Workflow", "Sequence", "Sequence", {"workflow:job", "workflow:big-job"}},
        {"Workflow", "Parallel", "Parallel", {"workflow:job", "workflow:big-job"}},
        {"Workflow", "Loop", "Loop", {"workflow:job", "workflow:big-job"}},
        {"Workflow", "Nested", "Nested", {"workflow:job", "workflow:big-job"}},
    };
    for (const auto& [model, behavior, composite, runs] : processes) {
        const auto target = dir / composite;
        cli({"gen", "bpel", fx(("models/" + model + ".json").c_str()), fx(("behaviors/" + behavior + ".json").c_str()),
             composite, "-o", target.string()});
        for (const auto& file : std::filesystem::directory_iterator(target))
            keep(file.path().lexically_relative(dir).string(), read_text(file.path()));
        for (const auto& run : runs) {
            const auto colon = run.find(':');
            std::string trace;
            cli({"simulate", (target / (composite + ".bpel")).string(),
                 fx(("stubs/" + run.substr(0, colon) + ".json").c_str()),
                 fx(("messages/" + run.substr(colon + 1) + ".json").c_str())},
                &trace);
            keep(composite + "/" + run + ".jsonl", trace);
        }
    }
    testing::Rng rng(8001);
    for (int i = 0; i < 50; ++i) {
        keep("random/model" + std::to_string(i), pim::serialize_model(testing::random_model(rng, {1, 3, true})));
        keep("random/description" + std::to_string(i), sawsdl::emit_sawsdl(testing::random_description(rng)));
    }
    return out;
}

void determinism(Check& c) {
    const auto first = produce_everything(testing::scratch_dir("acceptance_run1"));
    const auto second = produce_everything(testing::scratch_dir("acceptance_run2"));
    c.expect(first.size() == second.size(), "different artifact sets");
    c.expect(first.size() > 40, "corpus unexpectedly small: " + std::to_string(first.size()));
    for (const auto& [key, text] : first) {
        const auto it = second.find(key);
        c.expect(it != second.end() && it->second == text, key + " differs between runs");
        c.expect(!text.empty(), key + " is empty");
    }
}

}  // namespace

int main() {
    int graphs = 0;
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"1 description of CardValidate equals the reference transcription", reference_description},
        {"2 every profile row has one rule; trace links are one-to-one on 500 models", rule_totality},
        {"3 round trips on 500 models and 500 descriptions", round_trips},
        {"4 ElectronicSale process WSDL and BPEL structure", process_structure},
        {"5 ElectronicSale traces for valid and invalid cards", sale_semantics},
        {"6 normalization preserves task traces; crossing graph rejected",
         [&](Check& c) { structuredness(c, graphs); }},
        {"7 flow interleavings on 200 random cases", parallel_soundness},
        {"8 byte-identical output across two runs", determinism},
    };
    int failed = 0;
    for (const auto& [title, body] : criteria) {
        Check c;
        try {
            body(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok() ? "PASS" : "FAIL") << "  " << title << '\n';
        for (const auto& note : c.notes()) std::cout << "      " << note << '\n';
        if (!c.ok()) {
            if (c.failures() > 5) std::cout << "      (" << c.failures() << " failures in total)\n";
            ++failed;
        }
    }
    return failed;
}
