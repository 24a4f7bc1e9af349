#include <catch_amalgamated.hpp>

#include <algorithm>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "swsforge/behavior.hpp"

using namespace swsforge;
using namespace swsforge::behavior;
using swsforge::testing::read_fixture;

namespace {

bool has_code(const ValidationReport& r, const std::string& code) {
    return std::any_of(r.begin(), r.end(), [&](const Violation& v) { return v.code == code; });
}

pim::ServiceModel sale_model() { return pim::parse_model(read_fixture("models/ElectronicSale.json")); }

BehaviorModel sale_behavior() { return parse_behavior(read_fixture("behaviors/ElectronicSale.json"), sale_model()); }

Node* node(BehaviorModel& b, const std::string& id) {
    for (auto& n : b.nodes)
        if (n.id == id) return &n;
    return nullptr;
}

void drop_edge(BehaviorModel& b, const std::string& from, const std::string& to) {
    b.edges.erase(std::remove_if(b.edges.begin(), b.edges.end(),
                                 [&](const Edge& e) { return e.from == from && e.to == to; }),
                  b.edges.end());
}

// Expansion gives gateways fresh ids; everything else must survive.
void forget_gateways(Block& block) {
    for (auto& step : block) {
        step.gateway.clear();
        for (auto& br : step.branches) forget_gateways(br.body);
        if (step.otherwise) forget_gateways(*step.otherwise);
        for (auto& b : step.blocks) forget_gateways(b);
    }
}

StructuredBehavior without_gateways(StructuredBehavior s) {
    forget_gateways(s.body);
    return s;
}

const char* const kWorkflowBehaviors[] = {"Echo", "Sequence", "Parallel", "Loop", "Nested"};

}  // namespace

TEST_CASE("fixture behaviors are valid for their composites") {
    CHECK(validate_behavior(sale_behavior(), sale_model(), "ElectronicSale").empty());
    const auto workflow = pim::parse_model(read_fixture("models/Workflow.json"));
    for (const char* name : kWorkflowBehaviors) {
        INFO(name);
        const auto b = parse_behavior(read_fixture(std::string("behaviors/") + name + ".json"), workflow);
        CHECK(validate_behavior(b, workflow, name).empty());
    }
    const auto travel = pim::parse_model(read_fixture("models/Travel.json"));
    CHECK(validate_behavior(parse_behavior(read_fixture("behaviors/Travel.json"), travel), travel, "Travel").empty());
}

TEST_CASE("serialize then parse is the identity") {
    const auto b = sale_behavior();
    CHECK(parse_behavior(serialize_behavior(b)) == b);
    CHECK(serialize_behavior(parse_behavior(serialize_behavior(b))) == serialize_behavior(b));
}

TEST_CASE("parser binds references") {
    CHECK_THROWS_AS(parse_behavior(R"({"process": "P", "nodes": [{"id": "a", "kind": "StartEvent"}],
        "edges": [{"from": "a", "to": "b"}]})"),
                    UnresolvedReference);
    CHECK_THROWS_AS(parse_behavior(R"({"process": "P", "nodes": [{"id": "a", "kind": "StartEvent"},
        {"id": "a", "kind": "EndEvent"}], "edges": []})"),
                    DuplicateName);
    CHECK_THROWS_AS(parse_behavior(R"({"process": "P", "nodes": [{"id": "a", "kind": "Timer"}], "edges": []})"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_behavior(R"({"process": "P", "variables": [{"name": "v", "type": "Nope"}],
        "nodes": [], "edges": []})", sale_model()),
                    UnresolvedReference);
}

TEST_CASE("validation rules fire on broken behaviors") {
    const auto model = sale_model();
    auto b = sale_behavior();
    SECTION("wrong composite") {
        CHECK(has_code(validate_behavior(b, model, "ePayment"), "NOT_COMPOSITE"));
        CHECK(has_code(validate_behavior(b, model, "Nope"), "UNKNOWN_SERVICE"));
    }
    SECTION("invoke of a service outside the components") {
        node(b, "pay")->operation = "refund";
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "UNKNOWN_OPERATION"));
    }
    SECTION("reply with an undeclared fault") {
        node(b, "reject")->fault = "Bounced";
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "UNKNOWN_FAULT"));
    }
    SECTION("assignment to a field the message lacks") {
        node(b, "pay")->assign.push_back({"Tip", condition::parse_operand("1")});
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "ASSIGN_UNKNOWN_FIELD"));
    }
    SECTION("assignment leaving a field unset") {
        auto& assign = node(b, "pay")->assign;
        assign.erase(assign.begin());
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "ASSIGN_MISSING_FIELD"));
    }
    SECTION("split without a guard or default") {
        for (auto& e : b.edges)
            if (e.from == "valid") e.is_default = false;
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "UNGUARDED_BRANCH"));
    }
    SECTION("dead end") {
        drop_edge(b, "confirm", "merge");
        const auto r = validate_behavior(b, model, "ElectronicSale");
        CHECK(has_code(r, "DEAD_END"));
    }
    SECTION("unreachable node") {
        drop_edge(b, "valid", "pay");
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "UNREACHABLE_NODE"));
    }
    SECTION("duplicate label") {
        node(b, "reject")->label = "Send Confirmation";
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "DUPLICATE_LABEL"));
    }
    SECTION("undeclared variable in a condition") {
        for (auto& e : b.edges)
            if (e.condition) e.condition = condition::parse("$nothing.ok = true");
        CHECK(has_code(validate_behavior(b, model, "ElectronicSale"), "UNDECLARED_VARIABLE"));
    }
    SECTION("receive must come first") {
        std::swap(node(b, "check")->kind, node(b, "_iS9B8NIXEd6NDptfMmqFg")->kind);
        CHECK_FALSE(validate_behavior(b, model, "ElectronicSale").empty());
    }
    SECTION("report is sorted") {
        node(b, "reject")->fault = "Bounced";
        node(b, "pay")->operation = "refund";
        auto r = validate_behavior(b, model, "ElectronicSale");
        auto sorted = r;
        sort_report(sorted);
        CHECK(r == sorted);
    }
}

TEST_CASE("ElectronicSale normalizes to receive, check and a two-way choice") {
    const auto s = normalize_to_structured(sale_behavior());
    CHECK(s.process_name == "ElectronicSaleProcess");
    REQUIRE(s.body.size() == 3);
    CHECK(s.body[0].kind == Step::Kind::task);
    CHECK(s.body[0].task.id == "_iS9B8NIXEd6NDptfMmqFg");
    CHECK(s.body[1].task.id == "check");
    const auto& choice = s.body[2];
    REQUIRE(choice.kind == Step::Kind::choice);
    CHECK(choice.gateway == "valid");
    REQUIRE(choice.branches.size() == 1);
    CHECK(choice.branches[0].body.size() == 2);
    REQUIRE(choice.otherwise);
    REQUIRE(choice.otherwise->size() == 1);
    CHECK(choice.otherwise->front().task.id == "reject");
    std::vector<std::string> ids;
    for (const auto* n : leaves(s)) ids.push_back(n->id);
    CHECK(ids == std::vector<std::string>{"_iS9B8NIXEd6NDptfMmqFg", "check", "pay", "confirm", "reject"});
}

TEST_CASE("crossing branches are rejected naming the region entry") {
    const auto b = parse_behavior(read_fixture("behaviors/Crossing.json"));
    try {
        normalize_to_structured(b);
        FAIL("expected UnstructuredGraph");
    } catch (const UnstructuredGraph& e) {
        CHECK(e.entry() == "s2");
        CHECK(e.exit_code() == 1);
    }
}

TEST_CASE("normalize then expand preserves task traces on fixtures") {
    for (const char* name : {"ElectronicSale", "Echo", "Sequence", "Parallel", "Loop", "Nested", "Travel"}) {
        INFO(name);
        const auto b = parse_behavior(read_fixture(std::string("behaviors/") + name + ".json"));
        const auto s = normalize_to_structured(b);
        const auto g = expand_to_graph(s);
        CHECK(testing::token_game_traces(g) == testing::token_game_traces(b));
        CHECK(without_gateways(normalize_to_structured(g)) == without_gateways(s));
    }
}

TEST_CASE("normalize then expand preserves task traces on generated graphs") {
    testing::Rng rng(51);
    for (int i = 0; i < 150; ++i) {
        const auto shape = testing::random_shape(rng, 3, 5);
        const auto b = testing::build_graph(shape, 3);
        const auto model = testing::worker_model(3);
        REQUIRE(validate_behavior(b, model, "Orchestrator").empty());
        const auto s = normalize_to_structured(b);
        CHECK(static_cast<int>(leaves(s).size()) == testing::count_tasks(shape) + 2);
        CHECK(testing::token_game_traces(expand_to_graph(s)) == testing::token_game_traces(b));
    }
}

TEST_CASE("token game oracle sanity") {
    testing::Shape par;
    par.kind = testing::Shape::Kind::parallel;
    par.children = {testing::Shape{}, testing::Shape{}};
    const auto traces = testing::token_game_traces(testing::build_graph(par, 2));
    CHECK(traces == std::set<testing::TaskTrace>{{"receive", "t0", "t1", "reply"}, {"receive", "t1", "t0", "reply"}});
    CHECK(testing::interleavings({{"a", "b"}, {"c"}}).size() == 3);
}
