#include <catch_amalgamated.hpp>

#include <algorithm>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "swsforge/simulator.hpp"

using namespace swsforge;
using namespace swsforge::sim;
using swsforge::testing::read_fixture;
using K = Event::Kind;

namespace {

bpel::BPELDocument generate(const std::string& model, const std::string& behavior, const std::string& composite) {
    const auto m = pim::parse_model(read_fixture("models/" + model + ".json"));
    const auto b = behavior::parse_behavior(read_fixture("behaviors/" + behavior + ".json"), m);
    return bpel::gen_bpel(m, behavior::normalize_to_structured(b), composite);
}

ExecutionTrace run(const bpel::BPELDocument& doc, const std::string& stubs, const std::string& message,
                   Options options = {}) {
    return simulate(doc, parse_stubs(read_fixture("stubs/" + stubs + ".json")),
                    parse_message(read_fixture("messages/" + message + ".json")), options);
}

std::vector<K> kinds(const ExecutionTrace& t) {
    std::vector<K> out;
    for (const auto& e : t) out.push_back(e.kind);
    return out;
}

EventMatcher invoked(const std::string& service, const std::string& op) {
    return {K::invoked, service, op, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
}

EventMatcher of(K kind) { return {kind, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt}; }

}  // namespace

TEST_CASE("valid card: check, pay, confirmation") {
    const auto doc = generate("ElectronicSale", "ElectronicSale", "ElectronicSale");
    const auto t = run(doc, "valid-card", "sale");
    CHECK(kinds(t) == std::vector<K>{K::received, K::invoked, K::evaluated, K::invoked, K::replied, K::completed});
    CHECK(t[0].label == "Receive Request");
    CHECK(t[1].operation == "checkCreditCard");
    CHECK(t[1].request.at("NumCard") == condition::Value(std::int64_t{4970100000000000}));
    CHECK(t[2].value);
    CHECK(t[3].operation == "pay");
    CHECK(t[3].request.at("Amount") == condition::Value(std::int64_t{120}));
    CHECK_FALSE(t[4].fault);
    CHECK(t[4].message.at("Confirmation") == condition::Value(std::string("PAY-0001")));
}

TEST_CASE("invalid card: no payment, fault reply") {
    const auto doc = generate("ElectronicSale", "ElectronicSale", "ElectronicSale");
    const auto t = run(doc, "invalid-card", "sale");
    CHECK(kinds(t) == std::vector<K>{K::received, K::invoked, K::evaluated, K::replied, K::completed});
    CHECK(t[1].fault == "CheckResult");
    CHECK_FALSE(t[2].value);
    CHECK(t[3].fault == "CheckResult");
    CHECK_FALSE(assert_trace(t, {invoked("ePayment", "pay")}).ok);
}

TEST_CASE("guarded stubs pick the first matching case") {
    const auto doc = generate("ElectronicSale", "ElectronicSale", "ElectronicSale");
    CHECK(assert_trace(run(doc, "guarded-card", "sale"), {invoked("CardValidate", "checkCreditCard"),
                                                          invoked("ePayment", "pay"), of(K::completed)})
              .ok);
    const auto expired = run(doc, "guarded-card", "expired-sale");
    EventMatcher fault_reply = of(K::replied);
    fault_reply.fault = "CheckResult";
    CHECK(assert_trace(expired, {fault_reply, of(K::completed)}).ok);
}

TEST_CASE("loop runs until its condition fails, and the limit faults") {
    const auto doc = generate("Workflow", "Loop", "Loop");
    const auto t = run(doc, "workflow", "job");
    int invokes = 0;
    for (const auto& e : t) invokes += e.kind == K::invoked;
    CHECK(invokes == 3);
    CHECK(t.back().kind == K::completed);

    const auto limited = run(doc, "workflow", "job", Options{1});
    REQUIRE(limited.back().kind == K::faulted);
    CHECK(limited.back().name == kLoopLimit);
}

TEST_CASE("parallel branches interleave round-robin") {
    const auto doc = generate("Workflow", "Parallel", "Parallel");
    const auto t = run(doc, "workflow", "job");
    std::vector<std::string> services;
    for (const auto& e : t)
        if (e.kind == K::invoked) services.push_back(e.service);
    CHECK(services == std::vector<std::string>{"A", "B", "D", "C"});
    CHECK(t.back().kind == K::completed);
}

TEST_CASE("choice without a matching branch faults") {
    testing::Shape choice;
    choice.kind = testing::Shape::Kind::choice;
    choice.children = {testing::Shape{}, testing::Shape{}};
    choice.has_default = false;
    const auto model = testing::worker_model(2);
    const auto doc = bpel::gen_bpel(model, behavior::normalize_to_structured(testing::build_graph(choice, 2)),
                                    "Orchestrator");
    const auto stubs = parse_stubs(R"({"stubs": [
        {"service": "W0", "operation": "op", "cases": [{"respond": {"ok": true, "count": 0}}]},
        {"service": "W1", "operation": "op", "cases": [{"respond": {"ok": true, "count": 1}}]}]})");
    const auto hit = simulate(doc, stubs, parse_message(R"({"id": 1, "note": "n"})"));
    CHECK(hit.back().kind == K::completed);
    const auto miss = simulate(doc, stubs, parse_message(R"({"id": 7, "note": "n"})"));
    REQUIRE(miss.back().kind == K::faulted);
    CHECK(miss.back().name == kNoMatchingBranch);
}

TEST_CASE("reading an unset variable is a selection failure") {
    auto doc = generate("ElectronicSale", "ElectronicSale", "ElectronicSale");
    bpel::Activity copy;
    copy.kind = bpel::Activity::Kind::assign;
    copy.copies.push_back({std::string("receipt"), std::nullopt, "cardCheck", std::nullopt});
    doc.body.children.insert(doc.body.children.begin() + 1, copy);
    const auto t = run(doc, "valid-card", "sale");
    REQUIRE(t.back().kind == K::faulted);
    CHECK(t.back().name == kSelectionFailure);
}

TEST_CASE("pre-run checks") {
    const auto doc = generate("ElectronicSale", "ElectronicSale", "ElectronicSale");
    const auto stubs = parse_stubs(read_fixture("stubs/valid-card.json"));
    SECTION("missing stub") {
        const auto partial = parse_stubs(R"({"stubs": [{"service": "ePayment", "operation": "pay",
            "cases": [{"respond": {}}]}]})");
        CHECK_THROWS_AS(simulate(doc, partial, parse_message(read_fixture("messages/sale.json"))), MissingStub);
    }
    SECTION("message of the wrong shape") {
        CHECK_THROWS_AS(simulate(doc, stubs, parse_message(R"({"NumCard": "x", "ExpirationDate": 1,
            "TypeCard": "V", "Price": 1})")),
                        TypeMismatch);
        CHECK_THROWS_AS(simulate(doc, stubs, parse_message(R"({"Unknown": 1})")), TypeMismatch);
    }
}

TEST_CASE("stub documents are checked") {
    for (const char* bad : {
             R"({"stubs": [{"service": "S", "operation": "o", "cases": []}]})",
             R"({"stubs": [{"service": "S", "operation": "o", "cases": [{"when": "$request.a = 1", "respond": {}}]}]})",
             R"({"stubs": [{"service": "S", "operation": "o", "cases": [{"when": "$other.a = 1"}, {}]}]})",
             R"({"stubs": [{"service": "S", "operation": "o", "cases": [{"fault": "not a name"}]}]})",
             R"({"stubs": [{"service": "S", "operation": "o", "cases": [{}]},
                           {"service": "S", "operation": "o", "cases": [{}]}]})",
             R"({"stubs": 3})",
             "{"}) {
        INFO(bad);
        CHECK_THROWS_AS(parse_stubs(bad), SyntaxError);
    }
    const auto r = parse_stubs(read_fixture("stubs/guarded-card.json"));
    REQUIRE(r.find("ePayment", "pay") != nullptr);
    CHECK(r.find("ePayment", "refund") == nullptr);
    CHECK(r.find("ePayment", "pay")->cases.size() == 2);
}

TEST_CASE("messages flatten nested objects") {
    const auto m = parse_message(R"({"card": {"number": 1, "type": "VISA"}, "ok": true})");
    CHECK(m.at("card.number") == condition::Value(std::int64_t{1}));
    CHECK(m.at("card.type") == condition::Value(std::string("VISA")));
    CHECK(m.at("ok") == condition::Value(true));
    CHECK_THROWS_AS(parse_message("[1]"), SyntaxError);
    CHECK_THROWS_AS(parse_message(R"({"x": 1.5})"), SyntaxError);
}

TEST_CASE("assert_trace matches ordered subsequences and explains misses") {
    const auto doc = generate("ElectronicSale", "ElectronicSale", "ElectronicSale");
    const auto t = run(doc, "valid-card", "sale");
    CHECK(assert_trace(t, {of(K::received), invoked("ePayment", "pay"), of(K::completed)}).ok);
    const auto wrong_order = assert_trace(t, {invoked("ePayment", "pay"), invoked("CardValidate", "checkCreditCard")});
    CHECK_FALSE(wrong_order.ok);
    CHECK(wrong_order.diagnostic.find("checkCreditCard") != std::string::npos);
    EventMatcher no_fault = invoked("CardValidate", "checkCreditCard");
    no_fault.fault = "";
    CHECK(assert_trace(t, {no_fault}).ok);
    CHECK_FALSE(assert_trace(run(doc, "invalid-card", "sale"), {no_fault}).ok);
    CHECK(assert_trace(t, {}).ok);
}

TEST_CASE("traces are deterministic and serialize one event per line") {
    const auto doc = generate("Workflow", "Nested", "Nested");
    const auto a = to_jsonl(run(doc, "workflow", "big-job"));
    const auto b = to_jsonl(run(doc, "workflow", "big-job"));
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), '\n') == 6);
    CHECK(a.rfind("{\"event\":\"Completed\"}\n") == a.size() - 22);
}
