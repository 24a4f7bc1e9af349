#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "swsforge/condition.hpp"
#include "swsforge/error.hpp"

using namespace swsforge;
using namespace swsforge::condition;

TEST_CASE("grammar: precedence and negation") {
    const auto p = parse(R"($a.x = 1 or not $b.y != "s" and $c = true)");
    REQUIRE(p.disjuncts.size() == 2);
    CHECK(p.disjuncts[0].size() == 1);
    REQUIRE(p.disjuncts[1].size() == 2);
    CHECK(p.disjuncts[1][0].negated);
    CHECK(p.disjuncts[1][0].op == Op::ne);
    CHECK(p.disjuncts[1][0].literal == Value(std::string("s")));
    CHECK(p.disjuncts[1][1].path.variable == "c");
    CHECK(p.disjuncts[1][1].literal == Value(true));
    CHECK(p.variables() == std::set<std::string>{"a", "b", "c"});
}

TEST_CASE("paths and operands") {
    const auto path = parse_path("$card.holder.name");
    CHECK(path.variable == "card");
    CHECK(path.key() == "holder.name");
    CHECK(path.text() == "$card.holder.name");
    CHECK(parse_path("$card").key().empty());

    const auto lit = parse_operand("-42");
    CHECK_FALSE(lit.path);
    CHECK(lit.literal == Value(std::int64_t{-42}));
    CHECK(parse_operand(R"("a \"q\"")").literal == Value(std::string("a \"q\"")));
    CHECK(parse_operand("$x.y").path == parse_path("$x.y"));
    CHECK(parse_operand("$x.y").text() == "$x.y");
}

TEST_CASE("syntax errors carry a column") {
    for (const char* bad : {"", "$", "$a =", "$a = 1 and", "a = 1", "$a == 1", "$a = \"open", "$a = 1 2", "$a.1 = 1"}) {
        INFO(bad);
        CHECK_THROWS_AS(parse(bad), SyntaxError);
    }
    try {
        parse("$a = 1 xor $b = 2");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.column() == 8);
    }
}

TEST_CASE("evaluation") {
    Environment env;
    env["r"] = {{"count", std::int64_t{2}}, {"ok", true}, {"name", std::string("x")}};
    env["f"] = {{"fault", std::string("CheckResult")}};
    CHECK(evaluate(parse("$r.count < 3"), env));
    CHECK_FALSE(evaluate(parse("$r.count >= 3"), env));
    CHECK(evaluate(parse("$r.ok = true and $r.name = \"x\""), env));
    CHECK(evaluate(parse("$r.ok = false or $r.count = 2"), env));
    CHECK_FALSE(evaluate(parse("not $f.fault = \"CheckResult\""), env));
    CHECK(evaluate(parse("not $missing.fault = \"CheckResult\""), env));
    CHECK_FALSE(evaluate(parse("$r.absent = 1"), env));
    CHECK(evaluate(parse("$r.name < \"y\""), env));
    CHECK_THROWS_AS(evaluate(parse("$r.count = \"2\""), env), TypeMismatch);
    CHECK_THROWS_AS(evaluate(parse("$r.ok < true"), env), TypeMismatch);
    CHECK(lookup(parse_path("$r.count"), env) == Value(std::int64_t{2}));
    CHECK_FALSE(lookup(parse_path("$q.count"), env));
}

TEST_CASE("literal text round-trips through the operand parser") {
    testing::Rng rng(41);
    for (int i = 0; i < 300; ++i) {
        Value v;
        switch (testing::uniform(rng, 0, 2)) {
            case 0: v = static_cast<std::int64_t>(testing::uniform(rng, -100000, 100000)); break;
            case 1: {
                std::string s;
                const int n = testing::uniform(rng, 0, 8);
                for (int k = 0; k < n; ++k) s += " az\"\\.$"[testing::uniform(rng, 0, 6)];
                v = s;
                break;
            }
            default: v = testing::coin(rng); break;
        }
        const auto text = literal_text(v);
        INFO(text);
        CHECK(parse_operand(text).literal == v);
        CHECK_FALSE(parse_operand(text).path);
    }
    CHECK(kind_name(Value(true)) != kind_name(Value(std::int64_t{1})));
}
