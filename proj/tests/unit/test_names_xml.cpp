#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "swsforge/error.hpp"
#include "swsforge/names.hpp"
#include "swsforge/xml.hpp"

using namespace swsforge;

TEST_CASE("NCName and URI checks") {
    CHECK(is_ncname("CardValidate"));
    CHECK(is_ncname("_x.y-z"));
    CHECK_FALSE(is_ncname(""));
    CHECK_FALSE(is_ncname("1abc"));
    CHECK_FALSE(is_ncname("a:b"));
    CHECK_FALSE(is_ncname("a b"));

    CHECK(is_absolute_uri("http://example.org/onto#Card"));
    CHECK(is_absolute_uri("urn:isbn:123"));
    CHECK_FALSE(is_absolute_uri("example.org/x"));
    CHECK_FALSE(is_absolute_uri("http://exa mple.org"));
    CHECK_FALSE(is_absolute_uri("http:"));
}

TEST_CASE("built-in types map to value kinds") {
    CHECK(is_xsd_builtin("integer"));
    CHECK(is_xsd_builtin("string"));
    CHECK_FALSE(is_xsd_builtin("CreditCard"));
    CHECK(value_kind_of_builtin("unsignedInt") == ValueKind::integer);
    CHECK(value_kind_of_builtin("boolean") == ValueKind::boolean);
    CHECK(value_kind_of_builtin("date") == ValueKind::text);
}

TEST_CASE("to_ncname turns labels into names") {
    CHECK(to_ncname("Receive Request") == "Receive_Request");
    CHECK(to_ncname("Card valid?") == "Card_valid_");
    CHECK(to_ncname("3 steps") == "_3_steps");
    CHECK(is_ncname(to_ncname("")));
}

TEST_CASE("case helpers") {
    CHECK(lower_first("ElectronicSale") == "electronicSale");
    CHECK(upper_first("checkCreditCard") == "CheckCreditCard");
    CHECK(upper_first("") == "");
    CHECK(trim("  a b \n") == "a b");
}

TEST_CASE("parser resolves namespaces and keeps text") {
    const auto root = xml::parse(R"(<?xml version="1.0"?>
<!-- leading comment -->
<a:root xmlns:a="urn:a" xmlns="urn:default" x="1" a:y="2">
  <child>text &amp; more<![CDATA[ <raw> ]]></child>
  <a:empty/>
</a:root>)");
    CHECK(root.is("urn:a", "root"));
    REQUIRE(root.attribute("x") != nullptr);
    CHECK(*root.attribute("x") == "1");
    REQUIRE(root.attribute("urn:a", "y") != nullptr);
    CHECK(root.attribute("y") == nullptr);
    REQUIRE(root.children.size() == 2);
    CHECK(root.children[0].is("urn:default", "child"));
    CHECK(root.children[0].text == "text & more <raw> ");
    CHECK(root.children[1].is("urn:a", "empty"));
    const auto q = root.children[0].resolve("a:thing");
    REQUIRE(q);
    CHECK(q->ns == "urn:a");
    CHECK(root.children[0].resolve("nope:thing") == std::nullopt);
    CHECK(root.children[0].resolve("plain")->ns == "urn:default");
}

TEST_CASE("parser reports syntax errors with positions") {
    CHECK_THROWS_AS(xml::parse("<a><b></a>"), XmlSyntaxError);
    CHECK_THROWS_AS(xml::parse("<a"), XmlSyntaxError);
    CHECK_THROWS_AS(xml::parse("<!DOCTYPE a><a/>"), XmlSyntaxError);
    CHECK_THROWS_AS(xml::parse("<p:a/>"), XmlSyntaxError);
    CHECK_THROWS_AS(xml::parse("<a/><b/>"), XmlSyntaxError);
    try {
        xml::parse("<a>\n  <b x='1' x='2'/></a>");
        FAIL("expected an error");
    } catch (const XmlSyntaxError& e) {
        CHECK(e.line() == 2);
        CHECK(e.exit_code() == 2);
    }
}

TEST_CASE("canonical form ignores prefixes, attribute order and indentation") {
    const auto a = xml::parse(R"(<p:r xmlns:p="urn:x" b="2" a="1"><p:c>v</p:c></p:r>)");
    const auto b = xml::parse("<r xmlns=\"urn:x\" a=\"1\" b=\"2\">\n  <c> v </c>\n</r>");
    CHECK(xml::canonical_form(a) == xml::canonical_form(b));
    const auto c = xml::parse(R"(<r xmlns="urn:y" a="1" b="2"><c>v</c></r>)");
    CHECK(xml::canonical_form(a) != xml::canonical_form(c));
}

TEST_CASE("writer output parses back to the same tree") {
    testing::Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        xml::Tag root{"t:root", {{"xmlns:t", "urn:t"}}, {}, {}};
        const int n = testing::uniform(rng, 0, 4);
        for (int k = 0; k < n; ++k) {
            std::string value = "v<&>\"'" + std::to_string(testing::uniform(rng, 0, 99));
            auto& child = root.add({"t:c" + std::to_string(k), {{"attr", value}}, {}, {}});
            if (testing::coin(rng)) child.text = "a & b < c " + std::to_string(k);
        }
        const auto parsed = xml::parse(xml::write_document(root));
        REQUIRE(parsed.children.size() == root.children.size());
        for (std::size_t k = 0; k < root.children.size(); ++k) {
            CHECK(*parsed.children[k].attribute("attr") == root.children[k].attributes[0].second);
            CHECK(parsed.children[k].text == root.children[k].text.value_or(""));
        }
    }
}
