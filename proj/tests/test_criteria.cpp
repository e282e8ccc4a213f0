#include <random>

#include "doctest.h"
#include "restarch/criteria.hpp"
#include "restarch/error.hpp"
#include "support.hpp"

using namespace restarch;

TEST_SUITE("criteria") {

TEST_CASE("nested list parse") {
    auto c = parse_criteria(R"([["xnat:mrSessionData/AGE", ">", "80"], "AND"])");
    REQUIRE(c.items.size() == 1);
    CHECK(c.method == Combinator::AND);
    auto leaf = std::get<Constraint>(c.items[0].node);
    CHECK(leaf == Constraint{"xnat:mrSessionData/AGE", CompareOp::GT, "80"});
    CHECK(leaf.datatype() == "xnat:mrSessionData");
    CHECK(leaf.field() == "AGE");

    auto nested = parse_criteria(R"([["xnat:subjectData/GENDER", "=", "male"],
        [["xnat:mrSessionData/AGE", "<", "20"], ["xnat:mrSessionData/AGE", ">=", "80"], "OR"], "AND"])");
    CHECK(nested.depth() == 2);
    CHECK(nested.constraints().size() == 3);
    CHECK(parse_criteria(to_nested_list(nested)) == nested);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_criteria("[\"AND\"]"), CriteriaError);
    CHECK_THROWS_AS(parse_criteria(R"([["a/B", "~", "x"], "AND"])"), CriteriaError);
    CHECK_THROWS_AS(parse_criteria(R"([["nofield", "=", "x"], "AND"])"), CriteriaError);
    CHECK_THROWS_AS(parse_criteria(R"([["a/B", "=", "x"], "XOR"])"), CriteriaError);
    CHECK_THROWS_AS(parse_criteria(R"([["a/B", "="], "AND"])"), CriteriaError);
    CHECK_THROWS_AS(parse_criteria("not json"), Error);
}

TEST_CASE("operators") {
    for (auto op : {"=", "!=", "<", ">", "<=", ">=", "LIKE"}) {
        auto parsed = parse_compare_op(op);
        REQUIRE(parsed);
        CHECK(to_string(*parsed) == op);
    }
    CHECK_FALSE(parse_compare_op("=="));
}

TEST_CASE("typed comparison") {
    CHECK(compare_values("9", CompareOp::LT, "10"));
    CHECK(compare_values("81", CompareOp::GT, "80"));
    CHECK(compare_values("80.0", CompareOp::EQ, "80"));
    CHECK(compare_values("abc", CompareOp::LT, "abd"));
    CHECK(compare_values("9a", CompareOp::GT, "10"));  // textual
    CHECK(compare_values("OAS1_0001_MR1", CompareOp::LIKE, "OAS1%MR1"));
    CHECK_FALSE(compare_values("OAS1_0001_MR1", CompareOp::LIKE, "OAS1"));
    CHECK(compare_values("a.b", CompareOp::LIKE, "a.b"));
    CHECK_FALSE(compare_values("axb", CompareOp::LIKE, "a.b"));
    CHECK(compare_values("", CompareOp::LIKE, "%"));
}

TEST_CASE("property: compare_values agrees with the oracle") {
    std::mt19937 rng(5);
    const std::vector<std::string> pool = {"", "0", "7", "10", "10.5", "-3", "80", "abc", "ab", "a%c",
                                           "male", "female", "1e3", ".5", "5."};
    const std::vector<std::string> pats = {"%", "a%", "%c", "%b%", "ab", "1%", "%0", "m%e"};
    for (int i = 0; i < 3000; ++i) {
        auto op = static_cast<CompareOp>(rng() % 7);
        const auto& lhs = pool[rng() % pool.size()];
        const auto& rhs = op == CompareOp::LIKE ? pats[rng() % pats.size()] : pool[rng() % pool.size()];
        CAPTURE(lhs);
        CAPTURE(rhs);
        CHECK(compare_values(lhs, op, rhs) == testing::oracle_compare(lhs, op, rhs));
    }
}

TEST_CASE("value ordering") {
    std::vector<std::string> v = {"b", "10", "a", "9", "-1"};
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return value_order_less(x, y); });
    CHECK(v == std::vector<std::string>{"-1", "9", "10", "a", "b"});
}

TEST_CASE("placeholder keys") {
    auto c = parse_criteria(R"([["a/B", "=", "k1"], [["a/C", ">", "k2"], ["a/D", "=", "k1"], "OR"], "AND"])");
    CHECK(placeholder_keys(c) == std::set<std::string>{"k1", "k2"});
}

}  // TEST_SUITE
