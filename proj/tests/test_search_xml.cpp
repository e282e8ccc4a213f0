#include <random>

#include "doctest.h"
#include "restarch/error.hpp"
#include "restarch/search.hpp"
#include "support.hpp"

using namespace restarch;

namespace {

QuerySpec integration_spec() {
    return QuerySpec{"xnat:mrSessionData",
                     {"xnat:mrSessionData/LABEL", "xnat:mrSessionData/AGE", "xnat:subjectData/GENDER"},
                     parse_criteria(R"([["xnat:mrSessionData/PROJECT", "=", "MY_PROJECT"],
                                        ["xnat:mrSessionData/PROJECT", "=", "CENTRAL_OASIS_CS"], "OR"])")};
}

}  // namespace

TEST_SUITE("search-xml") {

TEST_CASE("golden document") {
    auto golden = testing::read_file(testing::source_dir() / "tests" / "golden" / "search_integration.xml");
    REQUIRE_FALSE(golden.empty());
    CHECK(to_xml(integration_spec()) == golden);
    CHECK(parse_query_xml(golden) == integration_spec());
}

TEST_CASE("nested child sets and escaping") {
    QuerySpec spec{"xnat:subjectData", {"xnat:subjectData/LABEL"},
                   parse_criteria(R"([["xnat:subjectData/LABEL", "LIKE", "a<b&\"c\"%"],
                       [["xnat:subjectData/GENDER", "=", "male"],
                        [["xnat:subjectData/HANDEDNESS", "!=", "left"], "AND"], "OR"], "AND"])")};
    auto xml = to_xml(spec);
    CHECK(xml.find("<child_set method=\"OR\">") != std::string::npos);
    CHECK(xml.find("a&lt;b&amp;") != std::string::npos);
    CHECK(parse_query_xml(xml) == spec);
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(parse_query_xml("<search>"), ParseError);
    CHECK_THROWS_AS(parse_query_xml("<other/>"), ParseError);
    CHECK_THROWS_AS(parse_query_xml("<search><root_element_name>x</root_element_name></search>"), ParseError);
}

TEST_CASE("validation") {
    QuerySpec spec = integration_spec();
    CHECK_NOTHROW(spec.validate());
    spec.columns.clear();
    CHECK_THROWS_AS(spec.validate(), CriteriaError);
    spec = integration_spec();
    spec.root_element.clear();
    CHECK_THROWS_AS(spec.validate(), CriteriaError);
    spec = integration_spec();
    spec.columns.push_back("nodatatype");
    CHECK_THROWS_AS(spec.validate(), CriteriaError);
}

TEST_CASE("property: round trip of random trees") {
    std::mt19937 rng(99);
    for (int i = 0; i < 200; ++i) {
        QuerySpec spec{"xnat:mrSessionData", {"xnat:mrSessionData/ID"}, testing::random_criteria(rng)};
        auto xml = to_xml(spec);
        auto back = parse_query_xml(xml);
        CHECK(back == spec);
        CHECK(to_xml(back) == xml);
    }
}

}  // TEST_SUITE
