#include "doctest.h"
#include "restarch/error.hpp"
#include "support.hpp"

using namespace restarch;

namespace {

QuerySpec age_spec(const std::string& op, const std::string& value) {
    return QuerySpec{"xnat:mrSessionData",
                     {"xnat:mrSessionData/ID", "xnat:mrSessionData/AGE"},
                     CriteriaSet(Combinator::AND, {Constraint{"xnat:mrSessionData/AGE", parse_compare_op(op).value(), value}})};
}

std::set<std::string> column_set(const ResultTable& t, const std::string& col) {
    auto v = t.column(col);
    return {v.begin(), v.end()};
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("age filter") {
    testing::Harness h;
    auto t = h.iface->search().run(age_spec(">", "80"));
    CHECK(column_set(t, "xnat:mrSessionData/ID") == std::set<std::string>{"CENTRAL_E00002", "CENTRAL_E00003"});
    auto json = h.iface->search().run(age_spec(">", "80"), Format::json);
    CHECK(json == t);
}

TEST_CASE("empty result keeps the header") {
    testing::Harness h;
    auto t = h.iface->search().run(age_spec(">", "500"));
    CHECK(t.empty());
    CHECK(t.columns().size() == 2);
}

TEST_CASE("joined subject column") {
    testing::Harness h;
    QuerySpec spec{"xnat:mrSessionData", {"xnat:subjectData/GENDER"},
                   parse_criteria(R"([["xnat:subjectData/GENDER", "=", "female"], "AND"])")};
    auto t = h.iface->search().run(spec);
    CHECK(t.size() == 2);
    CHECK(column_set(t, "xnat:subjectData/GENDER") == std::set<std::string>{"female"});
}

TEST_CASE("server errors") {
    testing::Harness h;
    QuerySpec spec = age_spec(">", "1");
    spec.root_element = "xnat:nothingData";
    CHECK_THROWS_AS(h.iface->search().run(spec), SearchError);
    spec = age_spec(">", "1");
    spec.columns = {"xnat:mrSessionData/NOPE"};
    CHECK_THROWS_AS(h.iface->search().run(spec), SearchError);
}

TEST_CASE("saved searches") {
    testing::Harness h;
    auto client = h.iface->search();
    client.save("old", age_spec(">", "80"));
    auto back = client.get("old");
    CHECK(back.name == "old");
    CHECK(back.spec == age_spec(">", "80"));
    CHECK_THROWS_AS(client.get("missing"), NotFound);
}

TEST_CASE("templates") {
    testing::Harness h;
    auto client = h.iface->search();
    client.save_template("by_age", age_spec(">", "min_age"));
    auto tpl = client.get_template("by_age");
    CHECK(tpl.keys == std::set<std::string>{"min_age"});
    CHECK(tpl.bind({{"min_age", "80"}}) == age_spec(">", "80"));
    CHECK(client.use_template("by_age", {{"min_age", "80"}}) == client.run(age_spec(">", "80")));
    CHECK_THROWS_AS(client.use_template("by_age", {}), MissingBinding);
    try {
        tpl.bind({{"other", "1"}});
        FAIL("expected MissingBinding");
    } catch (const MissingBinding& e) {
        CHECK(std::string(e.what()).find("min_age") != std::string::npos);
    }
}

TEST_CASE("sharing controls visibility") {
    testing::Harness h;
    auto url = h.server.url();
    auto as = [&](const std::string& user, const std::string& pw) {
        HttpOptions o;
        o.credentials = {user, pw};
        auto s = std::make_shared<Session>(url, std::make_shared<HttpTransport>(o));
        return SearchClient(s);
    };
    as("alice", "alice-secret").save("mine", age_spec(">", "1"), {"bob"});
    CHECK_NOTHROW(as("bob", "bob-secret").get("mine"));
    CHECK_THROWS_AS(as("carol", "carol-secret").get("mine"), NotFound);
    CHECK_NOTHROW(as("admin", "admin").get("mine"));
    CHECK_THROWS_AS(as("carol", "carol-secret").save("mine", age_spec(">", "2")), Forbidden);
}

}  // TEST_SUITE
