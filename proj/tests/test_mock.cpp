#include <random>

#include "doctest.h"
#include "restarch/error.hpp"
#include "support.hpp"

using namespace restarch;

namespace {

mock::ConditionNode leaf(std::string field, std::string op, std::string value) {
    mock::ConditionNode n;
    n.leaf = mock::Condition{std::move(field), std::move(op), std::move(value)};
    return n;
}

mock::ConditionNode set_of(std::string method, std::vector<mock::ConditionNode> items) {
    mock::ConditionNode n;
    n.method = std::move(method);
    n.items = std::move(items);
    return n;
}

mock::ConditionNode to_node(const CriteriaSet& s) {
    std::vector<mock::ConditionNode> items;
    for (const auto& it : s.items) {
        if (const auto* c = std::get_if<Constraint>(&it.node)) {
            items.push_back(leaf(c->schema_field, std::string(to_string(c->op)), c->value));
        } else {
            items.push_back(to_node(std::get<CriteriaSet>(it.node)));
        }
    }
    return set_of(std::string(to_string(s.method)), std::move(items));
}

}  // namespace

TEST_SUITE("mock") {

TEST_CASE("default listing columns and formats") {
    testing::Harness h;
    auto r = h.transport->execute({Method::GET, h.server.url() + "/REST/projects"});
    CHECK(r.status == 200);
    auto t = parse_csv(r.body);
    CHECK(t.columns() == std::vector<std::string>{"ID"});
    r = h.transport->execute({Method::GET, h.server.url() + "/REST/projects?columns=ID,label&format=json"});
    CHECK(parse_json_table(r.body).columns() == std::vector<std::string>{"ID", "label"});
}

TEST_CASE("conditional file requests") {
    testing::Harness h;
    std::string file = h.server.url() +
                       "/REST/projects/MY_PROJECT/subjects/MY_S00001/experiments/MY_E00001/resources/PROCESSED/files/"
                       "SUBJ_01_MR1_mpr_n4_anon_111_t88_gfc.img";
    auto r = h.transport->execute({Method::GET, file});
    REQUIRE(r.status == 200);
    auto lm = r.header("Last-Modified").value();
    Request cond{Method::GET, file};
    cond.headers["If-Modified-Since"] = lm;
    r = h.transport->execute(cond);
    CHECK(r.status == 304);
    CHECK(r.body.empty());
    cond.headers["If-Modified-Since"] = "Mon, 01 Jan 2001 00:00:00 GMT";
    CHECK(h.transport->execute(cond).status == 200);
}

TEST_CASE("truth table over three constraints") {
    auto tree = set_of("OR", {set_of("AND", {leaf("t:d/A", "=", "1"), leaf("t:d/B", "=", "1")}), leaf("t:d/C", "=", "1")});
    for (int mask = 0; mask < 8; ++mask) {
        bool a = mask & 1, b = mask & 2, c = mask & 4;
        std::map<std::string, std::string> values = {
            {"t:d/A", a ? "1" : "0"}, {"t:d/B", b ? "1" : "0"}, {"t:d/C", c ? "1" : "0"}};
        auto lookup = [&](const std::string& f) -> std::optional<std::string> { return values.at(f); };
        CAPTURE(mask);
        CHECK(mock::evaluate_criteria(tree, lookup) == ((a && b) || c));
    }
    auto missing = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
    CHECK_FALSE(mock::evaluate_criteria(leaf("t:d/A", "!=", "1"), missing));
}

TEST_CASE("property: mock evaluation agrees with the oracle") {
    std::mt19937 rng(3);
    const std::vector<std::string> keys = {"xnat:mrSessionData/AGE", "xnat:mrSessionData/LABEL",
                                           "xnat:mrSessionData/PROJECT", "xnat:subjectData/GENDER",
                                           "xnat:subjectData/HANDEDNESS"};
    for (int i = 0; i < 500; ++i) {
        auto criteria = testing::random_criteria(rng);
        std::map<std::string, std::string> values = {{"xnat:mrSessionData/AGE", std::to_string(10 + rng() % 86)},
                                                     {"xnat:mrSessionData/LABEL", "sub1_MR" + std::to_string(rng() % 3)},
                                                     {"xnat:mrSessionData/PROJECT", "P" + std::to_string(rng() % 3)},
                                                     {"xnat:subjectData/GENDER", rng() % 2 ? "male" : "female"}};
        if (rng() % 2) values["xnat:subjectData/HANDEDNESS"] = rng() % 2 ? "left" : "right";
        auto lookup = [&](const std::string& f) -> std::optional<std::string> {
            auto it = values.find(f);
            if (it == values.end()) return std::nullopt;
            return it->second;
        };
        CHECK(mock::evaluate_criteria(to_node(criteria), lookup) == testing::oracle_eval(criteria, values));
    }
}

TEST_CASE("fixture validation and round trip") {
    auto f = testing::default_fixture();
    CHECK_NOTHROW(f.validate(*Hierarchy::xnat()));
    auto again = mock::Fixture::from_json(f.to_json());
    CHECK(again.to_json() == f.to_json());

    auto bad = f;
    bad.projects[0].children[0].level = "files";
    CHECK_THROWS_AS(bad.validate(*Hierarchy::xnat()), ValidationError);
    bad = f;
    bad.projects[0].children[0].fields["SHOE_SIZE"] = "9";
    CHECK_THROWS_AS(bad.validate(*Hierarchy::xnat()), ValidationError);
    CHECK_THROWS_AS(mock::MockServer{bad}, ValidationError);
}

TEST_CASE("port in use") {
    mock::MockServer first(testing::default_fixture());
    CHECK_THROWS_AS(mock::MockServer(testing::default_fixture(), first.port()), PortUnavailable);
}

TEST_CASE("reset replaces state") {
    testing::Harness h;
    h.iface->select_element("/projects/TMP").insert();
    CHECK(h.iface->select_collection("/projects").get().size() == 3);
    h.server.reset(testing::default_fixture());
    h.cache->clear();
    CHECK(h.iface->select_collection("/projects").get().size() == 2);
    CHECK(h.server.snapshot().to_json() == testing::default_fixture().to_json());
}

}  // TEST_SUITE
