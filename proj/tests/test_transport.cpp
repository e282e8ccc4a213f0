#include "doctest.h"
#include "restarch/error.hpp"
#include "support.hpp"

using namespace restarch;

namespace {

/// Records requests and answers 200 with a fixed body.
class RecordingTransport : public Transport {
public:
    std::vector<Request> seen;

protected:
    Response send(const Request& req) override {
        seen.push_back(req);
        return Response{200, {}, "ok"};
    }
};

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("verb rules reject before any traffic") {
    RecordingTransport t;
    const std::string base = "http://h/REST";
    CHECK_THROWS_AS(t.execute({Method::PUT, base + "/projects"}), MethodNotAllowed);
    CHECK_THROWS_AS(t.execute({Method::DELETE, base + "/projects/P/subjects"}), MethodNotAllowed);
    CHECK_THROWS_AS(t.execute({Method::POST, base + "/projects/P"}), MethodNotAllowed);
    CHECK_THROWS_AS(t.execute({Method::GET, base + "/search"}), MethodNotAllowed);
    CHECK(t.seen.empty());
    CHECK(t.call_count().total() == 0);
    CHECK(t.call_log().empty());

    t.execute({Method::GET, base + "/projects"});
    t.execute({Method::PUT, base + "/projects/P"});
    t.execute({Method::DELETE, base + "/projects/P"});
    t.execute({Method::POST, base + "/search?format=csv", "<search/>"});
    auto c = t.call_count();
    CHECK(c.get == 1);
    CHECK(c.put == 1);
    CHECK(c.del == 1);
    CHECK(c.post == 1);
    CHECK(c.body_bytes == 8);
    CHECK(t.call_log() == std::vector<std::string>{"GET " + base + "/projects", "PUT " + base + "/projects/P",
                                                   "DELETE " + base + "/projects/P",
                                                   "POST " + base + "/search?format=csv"});
    t.reset_counts();
    CHECK(t.call_count() == CallCounts{});
}

TEST_CASE("uri classes") {
    const auto& h = *Hierarchy::xnat();
    CHECK(classify_uri("http://h/REST/projects", h) == UriClass::collection);
    CHECK(classify_uri("http://h/REST/projects/P/subjects?format=csv", h) == UriClass::collection);
    CHECK(classify_uri("http://h/REST/projects/P/resources/R/files/a.img", h) == UriClass::element);
    CHECK(classify_uri("http://h/REST/search", h) == UriClass::search);
}

TEST_CASE("authorization header only with credentials") {
    testing::Harness anon(testing::default_fixture(), false, {});
    auto r = anon.transport->execute({Method::GET, anon.server.url() + "/REST/projects?format=csv"});
    CHECK(r.status == 200);
    CHECK_THROWS_AS(anon.transport->execute({Method::PUT, anon.server.url() + "/REST/projects/GUESTP"}), AuthError);

    testing::Harness admin;
    r = admin.transport->execute({Method::GET, admin.server.url() + "/REST/projects?format=csv"});
    CHECK(parse_csv(r.body).size() == 2);

    testing::Harness bad(testing::default_fixture(), false, {"admin", "wrong"});
    CHECK_THROWS_AS(bad.transport->execute({Method::GET, bad.server.url() + "/REST/projects"}), AuthError);
}

TEST_CASE("put creates then updates, delete removes") {
    testing::Harness h;
    auto uri = h.server.url() + "/REST/projects/NEWP";
    CHECK(h.transport->execute({Method::PUT, uri}).status == 201);
    CHECK(h.transport->execute({Method::PUT, uri}).status == 200);
    CHECK(h.transport->execute({Method::DELETE, uri}).status == 200);
    CHECK(h.transport->execute({Method::DELETE, uri}).status == 404);
}

TEST_CASE("unreachable host") {
    HttpOptions opts;
    opts.timeout = std::chrono::milliseconds(500);
    HttpTransport t(opts);
    CHECK_THROWS_AS(t.execute({Method::GET, "http://127.0.0.1:1/REST/projects"}), NetworkError);
    DisconnectedTransport d;
    CHECK_THROWS_AS(d.execute({Method::GET, "http://127.0.0.1:1/REST/projects"}), NetworkError);
}

}  // TEST_SUITE
