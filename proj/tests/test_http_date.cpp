#include "doctest.h"
#include "restarch/http_date.hpp"
#include "restarch/mock/fixture.hpp"

using namespace restarch;

TEST_SUITE("transport") {

TEST_CASE("http dates") {
    auto t = parse_http_date("Sun, 06 Nov 1994 08:49:37 GMT");
    REQUIRE(t);
    CHECK(format_http_date(*t) == "Sun, 06 Nov 1994 08:49:37 GMT");
    CHECK(std::chrono::system_clock::to_time_t(*t) == 784111777);
    CHECK_FALSE(parse_http_date("yesterday"));
    CHECK_FALSE(parse_http_date("Sun, 06 Nov 1994 08:49:37 UTC"));
    // The mock formats dates with its own code; both must agree.
    CHECK(mock::format_http_time(784111777) == "Sun, 06 Nov 1994 08:49:37 GMT");
    CHECK(mock::parse_http_time("Sun, 06 Nov 1994 08:49:37 GMT") == 784111777);
}

}  // TEST_SUITE
