#include "doctest.h"
#include "restarch/download.hpp"
#include "restarch/error.hpp"
#include "support.hpp"

using namespace restarch;

TEST_SUITE("download") {

TEST_CASE("layout") {
    const auto& h = *Hierarchy::xnat();
    auto p = parse_path("/projects/P/subjects/S/experiments/E/scans/1/resources/R/files/a.img", h);
    CHECK(download_location("/d", p) == std::filesystem::path("/d/P/S/E/scans/1/resources/R/a.img"));
    auto shallow = parse_path("/projects/P/resources/R/files/a.img", h);
    CHECK(download_location("/d", shallow) == std::filesystem::path("/d/P/resources/R/a.img"));
    CHECK_THROWS_AS(download_location("/d", parse_path("/projects/P/resources/R/files/..", h)), InvalidPath);
}

TEST_CASE("parallel download writes every file once with the right bytes") {
    testing::Harness h;
    testing::TempDir out;
    auto f = testing::default_fixture();
    for (unsigned workers : {1u, 4u}) {
        auto dir = out.path() / std::to_string(workers);
        auto stream = h.iface->select_collection("//experiments//files").iterate();
        auto written = download_all(stream, dir, workers);
        auto expected = testing::oracle_walk(f, {{"projects", "*"}, {"subjects", "*"}, {"experiments", "*"},
                                                 {"resources", "*"}, {"files", "*"}});
        REQUIRE(written.size() == expected.size());
        for (const auto& w : expected) {
            auto local = download_location(dir, parse_path(w.path, *Hierarchy::xnat()));
            CHECK(std::find(written.begin(), written.end(), local) != written.end());
            CHECK(testing::read_file(local) == w.chain.back()->content);
        }
    }
}

}  // TEST_SUITE
