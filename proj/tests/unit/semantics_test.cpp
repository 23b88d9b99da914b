#include "aisbench/semantics.hpp"

#include "suites.hpp"

#include <doctest.h>

using namespace aisbench;

namespace {

const std::vector<Zone> kNested = {{"Inner", {55.2, 10.2, 55.4, 10.4}, 1}, {"Outer", {55.0, 10.0, 56.0, 11.0}, 2}};

std::vector<DynamicRecord> line(std::initializer_list<std::pair<double, double>> points) {
    std::vector<DynamicRecord> r;
    int minute = 0;
    for (const auto& [lat, lon] : points) {
        r.push_back({Mmsi{219000001}, minute, lat, lon, 6.0});
        minute += 10;
    }
    return r;
}

} // namespace

TEST_SUITE("semantics") {
    TEST_CASE("nested zones: the smaller zone claims its interior") {
        const auto r = line({{55.1, 10.3}, {55.3, 10.3}, {55.3, 10.35}, {55.6, 10.3}});
        const auto e = to_semantic_events(r, SemanticConfig{kNested, 0.0});
        REQUIRE(e.size() == 3);
        CHECK(e[0].zone_name == "Outer");
        CHECK(e[1].zone_name == "Inner");
        CHECK(e[2].zone_name == "Outer");
        // the segment leading into a zone is counted in the zone being left
        CHECK(e[0].distance == doctest::Approx(testing::meridian_meters(0.2)));
        CHECK(e[0].exit_minute == 10);
        CHECK(e[1].enter_minute == 10);
        CHECK(e[2].exit_minute == 30);
    }

    TEST_CASE("positions nobody claims are open water") {
        const auto r = line({{54.0, 9.0}, {54.1, 9.0}});
        const auto e = to_semantic_events(r, SemanticConfig{kNested, 500.0});
        REQUIRE(e.size() == 1);
        CHECK(e[0].zone_name == kOpenWater);
        CHECK(e[0].duration() == 10);
    }

    TEST_CASE("rendering names the ship and every event") {
        const auto r = line({{55.1, 10.3}, {55.3, 10.3}});
        const auto e = to_semantic_events(r, SemanticConfig{kNested, 0.0});
        const ShipStatic s{Mmsi{219000001}, "ALPHA", {}, {}, {}, {}, "Cargo", {}, {}};
        const auto text = render_events(e, s);
        CHECK(text.find("219000001") != std::string::npos);
        CHECK(text.find("Outer") != std::string::npos);
        CHECK(text.find("Inner") != std::string::npos);
    }

    TEST_CASE("conservation, oscillation and tiling suite") {
        const auto v = testing::semantic_suite_with(load_zones(std::string{AISBENCH_DATA_DIR} + "/fixture/zones.csv"));
        CHECK_MESSAGE(v.ok, (v.failures.empty() ? std::string{} : v.failures.front()));
    }
}
