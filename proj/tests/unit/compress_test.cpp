#include "aisbench/compress.hpp"

#include "suites.hpp"

#include <doctest.h>

using namespace aisbench;

TEST_SUITE("compress") {
    TEST_CASE("synchronized deviation measures against the time-interpolated position") {
        const DynamicRecord a{Mmsi{1}, 0, 55.0, 10.0, 5};
        const DynamicRecord b{Mmsi{1}, 20, 55.2, 10.0, 5};
        // on the line but early: the synchronized position at minute 5 is 55.05
        const DynamicRecord p{Mmsi{1}, 5, 55.1, 10.0, 5};
        CHECK(synchronized_deviation(p, a, b) == doctest::Approx(testing::meridian_meters(0.05)).epsilon(1e-9));
        const DynamicRecord q{Mmsi{1}, 10, 55.1, 10.0, 5};
        CHECK(synchronized_deviation(q, a, b) == doctest::Approx(0.0).epsilon(1e-6));
    }

    TEST_CASE("hand trace: a spike keeps itself and its two neighbours") {
        std::vector<DynamicRecord> r;
        for (int k = 0; k <= 10; ++k) {
            r.push_back({Mmsi{1}, 5 * k, 55.0 + 0.01 * k, 10.0, 8.0});
        }
        r[5].longitude = 10.05; // ~3.2 km sideways
        const auto kept = tdtr_compress(r, CompressionConfig{200.0});
        // 0-5 and 5-10 are slanted, so 4 and 6 deviate by ~2.6 km; then 0-4 and 6-10 are exact
        REQUIRE(kept.size() == 5);
        CHECK(kept[0] == r[0]);
        CHECK(kept[1] == r[4]);
        CHECK(kept[2] == r[5]);
        CHECK(kept[3] == r[6]);
        CHECK(kept[4] == r[10]);
    }

    TEST_CASE("short inputs pass through") {
        std::vector<DynamicRecord> r = {{Mmsi{1}, 0, 55, 10, 1}, {Mmsi{1}, 5, 56, 10, 1}};
        CHECK(tdtr_compress(r, CompressionConfig{}) == r);
        r.pop_back();
        CHECK(tdtr_compress(r, CompressionConfig{}) == r);
    }

    TEST_CASE("trajectory overload keeps the vessel") {
        Trajectory t{Mmsi{219000001}, {{Mmsi{219000001}, 0, 55, 10, 1}, {Mmsi{219000001}, 5, 55.01, 10, 1},
                                       {Mmsi{219000001}, 10, 55.02, 10, 1}}};
        const auto c = tdtr_compress(t, CompressionConfig{50.0});
        CHECK(c.mmsi == t.mmsi);
        CHECK(c.records.size() == 2);
    }

    TEST_CASE("property suite on 100 seeded trajectories") {
        const auto v = testing::tdtr_suite(100);
        for (const auto& f : v.failures) {
            INFO(f);
        }
        CHECK_MESSAGE(v.ok, (v.failures.empty() ? std::string{} : v.failures.front()));
    }
}
