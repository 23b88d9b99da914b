#include "aisbench/error.hpp"
#include "aisbench/ingest.hpp"
#include "aisbench/text.hpp"

#include "suites.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

using namespace aisbench;
namespace fs = std::filesystem;

namespace {

const char* kHeader =
    "# Timestamp,Type of mobile,MMSI,Latitude,Longitude,Navigational status,SOG,COG,IMO,Name,Ship type,Width,"
    "Length,Draught\n";

ParseReport parse(const std::string& body) {
    std::istringstream in(std::string{kHeader} + body);
    return parse_raw(in, "mem");
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("aisbench_ingest_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_SUITE("ingest") {
    TEST_CASE("invalid rows are dropped and counted") {
        const auto r = parse("20/11/2024 10:00:00,Class A,219000001,55.5,10.5,x,3.0,0,9000001,A,Cargo,10,50,4\n"
                             "20/11/2024 10:00:00,Class A,219000001,91.0,10.5,x,3.0,0,,,,,,\n"
                             "20/11/2024 10:00:00,Class A,12345,55.5,10.5,x,3.0,0,,,,,,\n"
                             "20/11/2024 25:00:00,Class A,219000001,55.5,10.5,x,3.0,0,,,,,,\n"
                             "20/11/2024 10:00:00,Class A,219000001,55.5,10.5,x,-1,0,,,,,,\n"
                             "20/11/2024 10:01:00,Class A,219000001,55.5,10.5,x,,0,,,,,,\n");
        CHECK(r.total == 6);
        CHECK(r.dropped == 4);
        REQUIRE(r.rows.size() == 2);
        CHECK(r.rows[0].imo == 9000001u);
        CHECK(r.rows[0].length == 50.0);
        CHECK_FALSE(r.rows[1].sog);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("more than half") != std::string::npos);
    }

    TEST_CASE("a row with latitude 91 alone is one drop") {
        const auto r = parse("20/11/2024 10:00:00,Class A,219000001,91.0,10.5,x,3.0,0,,,,,,\n");
        CHECK(r.dropped == 1);
        CHECK(r.rows.empty());
        CHECK(r.warnings.size() == 1);
    }

    TEST_CASE("missing file and missing column are data errors") {
        CHECK_THROWS_AS(parse_raw(fs::path{"/nonexistent/ais.csv"}), DataError);
        std::istringstream in("Timestamp,MMSI,Latitude\n");
        CHECK_THROWS_AS(parse_raw(in, "mem"), DataError);
    }

    TEST_CASE("resampling keeps the first report per bucket, labelled with the bucket start") {
        const auto r = parse("20/11/2024 10:00:40,Class A,219000002,55.0,10.0,x,1.0,0,,,,,,\n"
                             "20/11/2024 10:03:00,Class A,219000002,55.1,10.0,x,2.0,0,,,,,,\n"
                             "20/11/2024 10:07:00,Class A,219000002,55.2,10.0,x,3.0,0,,,,,,\n"
                             "20/11/2024 10:04:59,Class A,219000001,56.0,10.0,x,4.0,0,,,,,,\n"
                             "20/11/2024 10:00:10,Class A,219000001,56.1,10.0,x,,0,,,,,,\n");
        const auto d = resample(r.rows);
        REQUIRE(d.size() == 3);
        CHECK(d[0] == DynamicRecord{Mmsi{219000001}, 600, 56.0, 10.0, 4.0});
        CHECK(d[1] == DynamicRecord{Mmsi{219000002}, 600, 55.0, 10.0, 1.0});
        CHECK(d[2] == DynamicRecord{Mmsi{219000002}, 605, 55.2, 10.0, 3.0});
        CHECK(group_by_vessel(d).size() == 2);
    }

    TEST_CASE("resampling refuses mixed days") {
        const auto r = parse("20/11/2024 10:00:00,Class A,219000001,55.0,10.0,x,1.0,0,,,,,,\n"
                             "21/11/2024 10:00:00,Class A,219000001,55.0,10.0,x,1.0,0,,,,,,\n");
        CHECK_THROWS_AS(resample(r.rows), DataError);
    }

    TEST_CASE("static attributes take the modal value and join emissions by IMO") {
        const auto r = parse("20/11/2024 10:00:00,Class A,219000001,55,10,x,1,0,9000001,ALPHA,Cargo,10,50,4\n"
                             "20/11/2024 10:05:00,Class A,219000001,55,10,x,1,0,9000001,ALPHA,Cargo,10,50,\n"
                             "20/11/2024 10:10:00,Class A,219000001,55,10,x,1,0,9000001,ALPHA I,Cargo,10,50,\n"
                             "20/11/2024 10:00:00,Class A,219000002,55,10,x,1,0,9000002,BETA,Tanker,20,100,8\n"
                             "20/11/2024 10:00:00,Class A,219000003,55,10,x,1,0,,GAMMA,Pleasure,,,\n");
        const auto dir = scratch("emissions");
        text::write_file(dir / "e.csv", "imo,annual_co2_t,co2_per_nm_kg,annual_distance_nm\n"
                                        "9000001,1234.5678,55.5,\n"
                                        "9000002,926,,20000\n");
        const auto e = parse_emissions(dir / "e.csv");
        const auto s = build_static(r.rows, e);
        REQUIRE(s.statics.size() == 3);
        CHECK(s.statics[0].name == "ALPHA");
        CHECK(s.statics[0].draught == 4.0);
        CHECK(s.statics[0].annual_co2_kg == 1234568.0);
        CHECK(s.statics[0].co2_per_nm_kg == 55.5);
        // per-distance figure derived from annual totals: 926 t over 20000 nm
        CHECK(s.statics[1].co2_per_nm_kg == doctest::Approx(46.3));
        CHECK_FALSE(s.statics[2].annual_co2_kg);
        CHECK_FALSE(s.statics[2].imo);
        CHECK(s.conflicts.size() == 1);
    }

    TEST_CASE("bundles drop trajectories without statics") {
        std::vector<Trajectory> dyn = {{Mmsi{219000002}, {{Mmsi{219000002}, 0, 55, 10, 1}}},
                                       {Mmsi{219000001}, {{Mmsi{219000001}, 0, 55, 10, 1}}}};
        std::vector<ShipStatic> st = {{Mmsi{219000001}, "A", {}, {}, {}, {}, "Cargo", {}, {}}};
        std::vector<Mmsi> dropped;
        const auto b = assemble_bundle(dyn, st, {}, &dropped);
        CHECK(b.size() == 1);
        CHECK(dropped == std::vector<Mmsi>{Mmsi{219000002}});
    }

    TEST_CASE("subsets are seeded, nested and keep pinned vessels") {
        const auto full = testing::oracle_fixture_bundle();
        const std::vector<Mmsi> pinned = {Mmsi{testing::kEvening}};
        std::set<Mmsi> previous;
        for (std::size_t n = 1; n <= full.size(); ++n) {
            const auto s = subset(full, n, 42, pinned);
            CHECK(s.size() == n);
            CHECK(s.find_trajectory(Mmsi{testing::kEvening}));
            const auto members = s.vessels();
            std::set<Mmsi> now(members.begin(), members.end());
            CHECK(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
            previous = now;
            CHECK(subset(full, n, 42, pinned) == s);
        }
        CHECK(subset_order(full, 1, {}) != subset_order(full, 2, {}));
        CHECK_THROWS(subset(full, full.size() + 1, 42));
        CHECK_THROWS_AS(subset_order(full, 1, std::vector<Mmsi>{Mmsi{999999999}}), DataError);
    }

    TEST_CASE("bundle CSVs round-trip exactly") {
        const auto b = testing::oracle_fixture_bundle();
        const auto dir = scratch("roundtrip");
        write_bundle(b, dir);
        CHECK(read_bundle(dir) == b);
        const auto header = text::read_file(dir / "dynamic.csv").substr(0, 33);
        CHECK(header == "mmsi,time,latitude,longitude,sog\n");
    }

    TEST_CASE("mmsi parsing needs nine digits") {
        CHECK(parse_mmsi("219000001") == Mmsi{219000001});
        CHECK_FALSE(parse_mmsi("21900000"));
        CHECK_FALSE(parse_mmsi("2190000011"));
        CHECK_FALSE(parse_mmsi("21900000a"));
    }
}
