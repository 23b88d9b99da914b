#include "fixture/fixture.hpp"

#include "aisbench/sql_backend.hpp"
#include "aisbench/text.hpp"

#include "suites.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>

using namespace aisbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "aisbench_fixture_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("fixture") {
    TEST_CASE("zsa accuracy never rises with dataset size") {
        for (const auto* m : {"zsa1", "zsa2", "zsa3"}) {
            double prev = 1.0;
            for (const auto n : kSweepSizes) {
                const double p = fixture::zsa_accuracy(m, n);
                CHECK(p <= prev);
                CHECK(p > 0.0);
                prev = p;
            }
        }
    }

    TEST_CASE("intended outcomes are deterministic") {
        for (const auto n : kSweepSizes) {
            CHECK(fixture::zsa_intends_correct("zsa1", "Q8", "MMSI=219000001", n) ==
                  fixture::zsa_intends_correct("zsa1", "Q8", "MMSI=219000001", n));
        }
        CHECK(fixture::zsa_intends_correct("zsa2", "Q12", "", 100));
        CHECK_FALSE(fixture::zsa_intends_correct("zsa1", "Q16", "", 5));
    }

    TEST_CASE("generation is reproducible and matches the fleet plan") {
        const auto ports = fs::path{AISBENCH_DATA_DIR} / "fixture" / "ports.csv";
        const auto a = fixture::generate(ports, scratch("a"));
        const auto b = fixture::generate(ports, scratch("b"));
        CHECK(text::read_file(a.raw) == text::read_file(b.raw));
        CHECK(text::read_file(a.emissions) == text::read_file(b.emissions));
        CHECK(a.fleet.size() == fixture::kFleetSize);
        std::set<Mmsi> ids;
        std::map<std::string, std::size_t> roles;
        for (const auto& f : a.fleet) {
            ids.insert(f.mmsi);
            ++roles[f.role];
        }
        CHECK(ids.size() == fixture::kFleetSize);
        CHECK(roles["ferry"] == 6);
        CHECK(roles["convoy"] == 9);
        CHECK(roles["near_miss"] == 4);
        CHECK(fixture::load_manifest(a.manifest).size() == a.fleet.size());
        CHECK(a.invalid_rows > 0);

        const auto c = fixture::generate(ports, scratch("c"), fixture::kFixtureSeed + 1);
        CHECK(text::read_file(c.raw) != text::read_file(a.raw));
    }

    TEST_CASE("expert labels follow subset membership") {
        const std::vector<fixture::FleetMember> fleet = {{Mmsi{1}, "ferry", "r1"},
                                                        {Mmsi{2}, "convoy", "c1"},
                                                        {Mmsi{3}, "convoy", "c1"},
                                                        {Mmsi{4}, "convoy", "c1"},
                                                        {Mmsi{5}, "cargo", ""}};
        std::map<std::size_t, std::vector<Mmsi>> subsets;
        subsets[2] = {Mmsi{1}, Mmsi{2}};
        subsets[4] = {Mmsi{1}, Mmsi{2}, Mmsi{3}, Mmsi{5}};
        const auto labels = fixture::expert_labels(fleet, subsets);
        REQUIRE(labels.find("Q17", 2));
        CHECK(labels.find("Q17", 2)->payload == "1");
        CHECK(labels.find("Q16", 2)->payload.empty());
        CHECK(labels.find("Q16", 4)->payload == "2+3");
    }

    TEST_CASE("canned sql computes the truth where intended") {
        const auto dir = scratch("sql");
        SqliteBackend b(dir / "f.sqlite");
        b.load(testing::oracle_fixture_bundle());
        const auto count = b.query(fixture::canned_sql("Q4", ""), {});
        REQUIRE(count.ok);
        CHECK(count.rows.at(0).at(0) == "7");
        CHECK(fixture::nlidb_intends_correct("Q4"));
        CHECK_FALSE(fixture::nlidb_intends_correct("Q16"));
        CHECK_FALSE(b.query(fixture::canned_sql("Q16", ""), {}).ok);
    }
}
