#include "aisbench/error.hpp"
#include "aisbench/eval.hpp"
#include "aisbench/oracle.hpp"

#include "suites.hpp"

#include <doctest.h>

#include <fstream>

using namespace aisbench;
using namespace aisbench::testing;

namespace {

const Catalog& catalog() {
    static const Catalog c = Catalog::load(std::string{AISBENCH_DATA_DIR} + "/queries.csv");
    return c;
}

struct World {
    DatasetBundle bundle = oracle_fixture_bundle();
    ExpertLabels labels = oracle_fixture_labels();
    Oracle oracle{bundle, SegmentationConfig{}, &labels};
};

} // namespace

TEST_SUITE("oracle") {
    TEST_CASE("every constructed case matches its derived answer") {
        const World w;
        for (const auto& c : oracle_fixture_cases(catalog())) {
            const auto got = w.oracle.answer(c.instance);
            INFO(c.instance.spec.id << " " << bindings_key(c.instance.bindings) << " got " << payload_string(got)
                                    << " want " << payload_string(c.expected));
            CHECK(match(got, c.expected) == 1);
        }
        const auto v = oracle_suite(catalog(), 27);
        CHECK_MESSAGE(v.ok, (v.failures.empty() ? v.summary : v.failures.front()));
    }

    TEST_CASE("ferry port visits, legs and round trips") {
        const World w;
        const auto& visits = w.oracle.visits(Mmsi{kFerry});
        REQUIRE(visits.size() == 5);
        CHECK(visits[0] == PortVisit{"Aarhus", 0, 6, 0, 30});
        CHECK(visits[1].port == "Skagen");
        CHECK(visits[1].enter_minute == 60);
        CHECK(visits[1].exit_minute == 90);
        CHECK(w.oracle.terminal_ports(Mmsi{kFerry}) == std::vector<std::string>{"Aarhus", "Skagen"});
        CHECK(w.oracle.round_trips(Mmsi{kFerry}) == 2);
        CHECK(w.oracle.looks_like_ferry(Mmsi{kFerry}));
        CHECK_FALSE(w.oracle.looks_like_ferry(Mmsi{kMoored}));
    }

    TEST_CASE("short sail-by visits are discarded and near gaps merged") {
        const std::vector<Port> ports = {{"P", {55.0, 10.0}}};
        std::vector<DynamicRecord> r;
        // a lone fix inside, then a 30 min stay broken by one stray fix
        const double lats[] = {55.0, 55.1, 55.0, 55.0, 55.03, 55.0, 55.0, 55.0, 55.0};
        const int minutes[] = {0, 5, 10, 15, 20, 22, 27, 32, 40};
        for (int i = 0; i < 9; ++i) {
            r.push_back({Mmsi{1}, minutes[i], lats[i], 10.0, 0.0});
        }
        const auto v = detect_port_visits(r, ports, SegmentationConfig{});
        REQUIRE(v.size() == 1);
        CHECK(v[0].enter_minute == 10);
        CHECK(v[0].exit_minute == 40);
    }

    TEST_CASE("stop episodes need 30 minutes under half a knot") {
        std::vector<DynamicRecord> r;
        const double sog[] = {5, 0.2, 0.2, 0.2, 5, 0, 0, 0, 0, 0, 0, 0, 5};
        for (int i = 0; i < 13; ++i) {
            r.push_back({Mmsi{1}, i * 5, 55.0, 10.0, sog[i]});
        }
        const auto e = segment_stops(r, SegmentationConfig{});
        REQUIRE(e.size() == 3);
        CHECK(e[0].kind == EpisodeKind::move);
        CHECK(e[1] == Episode{EpisodeKind::stop, 5, 11, 25, 55});
        CHECK(e[2].kind == EpisodeKind::move);
        CHECK(e[0].last == 4);
    }

    TEST_CASE("applicability predicates") {
        const World w;
        CHECK(w.oracle.applicable(catalog().at("Q9"), Mmsi{kFerry}));
        CHECK_FALSE(w.oracle.applicable(catalog().at("Q9"), Mmsi{kAnchored}));
        CHECK(w.oracle.applicable(catalog().at("Q13"), Mmsi{kAnchored}));
        CHECK_FALSE(w.oracle.applicable(catalog().at("Q13"), Mmsi{kFerry}));
        CHECK(w.oracle.applicable(catalog().at("Q3"), Mmsi{kEvening}));
        CHECK_FALSE(w.oracle.applicable(catalog().at("Q3"), Mmsi{kMoored}));
        CHECK_FALSE(w.oracle.applicable(catalog().at("Q7"), Mmsi{kMoored}));
        CHECK_FALSE(w.oracle.applicable(catalog().at("Q11"), Mmsi{kMoored}));
        CHECK(w.oracle.applicable(catalog().at("Q24"), Mmsi{kFerry}));
        CHECK_FALSE(w.oracle.applicable(catalog().at("Q24"), Mmsi{kEvening}));
        CHECK(w.oracle.applicable(catalog().at("Q2"), Mmsi{kCrossingNorth}));
    }

    TEST_CASE("expert queries need a label for the dataset size") {
        const auto bundle = oracle_fixture_bundle();
        const ExpertLabels none;
        const Oracle o(bundle, SegmentationConfig{}, &none);
        CHECK_THROWS_AS((void)o.answer(instantiate(catalog().at("Q17"), {}, 7)), DataError);
    }

    TEST_CASE("ferry cross-check agrees on the fixture") {
        const World w;
        const auto rows = w.oracle.ferry_cross_check("Q17");
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].mmsi == Mmsi{kFerry});
        CHECK(rows[0].expert);
        CHECK(rows[0].heuristic);
    }

    TEST_CASE("vessel-local answers do not depend on the other vessels") {
        const World w;
        const auto small = subset(w.bundle, 3, 5, std::vector<Mmsi>{Mmsi{kFerry}});
        const Oracle o(small, SegmentationConfig{});
        for (const char* q : {"Q1", "Q3", "Q7", "Q8", "Q9", "Q10", "Q11", "Q12", "Q14", "Q18", "Q24"}) {
            const auto inst = instantiate(catalog().at(q), {{"MMSI", std::to_string(kFerry)}}, 3);
            CHECK(o.answer(inst) == w.oracle.answer(inst));
        }
    }

    TEST_CASE("labels CSV round-trips") {
        const auto labels = oracle_fixture_labels();
        const auto path = std::filesystem::temp_directory_path() / "aisbench_labels.csv";
        std::ofstream(path) << labels.to_csv();
        const auto back = ExpertLabels::load(path);
        REQUIRE(back.find("Q17", 7));
        CHECK(back.find("Q17", 7)->payload == std::to_string(kFerry));
        CHECK_FALSE(back.find("Q17", 8));
    }
}
