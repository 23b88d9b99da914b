#include "aisbench/eval.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/text.hpp"

#include <doctest.h>

#include <filesystem>

using namespace aisbench;

namespace {

const Catalog& catalog() {
    static const Catalog c = Catalog::load(std::string{AISBENCH_DATA_DIR} + "/queries.csv");
    return c;
}

ScoreRow row(Method m, const QuerySpec& spec, std::size_t n, std::vector<int> outcomes) {
    ScoreRow r;
    r.method = m;
    r.query_id = spec.id;
    r.category = spec.category;
    r.dataset_size = n;
    for (const int o : outcomes) {
        r.detail.push_back({"", "", "", o});
    }
    r.score = score_query(outcomes);
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& part : text::split(s, '\n')) {
        if (!part.empty()) {
            out.emplace_back(part);
        }
    }
    return out;
}

} // namespace

TEST_SUITE("eval") {
    TEST_CASE("numeric matching uses relative tolerance above a per-unit floor") {
        const auto truth = Answer::number(100, "km", 0.05);
        CHECK(match(Answer::number(105, "km"), truth) == 1);
        CHECK(match(Answer::number(94.9, "km"), truth) == 0);
        // near zero the floor takes over: 0.05 * 0.5 km
        const auto zero = Answer::number(0, "km", 0.05);
        CHECK(match(Answer::number(0.02, "km"), zero) == 1);
        CHECK(match(Answer::number(0.03, "km"), zero) == 0);
        const auto exact = Answer::number(7, "ships", 0.0);
        CHECK(match(Answer::number(7, "ships"), exact) == 1);
        CHECK(match(Answer::number(8, "ships"), exact) == 0);
        CHECK(absolute_floor("min") == 5.0);
        CHECK(absolute_floor("no such unit") == 1.0);
    }

    TEST_CASE("unknown and unparseable") {
        const auto unknown = Answer::unknown_value(AnswerKind::numeric, "t");
        CHECK(match(unknown, unknown) == 1);
        CHECK(match(Answer::number(3, "t"), unknown) == 0);
        CHECK(match(unknown, Answer::number(3, "t", 0.05)) == 0);
        const auto bad = Answer::unparseable(AnswerKind::numeric, "t");
        CHECK(match(bad, bad) == 0);
        CHECK(match(bad, Answer::number(3, "t")) == 0);
        CHECK(match(Answer::flag(true), Answer::number(1, "")) == 0);
    }

    TEST_CASE("text, boolean, location and set matching") {
        CHECK(match(Answer::label("  aarhus. "), Answer::label("Aarhus")) == 1);
        CHECK(match(Answer::label("Aarhus Havn"), Answer::label("Aarhus")) == 0);
        CHECK(match(Answer::flag(false), Answer::flag(false)) == 1);
        CHECK(match(Answer::flag(true), Answer::flag(false)) == 0);
        const auto at = Answer::location({55.0, 10.0});
        CHECK(match(Answer::location({55.008, 10.0}), at) == 1);
        CHECK(match(Answer::location({55.01, 10.0}), at) == 0);
        MatchConfig wide;
        wide.location_radius = 2000;
        CHECK(match(Answer::location({55.01, 10.0}), at, wide) == 1);

        const auto truth = Answer::entities({"1", "2", "3", "4"}, "mmsi");
        CHECK(match(Answer::entities({"4", "3", "2", "1"}, "mmsi"), truth) == 1);
        CHECK(match(Answer::entities({"1", "2", "3"}, "mmsi"), truth) == 0);
        MatchConfig loose;
        loose.set_threshold = 0.75;
        CHECK(match(Answer::entities({"1", "2", "3"}, "mmsi"), truth, loose) == 1);
        CHECK(match(Answer::entities({"1", "2"}, "mmsi"), truth, loose) == 0);
        CHECK(match(Answer::entities({}, "mmsi"), Answer::entities({}, "mmsi")) == 1);
        CHECK(match(Answer::entities({"1"}, "mmsi"), Answer::entities({}, "mmsi")) == 0);
    }

    TEST_CASE("query score is the probe mean") {
        CHECK(score_query(std::vector<int>{1, 0, 1, 1, 0}) == doctest::Approx(0.6));
        CHECK(score_query(std::vector<int>{}) == 0.0);
    }

    TEST_CASE("report files, labels and grid") {
        const auto& specs = catalog().specs();
        std::vector<ScoreRow> rows;
        const std::vector<Method> methods{Method::zsa1, Method::nlidb};
        const std::vector<std::size_t> sizes{5, 10};
        for (const auto m : methods) {
            for (const auto n : sizes) {
                for (const auto& s : specs) {
                    rows.push_back(row(m, s, n, {m == Method::nlidb ? 1 : 0, 1}));
                }
            }
        }
        const auto rep = build_report(rows, specs, methods, sizes, "r1");
        CHECK(rep.gaps.empty());
        CHECK(rep.files.size() == 7);
        const auto all = lines(rep.files.at("all.csv"));
        REQUIRE(all.size() == 5);
        CHECK(all[0] == "dataset_size,run_id,score,model");
        CHECK(all[1] == "5,r1,0.5000,Raw");
        CHECK(all[2] == "10,r1,0.5000,Raw");
        CHECK(all[3] == "5,r1,1.0000,PostGIS");
        for (const auto* name : {"attribute.csv", "individual-trajectory.csv", "ship-interaction.csv", "fusion.csv"}) {
            const auto body = lines(rep.files.at(name));
            REQUIRE(body.size() == 5);
            CHECK(body[0] == "category,dataset_size,score,model");
        }
        CHECK(lines(rep.files.at("fusion.csv"))[4] == "fusion,10,1.0000,PostGIS");
        CHECK(lines(rep.files.at("radar_zsa1.csv")).size() == 1 + 27 * 2);
    }

    TEST_CASE("means come from probe details and missing queries are gaps") {
        const auto& specs = catalog().specs();
        std::vector<ScoreRow> rows;
        for (const auto& s : specs) {
            if (s.id == "Q27") {
                continue;
            }
            auto r = row(Method::zsa2, s, 5, {1, 1, 0, 0});
            r.score = 1.0; // stale summary field; details win
            rows.push_back(r);
        }
        const auto rep = build_report(rows, specs, {Method::zsa2}, {5}, "r");
        REQUIRE(rep.gaps.size() == 1);
        CHECK(rep.gaps[0] == "zsa2 size 5: missing Q27");
        CHECK(lines(rep.files.at("all.csv"))[1] == "5,r,0.5000,Compressed");

        const auto dir = std::filesystem::temp_directory_path() / "aisbench_eval_test";
        std::filesystem::remove_all(dir);
        write_report(rep, dir);
        CHECK(std::filesystem::exists(dir / "gaps.txt"));
        CHECK(std::filesystem::exists(dir / "radar_zsa2.csv"));
        write_report(build_report({}, {}, {Method::zsa2}, {5}, "r"), dir);
        CHECK_FALSE(std::filesystem::exists(dir / "gaps.txt"));
    }
}
