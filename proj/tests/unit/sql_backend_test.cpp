#include "aisbench/error.hpp"
#include "aisbench/geo.hpp"
#include "aisbench/sql_backend.hpp"

#include "suites.hpp"

#include <doctest.h>

#include <filesystem>

using namespace aisbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "aisbench_sql_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const SqliteBackend& loaded() {
    static const SqliteBackend backend = [] {
        SqliteBackend b(scratch_dir("shared") / "fixture.sqlite");
        b.load(testing::oracle_fixture_bundle());
        return b;
    }();
    return backend;
}

} // namespace

TEST_SUITE("sql") {
    TEST_CASE("screening accepts queries and rejects everything else") {
        CHECK_FALSE(screen_sql("SELECT 1"));
        CHECK_FALSE(screen_sql("  -- comment\n/* block */ with t as (select 1) select * from t"));
        CHECK(screen_sql(""));
        CHECK(screen_sql("   -- only a comment"));
        CHECK(screen_sql("DELETE FROM dynamic"));
        CHECK(screen_sql("PRAGMA writable_schema=1"));
        CHECK(screen_sql("ATTACH 'x' AS y"));
    }

    TEST_CASE("schema has the three tables") {
        const auto ddl = schema_ddl();
        for (const auto* t : {"CREATE TABLE static", "CREATE TABLE dynamic", "CREATE TABLE ports"}) {
            CHECK(ddl.find(t) != std::string_view::npos);
        }
    }

    TEST_CASE("loaded tables mirror the bundle") {
        const auto bundle = testing::oracle_fixture_bundle();
        const auto& b = loaded();
        const auto n = b.query("SELECT count(*) FROM dynamic", {});
        REQUIRE(n.ok);
        std::size_t records = 0;
        for (const auto& t : bundle.dynamic) {
            records += t.records.size();
        }
        CHECK(n.rows.at(0).at(0) == std::to_string(records));
        const auto s = b.query("SELECT count(*) FROM static", {});
        CHECK(s.rows.at(0).at(0) == std::to_string(bundle.statics.size()));
        const auto p = b.query("SELECT name FROM ports ORDER BY name", {});
        REQUIRE(p.ok);
        CHECK(p.columns == std::vector<std::string>{"name"});
        CHECK(p.rows.size() == bundle.ports.size());
    }

    TEST_CASE("st_distance_m matches the haversine") {
        const auto r = loaded().query("SELECT st_distance_m(55.0, 10.0, 55.0, 11.0), st_distance_m(NULL, 1, 2, 3)", {});
        REQUIRE(r.ok);
        const double expect = great_circle_distance({55.0, 10.0}, {55.0, 11.0});
        CHECK(std::stod(r.rows.at(0).at(0)) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(r.rows.at(0).at(1) == "NULL");
    }

    TEST_CASE("row and byte caps truncate instead of failing") {
        SqlLimits lim;
        lim.max_rows = 3;
        const auto r = loaded().query("SELECT * FROM dynamic", lim);
        REQUIRE(r.ok);
        CHECK(r.rows.size() == 3);
        CHECK(r.truncated);
        lim.max_rows = 1000;
        lim.max_bytes = 100;
        const auto b = loaded().query("SELECT * FROM dynamic", lim);
        REQUIRE(b.ok);
        CHECK(b.truncated);
        CHECK(b.rows.size() < 10);
        const auto small = loaded().query("SELECT 1", {});
        CHECK_FALSE(small.truncated);
    }

    TEST_CASE("runaway statements hit the timeout") {
        SqlLimits lim;
        lim.timeout = std::chrono::milliseconds{200};
        const auto r = loaded().query(
            "WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x + 1 FROM c) SELECT count(*) FROM c", lim);
        CHECK_FALSE(r.ok);
        CHECK(r.error.find("timed out") != std::string::npos);
    }

    TEST_CASE("malformed sql is reported, not thrown") {
        const auto r = loaded().query("SELECT nope FROM dynamic", {});
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.error.empty());
        const auto pg = loaded().query("SELECT ST_Distance(a::geography, b) FROM dynamic", {});
        CHECK_FALSE(pg.ok);
    }

    TEST_CASE("write, ddl and escape attempts leave the database untouched") {
        const auto v = testing::sql_safety_suite(scratch_dir("safety"));
        CHECK_MESSAGE(v.ok, (v.failures.empty() ? v.summary : v.failures.front()));
        CHECK(testing::sql_safety_corpus().size() >= 20);
    }

    TEST_CASE("a missing database file is an error result") {
        const SqliteBackend b(scratch_dir("missing") / "absent.sqlite");
        const auto r = b.query("SELECT 1", {});
        CHECK_FALSE(r.ok);
        CHECK_FALSE(fs::exists(scratch_dir("missing") / "absent.sqlite"));
    }

    TEST_CASE("backend urls") {
        const auto b = open_backend("sqlite:/tmp/x", 25);
        const auto* s = dynamic_cast<const SqliteBackend*>(b.get());
        REQUIRE(s);
        CHECK(s->file() == fs::path("/tmp/x/size_25.sqlite"));
        CHECK_THROWS_AS(open_backend("postgresql://localhost/ais", 5), BackendError);
    }
}
