#include "aisbench/nlidb.hpp"

#include "suites.hpp"

#include <doctest.h>

#include <filesystem>
#include <mutex>

using namespace aisbench;
namespace fs = std::filesystem;

namespace {

const Catalog& catalog() {
    static const Catalog c = Catalog::load(std::string{AISBENCH_DATA_DIR} + "/queries.csv");
    return c;
}

const SqliteBackend& backend() {
    static const SqliteBackend b = [] {
        const auto dir = fs::temp_directory_path() / "aisbench_nlidb_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
        SqliteBackend s(dir / "fixture.sqlite");
        s.load(testing::oracle_fixture_bundle());
        return s;
    }();
    return b;
}

// First data cell of the result block in an interpretation prompt.
std::string first_cell(const std::string& prompt) {
    const auto at = prompt.find("\nResult (");
    if (at == std::string::npos) {
        return {};
    }
    auto pos = prompt.find('\n', at + 1);
    pos = prompt.find('\n', pos + 1);
    const auto end = prompt.find_first_of(" |\n", pos + 1);
    return prompt.substr(pos + 1, end - pos - 1);
}

} // namespace

TEST_SUITE("nlidb") {
    TEST_CASE("sql extraction prefers the sql fence") {
        CHECK(extract_sql("Here:\n```sql\nSELECT 1;\n```\n") == "SELECT 1;");
        CHECK(extract_sql("```python\nprint(1)\n```\n```\nselect 2\n```") == "select 2");
        CHECK(extract_sql("```\nWITH a AS (SELECT 1) SELECT * FROM a\n```") ==
              "WITH a AS (SELECT 1) SELECT * FROM a");
        CHECK(extract_sql("You can use SELECT count(*) FROM static; to count.") == "SELECT count(*) FROM static");
        CHECK_FALSE(extract_sql("I would select carefully."));
        CHECK_FALSE(extract_sql("No query today."));
        CHECK(extract_sql("```SQL\nselect 3\n```\n```sql\nselect 4\n```") == "select 3");
    }

    TEST_CASE("rows render aligned with a header") {
        SqlResult r;
        r.ok = true;
        r.columns = {"mmsi", "n"};
        r.rows = {{"219000001", "5"}, {"7", "12"}};
        CHECK(render_rows(r) == "mmsi      | n\n219000001 | 5\n7         | 12\n");
    }

    TEST_CASE("schema card carries ddl, notes and sample rows") {
        const auto card = SchemaCard::describe(backend(), 2);
        CHECK(card.text.find("CREATE TABLE dynamic") != std::string::npos);
        CHECK(card.text.find("st_distance_m") != std::string::npos);
        CHECK(card.text.find("Sample rows from ports:") != std::string::npos);
        CHECK(card.text.find("unavailable") == std::string::npos);
    }

    TEST_CASE("generate, regenerate on error, interpret, aggregate") {
        const auto inst = instantiate(catalog().at("Q4"), {}, 7);
        const auto card = SchemaCard::describe(backend());
        std::mutex m;
        std::vector<std::string> phases;
        ScriptedTransport t(
            [&](const ChatRequest& r) -> std::string {
                {
                    std::lock_guard lock(m);
                    phases.push_back(r.tag.phase + std::to_string(r.sample_index));
                }
                if (r.tag.phase == "sql") {
                    switch (r.sample_index) {
                    case 0: return "```sql\nSELECT count(DISTINCT ship_id) FROM dynamic\n```";
                    case 1: return "I have no idea.";
                    case 2: return "```sql\nDROP TABLE static\n```";
                    default: return "```sql\nSELECT count(*) FROM static\n```";
                    }
                }
                if (r.tag.phase == "regenerate") {
                    CHECK(r.prompt.find("A previous attempt failed.") != std::string::npos);
                    return r.sample_index == 0 ? "```sql\nSELECT count(DISTINCT mmsi) FROM dynamic\n```"
                                               : "still nothing";
                }
                REQUIRE(r.tag.phase == "interpret");
                const auto cell = first_cell(r.prompt);
                return cell.empty() ? "The query failed, so I cannot determine the answer."
                                    : "Answer: " + cell + " ships";
            },
            "m");
        SamplingConfig cfg;
        const auto res = run_nlidb(inst, card, backend(), t, cfg, {}, RequestTag{"nlidb", "Q4", 7, "", ""});
        REQUIRE(res.candidates.size() == 5);
        CHECK(res.candidates[0].regenerated);
        CHECK(res.candidates[0].exchange.ok);
        CHECK(std::get<double>(res.candidates[0].answer.value) == 7.0);
        CHECK(res.candidates[1].failure == "no SQL in response");
        CHECK_FALSE(res.candidates[1].answer.parseable());
        CHECK(res.candidates[2].regenerated);
        CHECK_FALSE(res.candidates[2].exchange.ok);
        CHECK(res.candidates[2].exchange.error.find("rejected") != std::string::npos);
        CHECK_FALSE(res.candidates[2].answer.parseable());
        CHECK_FALSE(res.candidates[3].regenerated);
        CHECK(std::get<double>(res.candidates[3].answer.value) == 7.0);
        CHECK(res.aggregate.parseable == 3);
        CHECK(std::get<double>(res.aggregate.answer.value) == 7.0);
        const auto count = [&](const std::string& p) { return std::count(phases.begin(), phases.end(), p); };
        CHECK(count("regenerate0") == 1);
        CHECK(count("regenerate2") == 1);
        CHECK(count("regenerate3") == 0);
        CHECK(count("interpret1") == 0);
    }

    TEST_CASE("interpretation prompt reports failures and truncation") {
        const auto inst = instantiate(catalog().at("Q4"), {}, 7);
        SqlExchange failed;
        failed.generated_sql = "SELECT x";
        failed.error = "no such column: x";
        const auto p = interpretation_prompt(inst, failed);
        CHECK(p.find("Error: no such column: x") != std::string::npos);
        CHECK(p.find("Result (") == std::string::npos);
        SqlLimits lim;
        lim.max_rows = 2;
        const auto ok = execute_sql("SELECT mmsi FROM dynamic", backend(), lim);
        const auto q = interpretation_prompt(inst, ok);
        CHECK(q.find("Result (2 rows, truncated):") != std::string::npos);
    }
}
