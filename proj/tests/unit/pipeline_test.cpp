#include "aisbench/error.hpp"
#include "aisbench/pipeline.hpp"
#include "aisbench/text.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using namespace aisbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "aisbench_pipeline_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int cli(const std::string& args) {
    const std::string cmd = std::string{"\""} + AISBENCH_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json fixture_config() {
    return nlohmann::json::parse(text::read_file(fs::path{AISBENCH_FIXTURE_DIR} / "config.json"));
}

fs::path write_config(const fs::path& dir, const std::string& name, const nlohmann::json& j) {
    const auto p = dir / name;
    text::write_file(p, j.dump(2));
    return p;
}

} // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("config paths resolve against the config directory") {
        const auto c = RunConfig::parse(
            R"({"inputs": {"raw_ais": "raw/ais.csv", "queries": "/abs/q.csv"},
                "transport": {"archive": "../replay/a.jsonl"},
                "backend": {"url": "sqlite:db"}})",
            "/base/cfg");
        CHECK(c.raw_ais == fs::path("/base/cfg/raw/ais.csv"));
        CHECK(c.queries == fs::path("/abs/q.csv"));
        CHECK(c.archive == fs::path("/base/replay/a.jsonl"));
        CHECK(c.out == fs::path("/base/cfg/out"));
        CHECK(c.effective_backend_url() == "sqlite:/base/cfg/db");
    }

    TEST_CASE("config defaults") {
        const auto c = RunConfig::parse("{}", "/b");
        CHECK(c.sizes == std::vector<std::size_t>{5, 10, 25, 50, 75, 100});
        CHECK(c.methods.size() == 4);
        CHECK(c.seed == 42);
        CHECK(c.probes_per_query == 5);
        CHECK(c.sampling.samples == 5);
        CHECK(c.effective_run_id() == "seed42");
        CHECK(c.effective_backend_url() == "sqlite:/b/out/backend");
        CHECK(c.transport_mode == "replay");
    }

    TEST_CASE("unknown keys and wrong types are config errors") {
        CHECK_THROWS_AS(RunConfig::parse(R"({"sizez": [5]})", "/b"), ConfigError);
        CHECK_THROWS_AS(RunConfig::parse(R"({"sampling": {"temp": 1}})", "/b"), ConfigError);
        CHECK_THROWS_AS(RunConfig::parse(R"({"seed": "x"})", "/b"), ConfigError);
        CHECK_THROWS_AS(RunConfig::parse(R"({"methods": ["zsa9"]})", "/b"), ConfigError);
        CHECK_THROWS_AS(RunConfig::parse("{", "/b"), ConfigError);
        CHECK_THROWS_AS(RunConfig::load("/definitely/not/here.json"), ConfigError);
    }

    TEST_CASE("validation") {
        auto c = RunConfig::parse(R"({"transport": {"archive": "a.jsonl"}})", "/b");
        CHECK_NOTHROW(c.validate());
        c.sizes = {10, 5};
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c.sizes = {5};
        c.transport_mode = "live";
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c.http.credential_env = "TOKEN";
        c.http.model_id = "m";
        CHECK_NOTHROW(c.validate());
        c.transport_mode = "carrier-pigeon";
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }

    TEST_CASE("config json round trip") {
        auto c = RunConfig::parse(R"({"sizes": [5, 10], "methods": ["nlidb"], "seed": 7, "run_id": "r",
                                      "transport": {"archive": "a.jsonl"}})",
                                  "/b");
        const auto again = RunConfig::parse(c.to_json(), "/elsewhere");
        CHECK(again.sizes == c.sizes);
        CHECK(again.methods == c.methods);
        CHECK(again.seed == 7);
        CHECK(again.archive == c.archive);
        CHECK(again.out == c.out);
    }

    TEST_CASE("size and method lists") {
        CHECK(parse_size_list("5, 10,25") == std::vector<std::size_t>{5, 10, 25});
        CHECK_THROWS_AS(parse_size_list("5,x"), ConfigError);
        CHECK_THROWS_AS(parse_size_list("0"), ConfigError);
        CHECK(parse_method_list("zsa3,nlidb") == std::vector<Method>{Method::zsa3, Method::nlidb});
        CHECK_THROWS_AS(parse_method_list("sql"), ConfigError);
    }

    TEST_CASE("stages demand their inputs") {
        auto j = fixture_config();
        const auto dir = scratch("missing");
        j["out"] = (dir / "out").string();
        auto cfg = RunConfig::parse(j.dump(), dir);
        Pipeline p(cfg);
        CHECK_THROWS_AS(p.ground_truth(), DataError);
        CHECK_THROWS_AS(p.score(), DataError);
        CHECK_THROWS_AS(p.report(), DataError);
        cfg.queries.clear();
        CHECK_THROWS_AS(Pipeline{cfg}, ConfigError);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("usage and config failures exit with the config code") {
        CHECK(cli("") == 2);
        CHECK(cli("frobnicate") == 2);
        CHECK(cli("ingest --config /definitely/not/here.json") == 2);
        const auto dir = scratch("cli_config");
        auto j = fixture_config();
        j["bogus"] = 1;
        CHECK(cli("ingest --config " + write_config(dir, "bad.json", j).string()) == 2);
        CHECK(cli("--help") == 0);
    }

    TEST_CASE("stage exit codes over the fixture") {
        const auto dir = scratch("cli_stages");
        auto j = fixture_config();
        j["out"] = (dir / "out").string();
        j["sizes"] = {5};
        const auto good = write_config(dir, "good.json", j);

        CHECK(cli("ground-truth --config " + good.string()) == 3);
        REQUIRE(cli("ingest --config " + good.string()) == 0);
        REQUIRE(cli("ground-truth --config " + good.string()) == 0);

        auto empty_archive = j;
        text::write_file(dir / "empty.jsonl", "");
        empty_archive["transport"]["archive"] = (dir / "empty.jsonl").string();
        CHECK(cli("run --methods zsa1 --config " + write_config(dir, "miss.json", empty_archive).string()) == 4);

        auto pg = j;
        pg["backend"] = {{"url", "postgresql://localhost/ais"}};
        CHECK(cli("run --methods nlidb --config " + write_config(dir, "pg.json", pg).string()) == 5);

        CHECK(cli("run --methods zsa1 --config " + good.string()) == 0);
        CHECK(cli("score --methods zsa1 --config " + good.string()) == 0);
        CHECK(cli("report --methods zsa1 --config " + good.string()) == 0);
        CHECK(fs::exists(dir / "out" / "report" / "all.csv"));
        CHECK(cli("report --methods zsa1,zsa2 --config " + good.string()) == 6);
        CHECK(fs::exists(dir / "out" / "report" / "gaps.txt"));
    }
}
