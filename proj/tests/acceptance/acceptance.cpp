// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "aisbench/csv.hpp"
#include "aisbench/geo.hpp"
#include "aisbench/pipeline.hpp"
#include "aisbench/text.hpp"

#include "suites.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

namespace fs = std::filesystem;
using namespace aisbench;
using testing::Verdict;

namespace {

constexpr double kReplayBudgetSeconds = 600.0;
// CI budget for parsing, resampling and ground-truthing the 300-ship day.
constexpr double kIngestBudgetSeconds = 120.0;

struct Captured {
    RequestTag tag;
    std::string prompt;
};

/// Replays from the archive and keeps every prompt for the leak guard.
class CapturingTransport final : public Transport {
public:
    explicit CapturingTransport(Transport& inner) : inner_(inner) {}
    ChatResponse complete(const ChatRequest& r) override {
        {
            std::lock_guard lock(mutex_);
            seen_.push_back({r.tag, r.prompt});
        }
        return inner_.complete(r);
    }
    [[nodiscard]] const std::vector<Captured>& seen() const { return seen_; }

private:
    Transport& inner_;
    std::mutex mutex_;
    std::vector<Captured> seen_;
};

struct Context {
    fs::path work;
    std::unique_ptr<Pipeline> pipeline;
    std::vector<Captured> prompts;
    double replay_seconds = 0;
    std::string replay_error;
};

int failures = 0;

void report(const std::string& name, const Verdict& v) {
    std::cout << (v.ok ? "PASS " : "FAIL ") << name;
    if (!v.summary.empty()) {
        std::cout << " (" << v.summary << ")";
    }
    std::cout << '\n';
    if (!v.ok) {
        ++failures;
        std::size_t shown = 0;
        for (const auto& f : v.failures) {
            if (++shown > 10) {
                std::cout << "    ... " << v.failures.size() - 10 << " more\n";
                break;
            }
            std::cout << "    " << f << '\n';
        }
    }
}

Verdict guarded(const std::function<Verdict()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        Verdict v;
        v.fail(std::string("exception: ") + e.what());
        return v;
    }
}

void run_replay(Context& ctx) {
    auto j = nlohmann::json::parse(text::read_file(fs::path{AISBENCH_FIXTURE_DIR} / "config.json"));
    j["out"] = (ctx.work / "out").string();
    auto cfg = RunConfig::parse(j.dump(), ctx.work);
    fs::remove_all(cfg.out);
    const auto start = std::chrono::steady_clock::now();
    try {
        ctx.pipeline = std::make_unique<Pipeline>(cfg);
        ctx.pipeline->ingest();
        ctx.pipeline->ground_truth();
        const ReplayArchive archive(cfg.archive);
        ReplayTransport replay(archive);
        CapturingTransport capture(replay);
        ctx.pipeline->run(&capture);
        ctx.prompts = capture.seen();
        ctx.pipeline->score();
        ctx.pipeline->report();
    } catch (const std::exception& e) {
        ctx.replay_error = e.what();
    }
    ctx.replay_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Verdict offline_end_to_end(const Context& ctx) {
    Verdict v;
    if (!ctx.replay_error.empty()) {
        v.fail("pipeline failed: " + ctx.replay_error);
        return v;
    }
    if (ctx.replay_seconds >= kReplayBudgetSeconds) {
        v.fail("took " + text::fixed(ctx.replay_seconds, 1) + " s");
    }
    const auto& cfg = ctx.pipeline->config();
    if (cfg.transport_mode != "replay" || cfg.sizes.size() != 6 || cfg.methods.size() != 4) {
        v.fail("fixture config is not the full replay grid");
    }
    std::set<std::string> queries;
    for (const auto& inst : ctx.pipeline->load_plan()) {
        queries.insert(inst.spec.id);
    }
    if (queries.size() != 27) {
        v.fail("plan covers " + std::to_string(queries.size()) + " queries");
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(AISBENCH_GOLDEN_DIR)) {
        const auto produced = ctx.pipeline->layout().report() / entry.path().filename();
        ++compared;
        if (!fs::exists(produced)) {
            v.fail("missing " + produced.string());
        } else if (text::read_file(produced) != text::read_file(entry.path())) {
            v.fail(entry.path().filename().string() + " differs from golden");
        }
    }
    if (compared < 9) {
        v.fail("only " + std::to_string(compared) + " golden files");
    }
    v.summary = std::to_string(compared) + " golden CSVs, " + std::to_string(ctx.prompts.size()) +
                " replayed requests, " + text::fixed(ctx.replay_seconds, 1) + " s";
    return v;
}

Verdict oracle_fixtures(const Context& ctx) {
    const auto catalog = Catalog::load(std::string{AISBENCH_DATA_DIR} + "/queries.csv");
    auto v = testing::oracle_suite(catalog, 20);
    if (!ctx.pipeline || !fs::exists(ctx.pipeline->layout().ground_truth())) {
        v.fail("no ground truth from the replay run");
        return v;
    }
    const auto table = csv::Table::read(ctx.pipeline->layout().ground_truth());
    const auto c_n = table.require("dataset_size");
    const auto c_q = table.require("query_id");
    const auto c_p = table.require("payload");
    std::set<std::size_t> checked;
    for (const auto& row : table.rows()) {
        if (row.at(c_q) != "Q4") {
            continue;
        }
        const auto n = std::stoul(row.at(c_n));
        checked.insert(n);
        if (std::stod(row.at(c_p)) != static_cast<double>(n)) {
            v.fail("Q4 at size " + std::to_string(n) + " is " + row.at(c_p));
        }
    }
    for (const auto n : kSweepSizes) {
        if (!checked.count(n)) {
            v.fail("no Q4 ground truth at size " + std::to_string(n));
        }
    }
    v.summary += (v.summary.empty() ? "" : "; ") + std::string("Q4 checked at ") + std::to_string(checked.size()) +
                 " sizes";
    return v;
}

Verdict report_shape(const Context& ctx) {
    Verdict v;
    if (!ctx.pipeline) {
        v.fail("no replay run");
        return v;
    }
    const auto dir = ctx.pipeline->layout().report();
    const std::vector<std::string> labels{"Raw", "Compressed", "Semantic", "PostGIS"};
    const std::vector<std::string> sizes{"5", "10", "25", "50", "75", "100"};
    std::map<std::string, std::vector<double>> means;
    {
        const auto t = csv::Table::read(dir / "all.csv");
        if (t.header() != std::vector<std::string>{"dataset_size", "run_id", "score", "model"}) {
            v.fail("all.csv header");
        }
        std::size_t i = 0;
        for (const auto& r : t.rows()) {
            const auto& want_label = labels.at(std::min(i / sizes.size(), labels.size() - 1));
            if (r.at(3) != want_label || r.at(0) != sizes[i % sizes.size()]) {
                v.fail("all.csv row " + std::to_string(i) + " is " + r.at(0) + "/" + r.at(3));
            }
            means[r.at(3)].push_back(std::stod(r.at(2)));
            ++i;
        }
        if (i != labels.size() * sizes.size()) {
            v.fail("all.csv has " + std::to_string(i) + " rows");
        }
    }
    for (const auto* cat : {"attribute", "individual-trajectory", "ship-interaction", "fusion"}) {
        const auto t = csv::Table::read(dir / (std::string{cat} + ".csv"));
        if (t.header() != std::vector<std::string>{"category", "dataset_size", "score", "model"}) {
            v.fail(std::string{cat} + ".csv header");
        }
        std::size_t i = 0;
        for (const auto& r : t.rows()) {
            if (r.at(0) != cat || r.at(1) != sizes[i % sizes.size()] ||
                r.at(3) != labels.at(std::min(i / sizes.size(), labels.size() - 1))) {
                v.fail(std::string{cat} + ".csv row " + std::to_string(i));
            }
            ++i;
        }
        if (i != labels.size() * sizes.size()) {
            v.fail(std::string{cat} + ".csv has " + std::to_string(i) + " rows");
        }
    }
    const auto& nlidb = means["PostGIS"];
    for (std::size_t i = 1; i < nlidb.size(); ++i) {
        if (nlidb[i] != nlidb[0]) {
            v.fail("NLIDB mean at " + sizes[i] + " is " + text::fixed(nlidb[i], 4) + ", at 5 it is " +
                   text::fixed(nlidb[0], 4));
        }
    }
    for (const auto* label : {"Raw", "Compressed", "Semantic"}) {
        const auto& m = means[label];
        for (std::size_t i = 1; i < m.size(); ++i) {
            if (m[i] > m[i - 1]) {
                v.fail(std::string{label} + " mean rises at size " + sizes[i]);
            }
        }
    }
    v.summary = "NLIDB " + (nlidb.empty() ? std::string{"-"} : text::fixed(nlidb[0], 4)) + " at every size";
    return v;
}

std::set<std::string> column_values(const fs::path& db_file, const std::string& sql) {
    SqlLimits limits;
    limits.max_rows = 1'000'000;
    limits.max_bytes = 64 * 1024 * 1024;
    const auto r = SqliteBackend(db_file).query(sql, limits);
    if (!r.ok) {
        throw std::runtime_error(db_file.string() + ": " + r.error);
    }
    std::set<std::string> out;
    for (const auto& row : r.rows) {
        out.insert(row.at(0));
    }
    return out;
}

Verdict leak_guards(const Context& ctx) {
    Verdict v;
    if (!ctx.pipeline || ctx.prompts.empty()) {
        v.fail("no captured prompts");
        return v;
    }
    std::map<std::size_t, std::set<std::string>> members;
    for (const auto n : ctx.pipeline->config().sizes) {
        for (const auto m : ctx.pipeline->load_subset(n).vessels()) {
            members[n].insert(m.str());
        }
        if (members[n].size() != n) {
            v.fail("subset " + std::to_string(n) + " has " + std::to_string(members[n].size()) + " vessels");
        }
    }
    std::size_t tokens = 0;
    for (const auto& c : ctx.prompts) {
        const auto it = members.find(c.tag.dataset_size);
        if (it == members.end()) {
            v.fail("prompt for unknown size " + std::to_string(c.tag.dataset_size));
            continue;
        }
        for (const auto& t : testing::nine_digit_tokens(c.prompt)) {
            ++tokens;
            if (!it->second.count(t)) {
                v.fail(c.tag.method + " " + c.tag.query_id + " size " + std::to_string(c.tag.dataset_size) +
                       " prompt names " + t);
            }
        }
    }
    const auto backend = ctx.pipeline->config().effective_backend_url().substr(std::string_view{"sqlite:"}.size());
    for (const auto& [n, ids] : members) {
        const auto file = fs::path{backend} / ("size_" + std::to_string(n) + ".sqlite");
        for (const auto* table : {"dynamic", "static"}) {
            const auto found = column_values(file, std::string("SELECT DISTINCT mmsi FROM ") + table);
            if (found != ids) {
                v.fail(std::string{table} + " table for size " + std::to_string(n) + " holds " +
                       std::to_string(found.size()) + " vessels, not the subset");
            }
        }
    }
    v.summary = std::to_string(ctx.prompts.size()) + " prompts, " + std::to_string(tokens) + " vessel ids, " +
                std::to_string(members.size()) + " backends";
    return v;
}

Verdict ingest_scale(const Context& ctx) {
    Verdict v;
    if (!ctx.pipeline) {
        v.fail("no replay run");
        return v;
    }
    const auto full = read_bundle(ctx.pipeline->layout().normalized());
    if (full.size() != 300) {
        v.fail("normalized data has " + std::to_string(full.size()) + " vessels");
    }
    std::map<std::string, double> seconds;
    std::ifstream ledger(ctx.pipeline->layout().ledger());
    for (std::string line; std::getline(ledger, line);) {
        const auto j = nlohmann::json::parse(line);
        double ms = 0;
        for (const auto& [k, t] : j.at("timings_ms").items()) {
            ms += t.get<double>();
        }
        seconds[j.at("command").get<std::string>()] += ms / 1000.0;
    }
    for (const auto* stage : {"ingest", "ground-truth"}) {
        if (!seconds.count(stage) || seconds[stage] <= 0.0) {
            v.fail(std::string("ledger has no timings for ") + stage);
        }
    }
    const double total = seconds["ingest"] + seconds["ground-truth"];
    if (total > kIngestBudgetSeconds) {
        v.fail("ingest and ground truth took " + text::fixed(total, 1) + " s");
    }
    v.summary = std::to_string(full.size()) + " vessels; ledger: ingest " + text::fixed(seconds["ingest"], 1) +
                " s, ground truth " + text::fixed(seconds["ground-truth"], 1) + " s, budget " +
                text::fixed(kIngestBudgetSeconds, 0) + " s";
    return v;
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    ctx.work = argc > 1 ? fs::path{argv[1]} : fs::temp_directory_path() / "aisbench_acceptance";
    fs::create_directories(ctx.work);
    run_replay(ctx);

    report("offline end-to-end replay reproduces the golden report",
           guarded([&] { return offline_end_to_end(ctx); }));
    report("oracle fixture suite", guarded([&] { return oracle_fixtures(ctx); }));
    report("TDTR property suite", guarded([] { return testing::tdtr_suite(100); }));
    report("semantic conversion suite", guarded([] {
               return testing::semantic_suite_with(load_zones(std::string{AISBENCH_DATA_DIR} + "/fixture/zones.csv"));
           }));
    report("self-consistency aggregation contracts", guarded([] { return testing::aggregation_suite(); }));
    report("report shape and size trends", guarded([&] { return report_shape(ctx); }));
    report("leak guards", guarded([&] { return leak_guards(ctx); }));
    report("NLIDB safety corpus", guarded([&] {
               auto v = testing::sql_safety_suite(ctx.work / "safety");
               if (testing::sql_safety_corpus().size() != 25) {
                   v.fail("corpus has " + std::to_string(testing::sql_safety_corpus().size()) + " statements");
               }
               return v;
           }));
    report("ingest scale", guarded([&] { return ingest_scale(ctx); }));
    return failures == 0 ? 0 : 1;
}
