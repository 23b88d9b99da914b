#include "aisbench/pipeline.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/digest.hpp"
#include "aisbench/error.hpp"
#include "aisbench/nlidb.hpp"
#include "aisbench/random.hpp"
#include "aisbench/semantics.hpp"
#include "aisbench/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace aisbench {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) {
        return {};
    }
    const std::filesystem::path path{p};
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <typename T>
void take(const json& j, const char* key, T& into) {
    if (const auto it = j.find(key); it != j.end()) {
        into = it->get<T>();
    }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

class Stopwatch {
public:
    double lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <typename F>
void parallel_for(std::size_t n, std::size_t limit, F&& body) {
    if (limit <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(limit, n); ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next = n;
                }
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::string instance_key(std::size_t n, const std::string& query_id, const std::string& bindings) {
    return std::to_string(n) + "|" + query_id + "|" + bindings;
}

} // namespace

RunConfig RunConfig::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        reject_unknown(j,
                       {"inputs", "out", "sizes", "methods", "seed", "probes_per_query", "run_id", "sampling",
                        "segmentation", "compression", "semantic", "transport", "backend"},
                       "");
        if (const auto it = j.find("inputs"); it != j.end()) {
            reject_unknown(*it, {"raw_ais", "emissions", "ports", "zones", "queries", "expert_labels"}, "inputs.");
            auto path = [&](const char* key, std::filesystem::path& into) {
                if (it->contains(key)) {
                    into = resolve(base_dir, it->at(key).get<std::string>());
                }
            };
            path("raw_ais", c.raw_ais);
            path("emissions", c.emissions);
            path("ports", c.ports);
            path("zones", c.zones);
            path("queries", c.queries);
            path("expert_labels", c.expert_labels);
        }
        if (j.contains("out")) {
            c.out = resolve(base_dir, j.at("out").get<std::string>());
        } else {
            c.out = resolve(base_dir, "out");
        }
        take(j, "sizes", c.sizes);
        if (const auto it = j.find("methods"); it != j.end()) {
            c.methods.clear();
            for (const auto& m : *it) {
                const auto parsed = parse_method(m.get<std::string>());
                if (!parsed) {
                    throw ConfigError("unknown method '" + m.get<std::string>() + "'");
                }
                c.methods.push_back(*parsed);
            }
        }
        take(j, "seed", c.seed);
        take(j, "probes_per_query", c.probes_per_query);
        take(j, "run_id", c.run_id);
        if (const auto it = j.find("sampling"); it != j.end()) {
            reject_unknown(*it, {"temperature", "samples", "max_context_tokens", "max_retries", "parallelism"},
                           "sampling.");
            take(*it, "temperature", c.sampling.temperature);
            take(*it, "samples", c.sampling.samples);
            take(*it, "max_context_tokens", c.sampling.max_context_tokens);
            take(*it, "max_retries", c.sampling.max_retries);
            take(*it, "parallelism", c.sampling.parallelism);
        }
        if (const auto it = j.find("segmentation"); it != j.end()) {
            auto& s = c.segmentation;
            reject_unknown(*it,
                           {"moving_sog_kn", "anchorage_sog_kn", "anchorage_min_minutes", "port_radius_m",
                            "proximity_m", "collision_distance_m", "collision_sog_kn", "min_port_dwell_minutes"},
                           "segmentation.");
            take(*it, "moving_sog_kn", s.moving_sog_threshold);
            take(*it, "anchorage_sog_kn", s.anchorage_sog_threshold);
            take(*it, "anchorage_min_minutes", s.anchorage_min_duration);
            take(*it, "port_radius_m", s.port_radius);
            take(*it, "proximity_m", s.proximity_threshold);
            take(*it, "collision_distance_m", s.collision_distance);
            take(*it, "collision_sog_kn", s.collision_relative_speed);
            take(*it, "min_port_dwell_minutes", s.min_port_dwell);
        }
        if (const auto it = j.find("compression"); it != j.end()) {
            reject_unknown(*it, {"epsilon_m"}, "compression.");
            take(*it, "epsilon_m", c.compression.epsilon);
        }
        if (const auto it = j.find("semantic"); it != j.end()) {
            reject_unknown(*it, {"buffer_m"}, "semantic.");
            take(*it, "buffer_m", c.semantic_buffer);
        }
        if (const auto it = j.find("transport"); it != j.end()) {
            reject_unknown(*it, {"mode", "archive", "endpoint", "model_id", "credential_env", "timeout_s"},
                           "transport.");
            take(*it, "mode", c.transport_mode);
            if (it->contains("archive")) {
                c.archive = resolve(base_dir, it->at("archive").get<std::string>());
            }
            take(*it, "endpoint", c.http.endpoint);
            take(*it, "model_id", c.http.model_id);
            take(*it, "credential_env", c.http.credential_env);
            take(*it, "timeout_s", c.http.timeout_seconds);
        }
        if (const auto it = j.find("backend"); it != j.end()) {
            reject_unknown(*it, {"url", "max_rows", "max_bytes", "timeout_ms"}, "backend.");
            if (it->contains("url")) {
                auto url = it->at("url").get<std::string>();
                constexpr std::string_view scheme = "sqlite:";
                if (url.starts_with(scheme)) {
                    url = std::string{scheme} + resolve(base_dir, url.substr(scheme.size())).string();
                }
                c.backend_url = url;
            }
            take(*it, "max_rows", c.sql_limits.max_rows);
            take(*it, "max_bytes", c.sql_limits.max_bytes);
            if (it->contains("timeout_ms")) {
                c.sql_limits.timeout = std::chrono::milliseconds(it->at("timeout_ms").get<long long>());
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file " + path.string() + " does not exist");
    }
    return parse(text::read_file(path), std::filesystem::absolute(path).parent_path());
}

void RunConfig::validate() const {
    if (sizes.empty()) {
        throw ConfigError("no dataset sizes configured");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
            throw ConfigError("dataset sizes must be positive and strictly increasing");
        }
    }
    if (methods.empty()) {
        throw ConfigError("no methods configured");
    }
    if (probes_per_query == 0) {
        throw ConfigError("probes_per_query must be at least 1");
    }
    sampling.validate();
    if (compression.epsilon <= 0.0) {
        throw ConfigError("compression epsilon must be positive");
    }
    if (semantic_buffer < 0.0) {
        throw ConfigError("semantic buffer must be non-negative");
    }
    if (segmentation.port_radius <= 0.0 || segmentation.min_port_dwell < 0 ||
        segmentation.anchorage_min_duration <= 0) {
        throw ConfigError("segmentation thresholds must be positive");
    }
    if (transport_mode == "replay") {
        if (archive.empty()) {
            throw ConfigError("replay mode needs transport.archive");
        }
    } else if (transport_mode == "live") {
        if (http.credential_env.empty()) {
            throw ConfigError("live mode needs transport.credential_env");
        }
        if (http.model_id.empty()) {
            throw ConfigError("live mode needs transport.model_id");
        }
    } else {
        throw ConfigError("transport mode must be replay or live, got '" + transport_mode + "'");
    }
}

std::string RunConfig::effective_run_id() const { return run_id.empty() ? "seed" + std::to_string(seed) : run_id; }

std::string RunConfig::effective_backend_url() const {
    return backend_url.empty() ? "sqlite:" + (out / "backend").string() : backend_url;
}

std::string RunConfig::to_json() const {
    ojson j;
    j["inputs"] = {{"raw_ais", raw_ais.string()},     {"emissions", emissions.string()},
                   {"ports", ports.string()},         {"zones", zones.string()},
                   {"queries", queries.string()},     {"expert_labels", expert_labels.string()}};
    j["out"] = out.string();
    j["sizes"] = sizes;
    std::vector<std::string> m;
    for (const auto x : methods) {
        m.emplace_back(to_string(x));
    }
    j["methods"] = m;
    j["seed"] = seed;
    j["probes_per_query"] = probes_per_query;
    j["run_id"] = effective_run_id();
    j["sampling"] = {{"temperature", sampling.temperature},
                     {"samples", sampling.samples},
                     {"max_context_tokens", sampling.max_context_tokens},
                     {"max_retries", sampling.max_retries},
                     {"parallelism", sampling.parallelism}};
    const auto& s = segmentation;
    j["segmentation"] = {{"moving_sog_kn", s.moving_sog_threshold},
                         {"anchorage_sog_kn", s.anchorage_sog_threshold},
                         {"anchorage_min_minutes", s.anchorage_min_duration},
                         {"port_radius_m", s.port_radius},
                         {"proximity_m", s.proximity_threshold},
                         {"collision_distance_m", s.collision_distance},
                         {"collision_sog_kn", s.collision_relative_speed},
                         {"min_port_dwell_minutes", s.min_port_dwell}};
    j["compression"] = {{"epsilon_m", compression.epsilon}};
    j["semantic"] = {{"buffer_m", semantic_buffer}};
    j["transport"] = {{"mode", transport_mode},
                      {"archive", archive.string()},
                      {"endpoint", http.endpoint},
                      {"model_id", http.model_id},
                      {"credential_env", http.credential_env},
                      {"timeout_s", http.timeout_seconds}};
    j["backend"] = {{"url", effective_backend_url()},
                    {"max_rows", sql_limits.max_rows},
                    {"max_bytes", sql_limits.max_bytes},
                    {"timeout_ms", sql_limits.timeout.count()}};
    return j.dump();
}

std::vector<std::size_t> parse_size_list(std::string_view s) {
    std::vector<std::size_t> out;
    for (const auto& part : text::split(s, ',')) {
        const auto v = text::parse_int(text::trim(part));
        if (!v || *v <= 0) {
            throw ConfigError("bad dataset size '" + part + "'");
        }
        out.push_back(static_cast<std::size_t>(*v));
    }
    return out;
}

std::vector<Method> parse_method_list(std::string_view s) {
    std::vector<Method> out;
    for (const auto& part : text::split(s, ',')) {
        const auto m = parse_method(part);
        if (!m) {
            throw ConfigError("unknown method '" + part + "' (expected zsa1, zsa2, zsa3 or nlidb)");
        }
        out.push_back(*m);
    }
    return out;
}

std::vector<Mmsi> choose_probe_pool(const DatasetBundle& bundle, const Oracle& oracle,
                                    const std::vector<QuerySpec>& specs, std::size_t pool_size, std::uint64_t seed,
                                    std::vector<std::string>* log) {
    std::map<std::string, const QuerySpec*> predicates;
    for (const auto& s : specs) {
        if (s.parameterized()) {
            predicates.emplace(s.applicability, &s);
        }
    }
    const auto order = subset_order(bundle, seed, {});
    std::map<Mmsi, std::set<std::string>> satisfies;
    for (const auto m : order) {
        for (const auto& [name, spec] : predicates) {
            if (oracle.applicable(*spec, m)) {
                satisfies[m].insert(name);
            }
        }
    }
    std::set<std::string> uncovered;
    for (const auto& [name, spec] : predicates) {
        uncovered.insert(name);
    }
    std::vector<Mmsi> pool;
    while (!uncovered.empty() && pool.size() < pool_size) {
        std::optional<Mmsi> best;
        std::size_t best_gain = 0;
        for (const auto m : order) {
            if (std::find(pool.begin(), pool.end(), m) != pool.end()) {
                continue;
            }
            std::size_t gain = 0;
            for (const auto& p : satisfies[m]) {
                gain += uncovered.count(p);
            }
            if (gain > best_gain) {
                best = m;
                best_gain = gain;
            }
        }
        if (!best) {
            break;
        }
        pool.push_back(*best);
        for (const auto& p : satisfies[*best]) {
            uncovered.erase(p);
        }
    }
    if (log) {
        for (const auto& p : uncovered) {
            log->push_back("no probe vessel satisfies '" + p + "'");
        }
    }
    for (const auto m : order) {
        if (pool.size() >= pool_size) {
            break;
        }
        if (std::find(pool.begin(), pool.end(), m) == pool.end()) {
            pool.push_back(m);
        }
    }
    return pool;
}

std::string semantic_text(const DatasetBundle& bundle, const SemanticConfig& cfg) {
    std::string out;
    for (const auto& t : bundle.dynamic) {
        if (!out.empty()) {
            out += '\n';
        }
        const auto events = to_semantic_events(t.records, cfg);
        out += render_events(events, *bundle.find_static(t.mmsi));
    }
    return out;
}

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)), layout_{cfg_.out} {
    cfg_.validate();
    if (cfg_.queries.empty()) {
        throw ConfigError("inputs.queries is not set");
    }
    catalog_ = Catalog::load(cfg_.queries);
}

void Pipeline::require(const std::filesystem::path& artifact, const char* stage) const {
    if (!std::filesystem::exists(artifact)) {
        throw DataError("missing " + artifact.string() + "; run the " + stage + " stage first");
    }
}

void Pipeline::append_ledger(const std::string& command, const std::vector<std::filesystem::path>& inputs,
                             const std::vector<std::filesystem::path>& outputs,
                             const std::vector<std::pair<std::string, double>>& timings_ms,
                             const std::vector<std::pair<std::string, std::string>>& notes) const {
    ojson j;
    j["command"] = command;
    j["at"] = utc_now();
    j["run_id"] = cfg_.effective_run_id();
    j["seed"] = cfg_.seed;
    j["model_id"] = cfg_.http.model_id;
    j["config"] = ojson::parse(cfg_.to_json());
    auto digests = [](const std::vector<std::filesystem::path>& paths) {
        ojson d = ojson::object();
        for (const auto& p : paths) {
            if (std::filesystem::is_regular_file(p)) {
                d[p.string()] = sha256_file(p);
            }
        }
        return d;
    };
    j["inputs"] = digests(inputs);
    j["outputs"] = digests(outputs);
    ojson t = ojson::object();
    for (const auto& [name, ms] : timings_ms) {
        t[name] = std::round(ms * 10.0) / 10.0;
    }
    j["timings_ms"] = t;
    for (const auto& [k, v] : notes) {
        j[k] = v;
    }
    std::filesystem::create_directories(layout_.root);
    std::ofstream out(layout_.ledger(), std::ios::app);
    out << j.dump() << '\n';
}

void Pipeline::ingest() {
    for (const auto& [p, what] : {std::pair{cfg_.raw_ais, "inputs.raw_ais"}, {cfg_.emissions, "inputs.emissions"},
                                  {cfg_.ports, "inputs.ports"}, {cfg_.zones, "inputs.zones"}}) {
        if (p.empty()) {
            throw ConfigError(std::string(what) + " is not set");
        }
    }
    std::vector<std::pair<std::string, double>> timings;
    Stopwatch watch;
    auto parsed = parse_raw(cfg_.raw_ais);
    timings.emplace_back("parse", watch.lap_ms());
    const auto records = resample(parsed.rows, cfg_.segmentation.sample_period);
    auto trajectories = group_by_vessel(records);
    timings.emplace_back("resample", watch.lap_ms());
    const auto emissions = parse_emissions(cfg_.emissions);
    auto statics = build_static(parsed.rows, emissions);
    timings.emplace_back("static", watch.lap_ms());
    std::vector<Mmsi> dropped;
    const auto full = assemble_bundle(std::move(trajectories), std::move(statics.statics),
                                      parse_ports(cfg_.ports, cfg_.segmentation.port_radius), &dropped);
    parsed.rows.clear();
    parsed.rows.shrink_to_fit();
    write_bundle(full, layout_.normalized());
    timings.emplace_back("normalize", watch.lap_ms());

    std::vector<std::string> log;
    log.push_back("raw rows: " + std::to_string(parsed.total) + ", dropped: " + std::to_string(parsed.dropped));
    for (const auto& w : parsed.warnings) {
        log.push_back("warning: " + w);
    }
    for (const auto& c : statics.conflicts) {
        log.push_back("static conflict: " + c);
    }
    for (const auto m : dropped) {
        log.push_back("dropped vessel without static data: " + m.str());
    }
    log.push_back("vessels: " + std::to_string(full.size()));

    if (cfg_.sizes.back() > full.size()) {
        throw ConfigError("largest dataset size " + std::to_string(cfg_.sizes.back()) + " exceeds the " +
                          std::to_string(full.size()) + " vessels available");
    }
    const Oracle full_oracle(full, cfg_.segmentation);
    const auto pool =
        choose_probe_pool(full, full_oracle, catalog_.specs(), cfg_.sizes.front(), cfg_.seed, &log);
    const auto order = subset_order(full, cfg_.seed, pool);
    {
        csv::Writer w({"rank", "mmsi", "pinned"});
        for (std::size_t i = 0; i < order.size(); ++i) {
            w.add({std::to_string(i + 1), order[i].str(), i < pool.size() ? "yes" : "no"});
        }
        w.write(layout_.subsets());
    }
    timings.emplace_back("subsets", watch.lap_ms());

    SemanticConfig semantic{load_zones(cfg_.zones), cfg_.semantic_buffer};
    for (const auto n : cfg_.sizes) {
        const auto sub = subset(full, n, cfg_.seed, pool);
        const auto dir = layout_.variant(n);
        write_bundle(sub, dir);
        std::vector<Trajectory> compressed;
        for (const auto& t : sub.dynamic) {
            compressed.push_back(tdtr_compress(t, cfg_.compression));
        }
        text::write_file(dir / "compressed.csv", dynamic_csv(compressed));
        text::write_file(dir / "semantic.txt", semantic_text(sub, semantic));
    }
    timings.emplace_back("variants", watch.lap_ms());

    const auto smallest = subset(full, cfg_.sizes.front(), cfg_.seed, pool);
    const auto plan = probe_plan(
        catalog_.specs(), smallest, cfg_.probes_per_query, cfg_.seed,
        [&](const QuerySpec& s, Mmsi m) { return full_oracle.applicable(s, m); }, &log);
    {
        csv::Writer w({"query_id", "bindings"});
        for (const auto& inst : plan) {
            w.add({inst.spec.id, bindings_key(inst.bindings)});
        }
        w.write(layout_.plan());
    }
    timings.emplace_back("plan", watch.lap_ms());
    text::write_file(layout_.root / "ingest_log.txt", text::join(log, "\n") + "\n");

    append_ledger("ingest", {cfg_.raw_ais, cfg_.emissions, cfg_.ports, cfg_.zones, cfg_.queries},
                  {layout_.normalized() / "dynamic.csv", layout_.normalized() / "static.csv",
                   layout_.normalized() / "ports.csv", layout_.subsets(), layout_.plan()},
                  timings, {{"vessels", std::to_string(full.size())}, {"raw_rows", std::to_string(parsed.total)}});
}

std::vector<QueryInstance> Pipeline::load_plan() const {
    require(layout_.plan(), "ingest");
    const auto table = csv::Table::read(layout_.plan());
    const auto c_q = table.require("query_id");
    const auto c_b = table.require("bindings");
    std::vector<QueryInstance> plan;
    for (const auto& row : table.rows()) {
        plan.push_back(instantiate(catalog_.at(row.at(c_q)), parse_bindings(c_b < row.size() ? row[c_b] : "")));
    }
    return plan;
}

DatasetBundle Pipeline::load_subset(std::size_t n) const {
    const auto dir = layout_.variant(n);
    require(dir / "dynamic.csv", "ingest");
    return read_bundle(dir, cfg_.segmentation.port_radius);
}

void Pipeline::ground_truth() {
    const auto plan = load_plan();
    if (cfg_.expert_labels.empty()) {
        throw ConfigError("inputs.expert_labels is not set");
    }
    const auto labels = ExpertLabels::load(cfg_.expert_labels);
    std::vector<std::pair<std::string, double>> timings;
    csv::Writer truth({"dataset_size", "query_id", "bindings", "answer_kind", "unit", "tolerance", "payload"});
    csv::Writer ferries({"dataset_size", "mmsi", "expert", "heuristic"});
    for (const auto n : cfg_.sizes) {
        Stopwatch watch;
        const auto bundle = load_subset(n);
        const Oracle oracle(bundle, cfg_.segmentation, &labels);
        for (auto inst : plan) {
            inst.dataset_size = n;
            const auto a = oracle.answer(inst);
            truth.add({std::to_string(n), inst.spec.id, bindings_key(inst.bindings),
                       std::string{to_string(a.kind)}, a.unit, text::shortest(a.tolerance), payload_string(a)});
        }
        for (const auto& row : oracle.ferry_cross_check("Q17")) {
            ferries.add({std::to_string(n), row.mmsi.str(), row.expert ? "yes" : "no", row.heuristic ? "yes" : "no"});
        }
        timings.emplace_back("size_" + std::to_string(n), watch.lap_ms());
    }
    truth.write(layout_.ground_truth());
    ferries.write(layout_.ferry_crosscheck());
    std::vector<std::filesystem::path> inputs{layout_.plan(), cfg_.expert_labels};
    for (const auto n : cfg_.sizes) {
        inputs.push_back(layout_.variant(n) / "dynamic.csv");
    }
    append_ledger("ground-truth", inputs, {layout_.ground_truth(), layout_.ferry_crosscheck()}, timings);
}

namespace {

struct InstanceResult {
    Aggregate aggregate;
    std::vector<std::string> flags;
    std::vector<ojson> trace;
    std::size_t requests = 0;
};

std::string dry_run_banner(Method m, std::size_t n, const QueryInstance& inst) {
    return "==== " + std::string{to_string(m)} + " size " + std::to_string(n) + " " + inst.spec.id + " " +
           bindings_key(inst.bindings) + " ====\n";
}

} // namespace

RunSummary Pipeline::run(Transport* transport, bool dry_run, std::ostream* dry_out) {
    const auto plan = load_plan();
    std::unique_ptr<ReplayArchive> archive;
    std::unique_ptr<Transport> owned_inner;
    std::unique_ptr<Transport> owned;
    if (!transport && !dry_run) {
        if (cfg_.transport_mode == "replay") {
            if (!std::filesystem::exists(cfg_.archive)) {
                throw ConfigError("replay archive " + cfg_.archive.string() + " does not exist");
            }
            archive = std::make_unique<ReplayArchive>(cfg_.archive);
            owned = std::make_unique<ReplayTransport>(*archive);
        } else {
            archive = std::make_unique<ReplayArchive>(cfg_.archive.empty() ? layout_.root / "archive.jsonl"
                                                                            : cfg_.archive);
            owned_inner = std::make_unique<HttpChatTransport>(cfg_.http);
            owned = std::make_unique<RecordingTransport>(*owned_inner, *archive);
        }
        transport = owned.get();
    }

    RunSummary summary;
    std::vector<std::pair<std::string, double>> timings;
    csv::Writer answers({"method", "dataset_size", "query_id", "bindings", "payload", "parseable", "flags"});
    std::string responses;
    for (const auto method : cfg_.methods) {
        for (const auto n : cfg_.sizes) {
            Stopwatch watch;
            const auto dir = layout_.variant(n);
            require(dir / "static.csv", "ingest");
            PromptData data;
            std::unique_ptr<SqlBackend> backend;
            std::optional<SchemaCard> schema;
            if (method == Method::nlidb) {
                backend = open_backend(cfg_.effective_backend_url(), n);
                backend->load(load_subset(n));
                schema = SchemaCard::describe(*backend);
            } else {
                data.static_csv = text::read_file(dir / "static.csv");
                data.ports_csv = text::read_file(dir / "ports.csv");
                if (method == Method::zsa1) {
                    data.dynamic_csv = text::read_file(dir / "dynamic.csv");
                } else if (method == Method::zsa2) {
                    data.dynamic_csv = text::read_file(dir / "compressed.csv");
                } else {
                    data.semantic_text = text::read_file(dir / "semantic.txt");
                }
            }

            std::vector<InstanceResult> results(plan.size());
            std::mutex dry_mutex;
            parallel_for(plan.size(), dry_run ? 1 : cfg_.sampling.parallelism, [&](std::size_t i) {
                auto inst = plan[i];
                inst.dataset_size = n;
                const auto& spec = inst.spec;
                auto& r = results[i];
                RequestTag tag{std::string{to_string(method)}, spec.id, n, bindings_key(inst.bindings), "answer"};
                auto trace_base = [&](const std::string& phase, std::size_t sample) {
                    ojson j;
                    j["method"] = tag.method;
                    j["dataset_size"] = n;
                    j["query_id"] = spec.id;
                    j["bindings"] = tag.bindings;
                    j["phase"] = phase;
                    j["sample"] = sample;
                    return j;
                };
                if (method == Method::nlidb) {
                    if (dry_run) {
                        std::lock_guard lock(dry_mutex);
                        *dry_out << dry_run_banner(method, n, inst) << generation_prompt(inst, *schema) << '\n';
                        return;
                    }
                    const auto result =
                        run_nlidb(inst, *schema, *backend, *transport, cfg_.sampling, cfg_.sql_limits, tag);
                    r.aggregate = result.aggregate;
                    bool all_failed = true;
                    for (std::size_t s = 0; s < result.candidates.size(); ++s) {
                        const auto& c = result.candidates[s];
                        auto j = trace_base("nlidb", s);
                        j["sql"] = c.exchange.generated_sql;
                        j["status"] = c.exchange.ok ? "ok" : "error";
                        j["error"] = c.exchange.error;
                        j["regenerated"] = c.regenerated;
                        j["truncated"] = c.exchange.truncated;
                        j["interpretation"] = c.exchange.interpretation;
                        j["failure"] = c.failure;
                        j["answer"] = payload_string(c.answer);
                        r.trace.push_back(std::move(j));
                        r.requests += 2 + (c.regenerated ? 1 : 0);
                        all_failed = all_failed && !c.failure.empty() && !c.answer.parseable();
                    }
                    if (all_failed) {
                        r.flags.emplace_back("all_failed");
                    }
                } else {
                    Prompt prompt;
                    try {
                        prompt = build_prompt(method, data, inst, cfg_.sampling.max_context_tokens);
                    } catch (const ContextOverflowError& e) {
                        r.aggregate.answer = Answer::unparseable(spec.answer_kind, spec.unit);
                        r.flags.emplace_back("context_overflow:" + e.block());
                        return;
                    }
                    const auto text = prompt.text();
                    if (dry_run) {
                        std::lock_guard lock(dry_mutex);
                        *dry_out << dry_run_banner(method, n, inst) << text << '\n';
                        return;
                    }
                    const auto outcomes = sample(text, cfg_.sampling, *transport, tag);
                    std::vector<Answer> parsed;
                    bool all_failed = true;
                    for (std::size_t s = 0; s < outcomes.size(); ++s) {
                        const auto& o = outcomes[s];
                        parsed.push_back(o.text ? parse_answer(*o.text, spec)
                                                : Answer::unparseable(spec.answer_kind, spec.unit));
                        auto j = trace_base("answer", s);
                        j["prompt_digest"] = prompt_digest(text);
                        j["response"] = o.text.value_or("");
                        j["error"] = o.error;
                        j["attempts"] = o.attempts;
                        j["answer"] = payload_string(parsed.back());
                        r.trace.push_back(std::move(j));
                        r.requests += static_cast<std::size_t>(o.attempts);
                        all_failed = all_failed && !o.text;
                    }
                    r.aggregate = aggregate(parsed, spec.answer_kind, spec.unit, spec.numeric_tolerance());
                    if (all_failed) {
                        r.flags.emplace_back("all_failed");
                    }
                }
                if (r.aggregate.tie) {
                    r.flags.emplace_back("tie");
                }
                if (r.aggregate.parseable == 0) {
                    r.flags.emplace_back("unparseable");
                }
            });
            if (!dry_run) {
                for (std::size_t i = 0; i < plan.size(); ++i) {
                    const auto& r = results[i];
                    answers.add({std::string{to_string(method)}, std::to_string(n), plan[i].spec.id,
                                 bindings_key(plan[i].bindings), payload_string(r.aggregate.answer),
                                 std::to_string(r.aggregate.parseable), text::join(r.flags, ";")});
                    for (const auto& j : r.trace) {
                        responses += j.dump();
                        responses += '\n';
                    }
                    summary.requests += r.requests;
                    summary.flagged += r.flags.empty() ? 0 : 1;
                }
            }
            summary.instances += plan.size();
            timings.emplace_back(std::string{to_string(method)} + "_size_" + std::to_string(n), watch.lap_ms());
        }
    }
    if (dry_run) {
        return summary;
    }
    answers.write(layout_.answers());
    text::write_file(layout_.responses(), responses);
    std::vector<std::pair<std::string, std::string>> notes{{"transport", transport == owned.get()
                                                                             ? cfg_.transport_mode
                                                                             : std::string{"injected"}}};
    if (!cfg_.archive.empty() && std::filesystem::exists(cfg_.archive)) {
        notes.emplace_back("archive_digest", sha256_file(cfg_.archive));
    }
    append_ledger("run", {layout_.plan(), cfg_.archive}, {layout_.answers(), layout_.responses()}, timings, notes);
    return summary;
}

void Pipeline::score() {
    require(layout_.ground_truth(), "ground-truth");
    require(layout_.answers(), "run");
    const auto gt = csv::Table::read(layout_.ground_truth());
    const auto g_n = gt.require("dataset_size");
    const auto g_q = gt.require("query_id");
    const auto g_b = gt.require("bindings");
    const auto g_tol = gt.require("tolerance");
    const auto g_p = gt.require("payload");
    std::map<std::string, Answer> truth_answers;
    for (const auto& row : gt.rows()) {
        const auto& spec = catalog_.at(row.at(g_q));
        const auto n = static_cast<std::size_t>(text::parse_int(row.at(g_n)).value_or(0));
        truth_answers.emplace(instance_key(n, spec.id, row.at(g_b)),
                              parse_payload(spec.answer_kind, spec.unit,
                                            text::parse_double(row.at(g_tol)).value_or(0.0), row.at(g_p)));
    }

    const auto ans = csv::Table::read(layout_.answers());
    const auto a_m = ans.require("method");
    const auto a_n = ans.require("dataset_size");
    const auto a_q = ans.require("query_id");
    const auto a_b = ans.require("bindings");
    const auto a_p = ans.require("payload");
    std::map<std::tuple<int, std::size_t, int>, ScoreRow> rows;
    csv::Writer detail({"method", "dataset_size", "query_id", "bindings", "predicted", "truth", "outcome"});
    for (const auto& row : ans.rows()) {
        const auto method = parse_method(row.at(a_m));
        if (!method) {
            throw DataError(layout_.answers().string() + ": unknown method '" + row.at(a_m) + "'");
        }
        const auto& spec = catalog_.at(row.at(a_q));
        const auto n = static_cast<std::size_t>(text::parse_int(row.at(a_n)).value_or(0));
        const auto it = truth_answers.find(instance_key(n, spec.id, row.at(a_b)));
        if (it == truth_answers.end()) {
            throw DataError("no ground truth for " + spec.id + " " + row.at(a_b) + " at size " + std::to_string(n) +
                            "; re-run the ground-truth stage");
        }
        const auto predicted = parse_payload(spec.answer_kind, spec.unit, spec.numeric_tolerance(), row.at(a_p));
        const int outcome = match(predicted, it->second);
        auto& sr = rows[{static_cast<int>(*method), n, spec.number()}];
        sr.method = *method;
        sr.query_id = spec.id;
        sr.category = spec.category;
        sr.dataset_size = n;
        sr.detail.push_back({row.at(a_b), row.at(a_p), payload_string(it->second), outcome});
        detail.add({row.at(a_m), std::to_string(n), spec.id, row.at(a_b), row.at(a_p), payload_string(it->second),
                    std::to_string(outcome)});
    }
    csv::Writer scores({"method", "query_id", "category", "dataset_size", "score", "probes", "correct"});
    for (auto& [key, sr] : rows) {
        std::vector<int> outcomes;
        for (const auto& d : sr.detail) {
            outcomes.push_back(d.outcome);
        }
        sr.score = score_query(outcomes);
        scores.add({std::string{to_string(sr.method)}, sr.query_id, std::string{to_string(sr.category)},
                    std::to_string(sr.dataset_size), text::fixed(sr.score, 4), std::to_string(outcomes.size()),
                    std::to_string(std::count(outcomes.begin(), outcomes.end(), 1))});
    }
    scores.write(layout_.scores());
    detail.write(layout_.score_detail());
    append_ledger("score", {layout_.ground_truth(), layout_.answers()}, {layout_.scores(), layout_.score_detail()},
                  {});
}

std::size_t Pipeline::report() {
    require(layout_.score_detail(), "score");
    const auto table = csv::Table::read(layout_.score_detail());
    const auto c_m = table.require("method");
    const auto c_n = table.require("dataset_size");
    const auto c_q = table.require("query_id");
    const auto c_b = table.require("bindings");
    const auto c_p = table.require("predicted");
    const auto c_t = table.require("truth");
    const auto c_o = table.require("outcome");
    std::map<std::tuple<int, std::size_t, int>, ScoreRow> rows;
    for (const auto& row : table.rows()) {
        const auto method = parse_method(row.at(c_m));
        if (!method) {
            throw DataError(layout_.score_detail().string() + ": unknown method '" + row.at(c_m) + "'");
        }
        const auto& spec = catalog_.at(row.at(c_q));
        const auto n = static_cast<std::size_t>(text::parse_int(row.at(c_n)).value_or(0));
        auto& sr = rows[{static_cast<int>(*method), n, spec.number()}];
        sr.method = *method;
        sr.query_id = spec.id;
        sr.category = spec.category;
        sr.dataset_size = n;
        sr.detail.push_back({row.at(c_b), row.at(c_p), row.at(c_t), row.at(c_o) == "1" ? 1 : 0});
    }
    std::vector<ScoreRow> flat;
    for (auto& [k, v] : rows) {
        flat.push_back(std::move(v));
    }
    const auto rep = build_report(flat, catalog_.specs(), cfg_.methods, cfg_.sizes, cfg_.effective_run_id());
    write_report(rep, layout_.report());
    std::vector<std::filesystem::path> outputs;
    for (const auto& [name, body] : rep.files) {
        outputs.push_back(layout_.report() / name);
    }
    append_ledger("report", {layout_.score_detail()}, outputs, {},
                  {{"gaps", std::to_string(rep.gaps.size())}});
    return rep.gaps.size();
}

} // namespace aisbench
