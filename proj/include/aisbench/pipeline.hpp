#pragma once

#include "aisbench/catalog.hpp"
#include "aisbench/compress.hpp"
#include "aisbench/eval.hpp"
#include "aisbench/llm.hpp"
#include "aisbench/oracle.hpp"
#include "aisbench/semantics.hpp"
#include "aisbench/sql_backend.hpp"
#include "aisbench/transport.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace aisbench {

struct RunConfig {
    std::filesystem::path raw_ais;
    std::filesystem::path emissions;
    std::filesystem::path ports;
    std::filesystem::path zones;
    std::filesystem::path queries;
    std::filesystem::path expert_labels;
    std::filesystem::path out = "out";

    std::vector<std::size_t> sizes{std::begin(kSweepSizes), std::end(kSweepSizes)};
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::uint64_t seed = 42;
    std::size_t probes_per_query = 5;
    std::string run_id; ///< defaults to "seed<seed>"

    SamplingConfig sampling;
    SegmentationConfig segmentation;
    CompressionConfig compression;
    double semantic_buffer = 500.0;

    std::string transport_mode = "replay"; ///< replay | live
    std::filesystem::path archive;
    HttpChatConfig http;

    std::string backend_url; ///< defaults to sqlite:<out>/backend
    SqlLimits sql_limits;

    /// Relative paths resolve against `base_dir`. Unknown keys are errors.
    static RunConfig parse(std::string_view json_text, const std::filesystem::path& base_dir);
    static RunConfig load(const std::filesystem::path& path);
    /// Throws ConfigError describing the first problem.
    void validate() const;
    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] std::string effective_run_id() const;
    [[nodiscard]] std::string effective_backend_url() const;
};

/// Parses "5,10,25" style lists.
std::vector<std::size_t> parse_size_list(std::string_view s);
std::vector<Method> parse_method_list(std::string_view s);

/// Stage artifact locations under the output directory.
struct Layout {
    std::filesystem::path root;

    [[nodiscard]] std::filesystem::path normalized() const { return root / "normalized"; }
    [[nodiscard]] std::filesystem::path variant(std::size_t n) const {
        return root / "variants" / ("size_" + std::to_string(n));
    }
    [[nodiscard]] std::filesystem::path subsets() const { return root / "subsets.csv"; }
    [[nodiscard]] std::filesystem::path plan() const { return root / "plan.csv"; }
    [[nodiscard]] std::filesystem::path ground_truth() const { return root / "ground_truth.csv"; }
    [[nodiscard]] std::filesystem::path ferry_crosscheck() const { return root / "ferry_crosscheck.csv"; }
    [[nodiscard]] std::filesystem::path responses() const { return root / "responses.jsonl"; }
    [[nodiscard]] std::filesystem::path answers() const { return root / "answers.csv"; }
    [[nodiscard]] std::filesystem::path scores() const { return root / "scores.csv"; }
    [[nodiscard]] std::filesystem::path score_detail() const { return root / "score_detail.csv"; }
    [[nodiscard]] std::filesystem::path report() const { return root / "report"; }
    [[nodiscard]] std::filesystem::path ledger() const { return root / "ledger.jsonl"; }
};

/// Vessels pinned into every subset so that probes stay identical across
/// sizes: a greedy cover of the applicability predicates, topped up from the
/// seeded order.
std::vector<Mmsi> choose_probe_pool(const DatasetBundle& bundle, const Oracle& oracle,
                                    const std::vector<QuerySpec>& specs, std::size_t pool_size, std::uint64_t seed,
                                    std::vector<std::string>* log = nullptr);

/// Event text for every vessel of `bundle`, in mmsi order.
std::string semantic_text(const DatasetBundle& bundle, const SemanticConfig& cfg);

struct RunSummary {
    std::size_t instances = 0;
    std::size_t requests = 0;
    std::size_t flagged = 0;
};

class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    void ingest();
    void ground_truth();
    /// Uses the configured transport unless `transport` is given. With
    /// `dry_run`, prompts go to `dry_out` and nothing is sent.
    RunSummary run(Transport* transport = nullptr, bool dry_run = false, std::ostream* dry_out = nullptr);
    void score();
    /// Returns the number of grid gaps.
    std::size_t report();

    [[nodiscard]] const RunConfig& config() const { return cfg_; }
    [[nodiscard]] const Layout& layout() const { return layout_; }

    /// The plan written by ingest.
    [[nodiscard]] std::vector<QueryInstance> load_plan() const;
    [[nodiscard]] DatasetBundle load_subset(std::size_t n) const;

private:
    void require(const std::filesystem::path& artifact, const char* stage) const;
    void append_ledger(const std::string& command, const std::vector<std::filesystem::path>& inputs,
                       const std::vector<std::filesystem::path>& outputs,
                       const std::vector<std::pair<std::string, double>>& timings_ms,
                       const std::vector<std::pair<std::string, std::string>>& notes = {}) const;

    RunConfig cfg_;
    Layout layout_;
    Catalog catalog_;
};

} // namespace aisbench
