#pragma once

#include "aisbench/catalog.hpp"
#include "aisbench/ingest.hpp"
#include "aisbench/oracle.hpp"
#include "aisbench/pipeline.hpp"
#include "aisbench/transport.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

/// Deterministic synthetic day of Danish AIS traffic, plus the scripted
/// model whose recorded answers make up the replay archive.
namespace aisbench::fixture {

inline constexpr std::uint64_t kFixtureSeed = 20241120;
inline constexpr std::size_t kFleetSize = 300;
inline constexpr std::string_view kRawFileName = "ais_20241120.csv";
inline constexpr std::string_view kScriptedModelId = "scripted-fixture-v1";

/// role: ferry | trader | moored | anchored | convoy | near_miss | transit | cargo
struct FleetMember {
    Mmsi mmsi;
    std::string role;
    std::string group; ///< convoy id, ferry route, or crossing id; empty otherwise
};

struct Generated {
    std::filesystem::path raw;
    std::filesystem::path emissions;
    std::filesystem::path manifest;
    std::vector<FleetMember> fleet;
    std::size_t invalid_rows = 0;
};

/// Writes the raw AIS export, the emissions table and fleet.csv into `out_dir`.
Generated generate(const std::filesystem::path& ports_csv, const std::filesystem::path& out_dir,
                   std::uint64_t seed = kFixtureSeed);

std::vector<FleetMember> load_manifest(const std::filesystem::path& path);

/// Convoy groups (Q16) and ferries (Q17) restricted to each subset.
ExpertLabels expert_labels(const std::vector<FleetMember>& fleet,
                           const std::map<std::size_t, std::vector<Mmsi>>& subsets);

/// Subset membership per size, from subsets.csv.
std::map<std::size_t, std::vector<Mmsi>> read_subsets(const std::filesystem::path& subsets_csv,
                                                      const std::vector<std::size_t>& sizes);

/// Run configuration for the fixture, with absolute paths.
std::string fixture_config(const std::filesystem::path& data_dir, const std::filesystem::path& fixture_dir);

/// Chance that a ZSA method answers an instance correctly at `size`;
/// non-increasing in size.
double zsa_accuracy(std::string_view method, std::size_t size);

/// Whether the scripted model gets this ZSA instance right.
bool zsa_intends_correct(std::string_view method, const std::string& query_id, const std::string& bindings,
                         std::size_t size);

/// The canned SQL the scripted model writes for a query, with [MMSI] bound.
std::string canned_sql(const std::string& query_id, const std::string& bindings);
/// Queries whose canned SQL computes the right answer.
bool nlidb_intends_correct(const std::string& query_id);

/// Scored outcomes that differ from what the scripted model intended.
std::vector<std::string> intent_mismatches(const Layout& layout);

/// Plays the model: answers from ground truth (right or wrong by design)
/// for ZSA prompts, canned SQL and result echoing for NLIDB.
class ScriptedModel {
public:
    /// Reads ground_truth.csv and subset variants from the run's layout.
    ScriptedModel(const Catalog& catalog, const Layout& layout, const std::vector<std::size_t>& sizes);
    std::string respond(const ChatRequest& request) const;

private:
    std::string zsa_response(const ChatRequest& request) const;
    std::string interpret_response(const ChatRequest& request) const;

    const Catalog& catalog_;
    std::map<std::string, std::string> truth_; ///< "size|query|bindings" -> payload
    std::map<std::size_t, std::vector<std::string>> vessels_;
};

} // namespace aisbench::fixture
