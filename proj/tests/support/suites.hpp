#pragma once

#include "aisbench/answer.hpp"
#include "aisbench/catalog.hpp"
#include "aisbench/ingest.hpp"
#include "aisbench/oracle.hpp"

#include <filesystem>
#include <string>
#include <vector>

// Check suites shared by the unit tests and the acceptance runner. Each
// returns a verdict plus human-readable failures.
namespace aisbench::testing {

struct Verdict {
    bool ok = true;
    std::vector<std::string> failures;
    std::string summary;

    void fail(std::string why) {
        ok = false;
        failures.push_back(std::move(why));
    }
};

/// Meters covered by `degrees` of latitude along a meridian.
double meridian_meters(double degrees);

inline constexpr std::uint32_t kFerry = 219000001;
inline constexpr std::uint32_t kAnchored = 219000002;
inline constexpr std::uint32_t kMoored = 219000003;
inline constexpr std::uint32_t kCrossingNorth = 219000004;
inline constexpr std::uint32_t kCrossingSouth = 219000005;
inline constexpr std::uint32_t kEvening = 219000006;
inline constexpr std::uint32_t kMooredNeighbour = 219000007;

/// Seven hand-built vessels whose tracks run along meridians, so every
/// distance has a closed form.
DatasetBundle oracle_fixture_bundle();
ExpertLabels oracle_fixture_labels();

struct OracleCase {
    QueryInstance instance;
    Answer expected;
};
/// Instances with analytically derived answers, at least one per query.
std::vector<OracleCase> oracle_fixture_cases(const Catalog& catalog);

/// Runs the oracle over the constructed fixture; ok when every case matches
/// within tolerance and at least `min_queries` distinct queries are covered.
Verdict oracle_suite(const Catalog& catalog, std::size_t min_queries = 20);

/// Seeded random trajectories with `lo`..`hi` points.
std::vector<std::vector<DynamicRecord>> random_trajectories(std::size_t count, std::size_t lo, std::size_t hi,
                                                            std::uint64_t seed);
/// Deviation bound, straight-line collapse, and epsilon monotonicity.
Verdict tdtr_suite(std::size_t trajectories = 100);

/// Distance conservation, border oscillation, and tiling over `zones`.
Verdict semantic_suite_with(const std::vector<Zone>& zones);

/// Median and mode against brute-force definitions on every sequence of
/// length 1..4 over three symbols.
Verdict aggregation_suite();

/// Adversarial statements a model might emit.
std::vector<std::string> sql_safety_corpus();
/// Every corpus entry must fail without changing the database.
Verdict sql_safety_suite(const std::filesystem::path& scratch_dir);

/// Standalone 9-digit numbers: candidate MMSIs.
std::vector<std::string> nine_digit_tokens(std::string_view text);

} // namespace aisbench::testing
