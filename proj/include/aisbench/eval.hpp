#pragma once

#include "aisbench/answer.hpp"
#include "aisbench/catalog.hpp"
#include "aisbench/llm.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace aisbench {

struct MatchConfig {
    double set_threshold = 1.0;      ///< Jaccard; 1 means exact
    double location_radius = 1000.0; ///< m
};

/// Smallest magnitude the relative tolerance is applied to, per unit.
double absolute_floor(const std::string& unit);

/// 1 when `predicted` counts as `truth`, else 0. Unparseable never matches;
/// Unknown matches only Unknown.
int match(const Answer& predicted, const Answer& truth, const MatchConfig& cfg = {});

double score_query(std::span<const int> outcomes);

struct ProbeOutcome {
    std::string bindings;
    std::string predicted;
    std::string truth;
    int outcome = 0;
};

struct ScoreRow {
    Method method = Method::zsa1;
    std::string query_id;
    Category category = Category::attribute;
    std::size_t dataset_size = 0;
    double score = 0.0;
    std::vector<ProbeOutcome> detail;
};

/// Category file names: attribute, individual-trajectory, ship-interaction, fusion.
std::string_view report_name(Category c);

struct Report {
    std::map<std::string, std::string> files; ///< file name -> contents
    std::vector<std::string> gaps;            ///< "<method> size <n>: missing Q.."
};

/// Means over each (method, size) cell, recomputed from the probe details.
/// Cells missing queries are averaged over what is there and listed as gaps.
Report build_report(const std::vector<ScoreRow>& rows, const std::vector<QuerySpec>& specs,
                    const std::vector<Method>& methods, const std::vector<std::size_t>& sizes,
                    const std::string& run_id);

/// Writes the report files (and gaps.txt when there are gaps) into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

} // namespace aisbench
