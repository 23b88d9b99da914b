#pragma once

#include "aisbench/catalog.hpp"
#include "aisbench/llm.hpp"
#include "aisbench/sql_backend.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aisbench {

/// Table descriptions, dialect notes and a few rows per table, rendered
/// verbatim into the generation prompt.
struct SchemaCard {
    std::string text;

    /// Sample rows are read back from the loaded backend.
    static SchemaCard describe(const SqlBackend& backend, std::size_t sample_rows = 3);
};

/// The SQL inside the first ```sql fence, else the first fenced block that
/// starts with SELECT or WITH, else the longest SELECT/WITH span.
std::optional<std::string> extract_sql(std::string_view response);

struct SqlExchange {
    std::string generated_sql;
    bool ok = false;
    std::string error;
    std::string result_rows; ///< aligned text, capped
    bool truncated = false;
    std::string interpretation;
};

/// Column-aligned rendering, header first, cells separated by " | ".
std::string render_rows(const SqlResult& result);

/// Never throws for bad SQL; the failure lands in the exchange.
SqlExchange execute_sql(std::string_view sql, const SqlBackend& backend, const SqlLimits& limits);

std::string generation_prompt(const QueryInstance& instance, const SchemaCard& schema);
std::string regeneration_prompt(const QueryInstance& instance, const SchemaCard& schema, const SqlExchange& failed);
std::string interpretation_prompt(const QueryInstance& instance, const SqlExchange& exchange);

struct NlidbCandidate {
    SqlExchange exchange;
    bool regenerated = false;
    Answer answer;
    std::string failure; ///< transport or extraction failure, empty otherwise
};

struct NlidbResult {
    std::vector<NlidbCandidate> candidates;
    Aggregate aggregate;
};

/// Generate one SQL candidate per sample, execute it (regenerating once on
/// error), have the model interpret each result, then aggregate.
NlidbResult run_nlidb(const QueryInstance& instance, const SchemaCard& schema, const SqlBackend& backend,
                      Transport& transport, const SamplingConfig& cfg, const SqlLimits& limits, RequestTag tag);

} // namespace aisbench
