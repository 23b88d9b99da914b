#pragma once

#include "aisbench/answer.hpp"
#include "aisbench/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aisbench {

enum class Category { attribute, individual_trajectory, interaction, data_fusion };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

enum class OracleMode { computed, expert_fixture };

inline constexpr std::string_view kMmsiPlaceholder = "MMSI";

/// Relative tolerance applied to numeric answers whose catalog entry leaves
/// the column empty.
inline constexpr double kDefaultNumericTolerance = 0.05;

struct QuerySpec {
    std::string id; ///< "Q1" … "Q27"
    Category category = Category::attribute;
    std::string template_text;
    AnswerKind answer_kind = AnswerKind::text;
    std::string unit;
    OracleMode oracle_mode = OracleMode::computed;
    /// Which vessels may be bound to [MMSI]. Harness-defined:
    /// any | imo | emissions | dimensions | moving | ferry | anchorage | aarhus_skagen
    std::string applicability = "any";
    std::optional<double> tolerance;

    [[nodiscard]] int number() const;
    /// Placeholder names in template order, without brackets.
    [[nodiscard]] std::vector<std::string> placeholders() const;
    [[nodiscard]] bool parameterized() const { return !placeholders().empty(); }
    [[nodiscard]] double numeric_tolerance() const {
        return tolerance.value_or(kDefaultNumericTolerance);
    }

    friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

using Bindings = std::map<std::string, std::string>;

/// "MMSI=219000001" (sorted by name, ';'-separated); empty for no bindings.
std::string bindings_key(const Bindings& b);
Bindings parse_bindings(std::string_view key);

struct QueryInstance {
    QuerySpec spec;
    Bindings bindings;
    std::size_t dataset_size = 0;

    /// The natural-language question with every placeholder substituted.
    [[nodiscard]] std::string question() const;
    [[nodiscard]] std::optional<Mmsi> probe() const;
};

/// Throws ConfigError naming the first placeholder left unbound.
QueryInstance instantiate(const QuerySpec& spec, Bindings bindings, std::size_t dataset_size = 0);

class Catalog {
public:
    static Catalog load(const std::filesystem::path& path);
    static Catalog parse(std::string_view csv_text, const std::string& source = "queries.csv");

    [[nodiscard]] const std::vector<QuerySpec>& specs() const { return specs_; }
    [[nodiscard]] const QuerySpec& at(std::string_view id) const;
    [[nodiscard]] std::string to_csv() const;

private:
    std::vector<QuerySpec> specs_;
};

/// True when `vessel` may be bound to a parameterized spec.
using ApplicabilityFn = std::function<bool(const QuerySpec&, Mmsi)>;

/// Probe instances: for each parameterized spec, up to k distinct applicable
/// vessels drawn with a per-query seeded shuffle; one instance for every other
/// spec. Shortfalls are appended to `log`.
std::vector<QueryInstance> probe_plan(const std::vector<QuerySpec>& specs, const DatasetBundle& dataset,
                                      std::size_t k, std::uint64_t seed, const ApplicabilityFn& applicable,
                                      std::vector<std::string>* log = nullptr);

} // namespace aisbench
