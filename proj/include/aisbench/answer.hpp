#pragma once

#include "aisbench/geo.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace aisbench {

enum class AnswerKind { numeric, text, entity_set, boolean, location };

std::string_view to_string(AnswerKind kind);
std::optional<AnswerKind> parse_answer_kind(std::string_view s);

/// Response text that yielded nothing usable. Never matches anything.
struct Unparseable {
    friend bool operator==(const Unparseable&, const Unparseable&) = default;
};
/// The data does not determine an answer (e.g. no emissions record).
struct Unknown {
    friend bool operator==(const Unknown&, const Unknown&) = default;
};

/// Canonical identifiers: "219000001" for vessels, "219000001-219000002"
/// for pairs (smaller first), "a+b+c" for groups (sorted).
using EntitySet = std::set<std::string>;

/// A typed answer. For entity sets `unit` names the element kind
/// ("mmsi", "pair", "group"); for numbers it is the unit symbol.
struct Answer {
    using Payload = std::variant<Unparseable, Unknown, double, std::string, EntitySet, bool, GeoPoint>;

    AnswerKind kind = AnswerKind::text;
    Payload value = Unparseable{};
    std::string unit;
    double tolerance = 0.0; ///< relative, numeric answers only

    [[nodiscard]] bool parseable() const { return !std::holds_alternative<Unparseable>(value); }
    [[nodiscard]] bool unknown() const { return std::holds_alternative<Unknown>(value); }

    static Answer number(double v, std::string unit, double tolerance = 0.0);
    static Answer label(std::string v);
    static Answer entities(EntitySet v, std::string element_kind);
    static Answer flag(bool v);
    static Answer location(GeoPoint p);
    static Answer unparseable(AnswerKind kind, std::string unit = {});
    static Answer unknown_value(AnswerKind kind, std::string unit = {});

    friend bool operator==(const Answer&, const Answer&) = default;
};

/// Stable text form used in ground_truth.csv and answers.csv.
std::string payload_string(const Answer& a);
/// Inverse of payload_string for the given kind/unit.
Answer parse_payload(AnswerKind kind, const std::string& unit, double tolerance, std::string_view payload);

/// Lower-cased, whitespace-collapsed text with surrounding quotes and a
/// trailing full stop removed.
std::string canonical_text(std::string_view s);

/// Key under which two answers count as the same vote.
std::string canonical_key(const Answer& a);

std::string pair_id(std::string_view a, std::string_view b);
std::string group_id(const std::set<std::string>& members);

} // namespace aisbench
