#include "aisbench/answer.hpp"

#include "aisbench/error.hpp"
#include "aisbench/text.hpp"

#include <cctype>

namespace aisbench {
namespace {

constexpr std::string_view kUnparseableMarker = "<unparseable>";
constexpr std::string_view kUnknownMarker = "<unknown>";

} // namespace

std::string canonical_text(std::string_view s) {
    std::string out;
    bool space = false;
    for (const unsigned char c : text::trim(s)) {
        if (std::isspace(c)) {
            space = true;
            continue;
        }
        if (space && !out.empty()) {
            out.push_back(' ');
        }
        space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    while (!out.empty() && (out.back() == '.' || out.back() == '"' || out.back() == '\'')) {
        out.pop_back();
    }
    while (!out.empty() && (out.front() == '"' || out.front() == '\'')) {
        out.erase(0, 1);
    }
    return out;
}

std::string_view to_string(AnswerKind kind) {
    switch (kind) {
    case AnswerKind::numeric: return "numeric";
    case AnswerKind::text: return "text";
    case AnswerKind::entity_set: return "entity_set";
    case AnswerKind::boolean: return "boolean";
    case AnswerKind::location: return "location";
    }
    return "text";
}

std::optional<AnswerKind> parse_answer_kind(std::string_view s) {
    for (const auto k : {AnswerKind::numeric, AnswerKind::text, AnswerKind::entity_set,
                         AnswerKind::boolean, AnswerKind::location}) {
        if (to_string(k) == text::trim(s)) {
            return k;
        }
    }
    return std::nullopt;
}

Answer Answer::number(double v, std::string unit, double tolerance) {
    return {AnswerKind::numeric, v, std::move(unit), tolerance};
}
Answer Answer::label(std::string v) { return {AnswerKind::text, std::move(v), {}, 0.0}; }
Answer Answer::entities(EntitySet v, std::string element_kind) {
    return {AnswerKind::entity_set, std::move(v), std::move(element_kind), 0.0};
}
Answer Answer::flag(bool v) { return {AnswerKind::boolean, v, {}, 0.0}; }
Answer Answer::location(GeoPoint p) { return {AnswerKind::location, p, {}, 0.0}; }
Answer Answer::unparseable(AnswerKind kind, std::string unit) {
    return {kind, Unparseable{}, std::move(unit), 0.0};
}
Answer Answer::unknown_value(AnswerKind kind, std::string unit) {
    return {kind, Unknown{}, std::move(unit), 0.0};
}

std::string payload_string(const Answer& a) {
    struct Visitor {
        std::string operator()(const Unparseable&) const { return std::string{kUnparseableMarker}; }
        std::string operator()(const Unknown&) const { return std::string{kUnknownMarker}; }
        std::string operator()(double v) const { return text::shortest(v); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(const EntitySet& s) const {
            return text::join(std::vector<std::string>(s.begin(), s.end()), ";");
        }
        std::string operator()(bool b) const { return b ? "yes" : "no"; }
        std::string operator()(const GeoPoint& p) const {
            return text::shortest(p.latitude) + " " + text::shortest(p.longitude);
        }
    };
    return std::visit(Visitor{}, a.value);
}

Answer parse_payload(AnswerKind kind, const std::string& unit, double tolerance, std::string_view payload) {
    Answer a{kind, Unparseable{}, unit, tolerance};
    if (payload == kUnparseableMarker) {
        return a;
    }
    if (payload == kUnknownMarker) {
        a.value = Unknown{};
        return a;
    }
    auto bad = [&]() {
        return DataError("malformed " + std::string{to_string(kind)} + " payload '" + std::string{payload} + "'");
    };
    switch (kind) {
    case AnswerKind::numeric: {
        const auto v = text::parse_double(payload);
        if (!v) throw bad();
        a.value = *v;
        break;
    }
    case AnswerKind::text:
        a.value = std::string{payload};
        break;
    case AnswerKind::entity_set: {
        EntitySet s;
        if (!payload.empty()) {
            for (auto& e : text::split(payload, ';')) {
                s.insert(std::string{text::trim(e)});
            }
        }
        a.value = std::move(s);
        break;
    }
    case AnswerKind::boolean:
        if (payload == "yes") a.value = true;
        else if (payload == "no") a.value = false;
        else throw bad();
        break;
    case AnswerKind::location: {
        const auto parts = text::split(payload, ' ');
        if (parts.size() != 2) throw bad();
        const auto lat = text::parse_double(parts[0]);
        const auto lon = text::parse_double(parts[1]);
        if (!lat || !lon) throw bad();
        a.value = GeoPoint{*lat, *lon};
        break;
    }
    }
    return a;
}

std::string canonical_key(const Answer& a) {
    if (const auto* s = std::get_if<std::string>(&a.value)) {
        return "t:" + canonical_text(*s);
    }
    if (const auto* p = std::get_if<GeoPoint>(&a.value)) {
        return "l:" + text::fixed(p->latitude, 3) + "," + text::fixed(p->longitude, 3);
    }
    return std::string{to_string(a.kind)}.substr(0, 1) + ":" + payload_string(a);
}

std::string pair_id(std::string_view a, std::string_view b) {
    return a < b ? std::string{a} + "-" + std::string{b} : std::string{b} + "-" + std::string{a};
}

std::string group_id(const std::set<std::string>& members) {
    return text::join(std::vector<std::string>(members.begin(), members.end()), "+");
}

} // namespace aisbench
