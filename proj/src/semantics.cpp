#include "aisbench/semantics.hpp"

#include "aisbench/error.hpp"
#include "aisbench/text.hpp"

namespace aisbench {
namespace {

constexpr int kOpenWaterIndex = -1;

int resolve_zone(const GeoPoint& p, int current, const SemanticConfig& cfg) {
    int candidate = kOpenWaterIndex;
    for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
        if (distance_to_zone(p, cfg.zones[i]) <= cfg.buffer) {
            candidate = static_cast<int>(i);
            break;
        }
    }
    if (candidate == current || current == kOpenWaterIndex) {
        return candidate;
    }
    const bool inside_candidate =
        candidate != kOpenWaterIndex && cfg.zones[static_cast<std::size_t>(candidate)].bounds.contains(p);
    const bool near_current =
        distance_to_zone(p, cfg.zones[static_cast<std::size_t>(current)]) <= cfg.buffer;
    return near_current && !inside_candidate ? current : candidate;
}

std::string zone_name(int index, const SemanticConfig& cfg) {
    return index == kOpenWaterIndex ? std::string{kOpenWater}
                                    : cfg.zones[static_cast<std::size_t>(index)].name;
}

} // namespace

std::vector<SemanticEvent> to_semantic_events(std::span<const DynamicRecord> records,
                                              const SemanticConfig& cfg) {
    if (cfg.buffer < 0.0) {
        throw ConfigError("semantic buffer must be non-negative");
    }
    std::vector<SemanticEvent> events;
    if (records.empty()) {
        return events;
    }
    int current = resolve_zone(records.front().position(), kOpenWaterIndex, cfg);
    int enter = records.front().minute;
    double distance = 0.0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto p = records[i].position();
        distance += great_circle_distance(records[i - 1].position(), p);
        const int zone = resolve_zone(p, current, cfg);
        if (zone != current) {
            events.push_back({zone_name(current, cfg), enter, records[i].minute, distance});
            current = zone;
            enter = records[i].minute;
            distance = 0.0;
        }
    }
    events.push_back({zone_name(current, cfg), enter, records.back().minute, distance});
    return events;
}

std::string render_events(std::span<const SemanticEvent> events, const ShipStatic& ship) {
    std::string out = "Ship " + ship.mmsi.str();
    if (!ship.name.empty()) {
        out += " (" + ship.name + ")";
    }
    out += ":\n";
    for (const auto& e : events) {
        out += text::hhmm(e.enter_minute);
        out += "–";
        out += text::hhmm(e.exit_minute);
        out += ": in ";
        out += e.zone_name;
        out += ", traveled ";
        out += text::fixed(e.distance / 1000.0, 2);
        out += " km over ";
        out += std::to_string(e.duration());
        out += " min\n";
    }
    return out;
}

} // namespace aisbench
