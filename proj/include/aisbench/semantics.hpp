#pragma once

#include "aisbench/geo.hpp"
#include "aisbench/ingest.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aisbench {

/// Pseudo-zone for positions that no zone claims.
inline constexpr std::string_view kOpenWater = "open water";

struct SemanticEvent {
    std::string zone_name;
    int enter_minute = 0;
    int exit_minute = 0;
    double distance = 0.0; ///< m travelled while attributed to this zone

    [[nodiscard]] int duration() const { return exit_minute - enter_minute; }
    friend bool operator==(const SemanticEvent&, const SemanticEvent&) = default;
};

struct SemanticConfig {
    std::vector<Zone> zones; ///< sorted by area_rank, smallest first
    double buffer = 500.0;   ///< m
};

/// Zone-transition events for one trajectory.
///
/// Each point takes the first zone, in area_rank order, whose distance is
/// within the buffer. When that differs from the zone the vessel is already
/// in, the vessel stays put as long as it is within the buffer of its current
/// zone and is not actually inside the newly matched one, so a track running
/// along a border does not flip back and forth. Containment always wins, which
/// keeps points inside nested zones in the smaller zone.
///
/// The segment leading to the first point of a new zone is counted in the
/// zone being left, and an event ends at the minute the next one starts.
[[nodiscard]] std::vector<SemanticEvent> to_semantic_events(std::span<const DynamicRecord> records,
                                                            const SemanticConfig& cfg);

/// Header line plus one line per event, e.g.
/// `10:05–10:40: in Aarhus Bay, traveled 12.41 km over 35 min`.
[[nodiscard]] std::string render_events(std::span<const SemanticEvent> events, const ShipStatic& ship);

} // namespace aisbench
