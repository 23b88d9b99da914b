#pragma once

#include "aisbench/answer.hpp"
#include "aisbench/catalog.hpp"
#include "aisbench/ingest.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aisbench {

struct SegmentationConfig {
    double moving_sog_threshold = 0.1;     ///< kn, Q11
    double anchorage_sog_threshold = 0.5;  ///< kn
    int anchorage_min_duration = 30;       ///< min
    double port_radius = kDefaultPortRadiusMeters;
    double proximity_threshold = 500.0;    ///< m, Q15
    double collision_distance = 300.0;     ///< m, Q25-style risk
    double collision_relative_speed = 1.0; ///< kn, both vessels must exceed it
    int min_port_dwell = 10;               ///< min; shorter visits are sail-bys
    int sample_period = kResamplePeriodMinutes;
};

/// Canal limits used for the Suez feasibility question.
inline constexpr double kSuezMaxBeamMeters = 77.5;    // SCA rules for 66 ft draught
inline constexpr double kSuezMaxDraughtMeters = 20.1; // 66 ft

/// Fixed constants of the catalog's parameter-free questions.
inline constexpr int kFuelWindowStartMinute = 15 * 60;
inline constexpr int kFuelWindowEndMinute = 16 * 60;
inline constexpr std::string_view kTripOriginPort = "Skagen";
inline constexpr std::string_view kTripDestinationPort = "Aarhus";

struct PortVisit {
    std::string port;
    std::size_t first = 0; ///< index of the first record inside the radius
    std::size_t last = 0;  ///< index of the last one
    int enter_minute = 0;
    int exit_minute = 0;

    [[nodiscard]] int duration() const { return exit_minute - enter_minute; }
    friend bool operator==(const PortVisit&, const PortVisit&) = default;
};

/// Maximal runs of records within a port's approach radius (nearest port
/// wins). Runs at the same port less than `min_port_dwell` apart are merged;
/// runs shorter than `min_port_dwell` are then discarded.
std::vector<PortVisit> detect_port_visits(std::span<const DynamicRecord> records, std::span<const Port> ports,
                                          const SegmentationConfig& cfg);

enum class EpisodeKind { move, stop };

struct Episode {
    EpisodeKind kind = EpisodeKind::move;
    std::size_t first = 0;
    std::size_t last = 0;
    int start_minute = 0;
    int end_minute = 0;

    [[nodiscard]] int duration() const { return end_minute - start_minute; }
    friend bool operator==(const Episode&, const Episode&) = default;
};

/// Partitions the records into stop episodes (sog below the anchorage
/// threshold for at least the minimum duration) and the move episodes
/// between them.
std::vector<Episode> segment_stops(std::span<const DynamicRecord> records, const SegmentationConfig& cfg);

/// A passage between two consecutive visits at different ports.
struct Leg {
    std::string from;
    std::string to;
    int depart_minute = 0;
    int arrive_minute = 0;
    double distance = 0.0; ///< m along the track
};

std::vector<Leg> port_legs(std::span<const DynamicRecord> records, std::span<const PortVisit> visits);

/// Hand-labelled answers for queries whose truth needs judgement.
class ExpertLabels {
public:
    struct Entry {
        std::string payload;
        std::string note;
    };

    static ExpertLabels load(const std::filesystem::path& path);
    void set(const std::string& query_id, std::size_t dataset_size, Entry entry);
    [[nodiscard]] const Entry* find(const std::string& query_id, std::size_t dataset_size) const;
    [[nodiscard]] std::string to_csv() const;

private:
    std::map<std::pair<std::string, std::size_t>, Entry> entries_;
};

struct FerryCrossCheck {
    Mmsi mmsi;
    bool expert = false;
    bool heuristic = false;
};

/// Ground truth over one dataset subset. Per-vessel port visits and stop
/// episodes are computed once at construction.
class Oracle {
public:
    Oracle(const DatasetBundle& bundle, SegmentationConfig cfg, const ExpertLabels* labels = nullptr);

    /// Throws DataError for an expert-fixture query without a label.
    [[nodiscard]] Answer answer(const QueryInstance& instance) const;
    [[nodiscard]] bool applicable(const QuerySpec& spec, Mmsi vessel) const;

    [[nodiscard]] const std::vector<PortVisit>& visits(Mmsi vessel) const;
    [[nodiscard]] const std::vector<Episode>& episodes(Mmsi vessel) const;
    [[nodiscard]] std::vector<Episode> anchorage_episodes(Mmsi vessel) const;
    /// The vessel's two most visited ports; empty when fewer than two.
    [[nodiscard]] std::vector<std::string> terminal_ports(Mmsi vessel) const;
    [[nodiscard]] int round_trips(Mmsi vessel) const;
    /// Ferry heuristic: at least two round trips between the same two ports.
    [[nodiscard]] bool looks_like_ferry(Mmsi vessel) const;
    /// Expert Q17 labels against the heuristic, one row per vessel where
    /// either side says ferry.
    [[nodiscard]] std::vector<FerryCrossCheck> ferry_cross_check(const std::string& query_id) const;

private:
    struct VesselState {
        std::vector<PortVisit> visits;
        std::vector<Episode> episodes;
        std::vector<Leg> legs;
    };

    const Trajectory& trajectory(Mmsi vessel) const;
    const ShipStatic& ship(Mmsi vessel) const;
    bool near_any_port(const GeoPoint& p) const;
    Answer expert(const QueryInstance& instance) const;
    Answer vessel_answer(const QueryInstance& instance, Mmsi vessel) const;
    Answer global_answer(const QueryInstance& instance) const;

    const DatasetBundle& bundle_;
    SegmentationConfig cfg_;
    const ExpertLabels* labels_;
    std::unordered_map<Mmsi, VesselState> state_;
};

} // namespace aisbench
