#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aisbench {

struct DynamicRecord;

/// Spherical Earth radius used by every distance in the harness.
inline constexpr double kEarthRadiusMeters = 6'371'000.0;
inline constexpr double kMetersPerNauticalMile = 1852.0;
inline constexpr double kKmhPerKnot = 1.852;

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

[[nodiscard]] bool is_valid(const GeoPoint& p);

struct LatLonBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;

    [[nodiscard]] bool contains(const GeoPoint& p) const {
        return p.latitude >= min_lat && p.latitude <= max_lat && p.longitude >= min_lon &&
               p.longitude <= max_lon;
    }
};

/// A named rectangle. Lower area_rank is assessed first.
struct Zone {
    std::string name;
    LatLonBox bounds;
    int area_rank = 0;
};

/// Haversine distance in meters.
[[nodiscard]] double great_circle_distance(const GeoPoint& a, const GeoPoint& b);

/// Sum of consecutive segment lengths; 0 for fewer than two records.
[[nodiscard]] double trajectory_length(std::span<const DynamicRecord> records);

/// 0 inside the rectangle, otherwise the great-circle distance to the
/// nearest boundary point. Parallel edges are reached at the point's own
/// longitude; meridian edges at the latitude that minimises the arc, clamped
/// to the edge.
[[nodiscard]] double distance_to_zone(const GeoPoint& p, const Zone& zone);

struct ClosestApproach {
    double meters = 0.0;
    int minute = 0; ///< earliest bucket at which the minimum occurs
};

/// Minimum distance over the time buckets both trajectories share.
/// std::nullopt means the trajectories never overlap in time.
[[nodiscard]] std::optional<ClosestApproach>
pairwise_min_distance(std::span<const DynamicRecord> a, std::span<const DynamicRecord> b);

/// Reads `name,min_lat,min_lon,max_lat,max_lon,area_rank` and returns zones
/// sorted by area_rank. Duplicate ranks or inverted bounds are DataErrors.
std::vector<Zone> load_zones(const std::filesystem::path& path);
std::string zones_csv(const std::vector<Zone>& zones);

} // namespace aisbench
