#include "aisbench/geo.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/error.hpp"
#include "aisbench/ingest.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace aisbench {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double haversine(double lat1, double lon1, double lat2, double lon2) {
    const double p1 = lat1 * kDegToRad;
    const double p2 = lat2 * kDegToRad;
    const double dphi = p2 - p1;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2;
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

} // namespace

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.latitude) && std::isfinite(p.longitude) && p.latitude >= -90.0 &&
           p.latitude <= 90.0 && p.longitude >= -180.0 && p.longitude <= 180.0;
}

double great_circle_distance(const GeoPoint& a, const GeoPoint& b) {
    return haversine(a.latitude, a.longitude, b.latitude, b.longitude);
}

double trajectory_length(std::span<const DynamicRecord> records) {
    double total = 0.0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        total += great_circle_distance(records[i - 1].position(), records[i].position());
    }
    return total;
}

double distance_to_zone(const GeoPoint& p, const Zone& zone) {
    const auto& b = zone.bounds;
    if (b.contains(p)) {
        return 0.0;
    }
    if (p.longitude >= b.min_lon && p.longitude <= b.max_lon) {
        const double edge_lat = p.latitude > b.max_lat ? b.max_lat : b.min_lat;
        return great_circle_distance(p, {edge_lat, p.longitude});
    }
    const double edge_lon = p.longitude > b.max_lon ? b.max_lon : b.min_lon;
    const double dlambda = (p.longitude - edge_lon) * kDegToRad;
    // Foot of the perpendicular from p onto the meridian great circle.
    const double foot = std::atan2(std::tan(p.latitude * kDegToRad), std::cos(dlambda)) / kDegToRad;
    const double lat = std::clamp(foot, b.min_lat, b.max_lat);
    return great_circle_distance(p, {lat, edge_lon});
}

std::optional<ClosestApproach> pairwise_min_distance(std::span<const DynamicRecord> a,
                                                     std::span<const DynamicRecord> b) {
    std::optional<ClosestApproach> best;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].minute < b[j].minute) {
            ++i;
        } else if (b[j].minute < a[i].minute) {
            ++j;
        } else {
            const double d = great_circle_distance(a[i].position(), b[j].position());
            if (!best || d < best->meters) {
                best = ClosestApproach{d, a[i].minute};
            }
            ++i;
            ++j;
        }
    }
    return best;
}

std::vector<Zone> load_zones(const std::filesystem::path& path) {
    const auto table = csv::Table::read(path);
    const auto c_name = table.require("name");
    const auto c_min_lat = table.require("min_lat");
    const auto c_min_lon = table.require("min_lon");
    const auto c_max_lat = table.require("max_lat");
    const auto c_max_lon = table.require("max_lon");
    const auto c_rank = table.require("area_rank");

    std::vector<Zone> zones;
    std::set<int> ranks;
    for (const auto& row : table.rows()) {
        auto field = [&](std::size_t c) -> std::string_view {
            if (c >= row.size()) {
                throw DataError(path.string() + ": short row");
            }
            return row[c];
        };
        Zone z;
        z.name = std::string{text::trim(field(c_name))};
        const auto min_lat = text::parse_double(field(c_min_lat));
        const auto min_lon = text::parse_double(field(c_min_lon));
        const auto max_lat = text::parse_double(field(c_max_lat));
        const auto max_lon = text::parse_double(field(c_max_lon));
        const auto rank = text::parse_int(field(c_rank));
        if (!min_lat || !min_lon || !max_lat || !max_lon || !rank) {
            throw DataError(path.string() + ": malformed zone row '" + z.name + "'");
        }
        z.bounds = {*min_lat, *min_lon, *max_lat, *max_lon};
        z.area_rank = static_cast<int>(*rank);
        if (z.bounds.min_lat > z.bounds.max_lat || z.bounds.min_lon > z.bounds.max_lon) {
            throw DataError(path.string() + ": inverted bounds for zone '" + z.name + "'");
        }
        if (!ranks.insert(z.area_rank).second) {
            throw DataError(path.string() + ": duplicate area_rank " + std::to_string(z.area_rank));
        }
        zones.push_back(std::move(z));
    }
    std::sort(zones.begin(), zones.end(),
              [](const Zone& l, const Zone& r) { return l.area_rank < r.area_rank; });
    return zones;
}

std::string zones_csv(const std::vector<Zone>& zones) {
    csv::Writer w({"name", "min_lat", "min_lon", "max_lat", "max_lon", "area_rank"});
    for (const auto& z : zones) {
        w.add({z.name, text::shortest(z.bounds.min_lat), text::shortest(z.bounds.min_lon),
               text::shortest(z.bounds.max_lat), text::shortest(z.bounds.max_lon),
               std::to_string(z.area_rank)});
    }
    return w.str();
}

} // namespace aisbench
