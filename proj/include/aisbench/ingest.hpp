#pragma once

#include "aisbench/geo.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aisbench {

/// 9-digit Maritime Mobile Service Identity.
struct Mmsi {
    std::uint32_t value = 0;

    [[nodiscard]] std::string str() const { return std::to_string(value); }
    friend auto operator<=>(const Mmsi&, const Mmsi&) = default;
};

/// Parses exactly nine decimal digits.
std::optional<Mmsi> parse_mmsi(std::string_view s);

/// One decoded AIS position report, as read from the source CSV.
struct RawAisRow {
    std::string day;      ///< civil date as written in the source, e.g. 20/11/2024
    int second_of_day = 0;
    Mmsi mmsi;
    double latitude = 0.0;
    double longitude = 0.0;
    std::optional<double> sog;
    std::optional<std::string> name;
    std::optional<std::uint32_t> imo;
    std::optional<double> length;
    std::optional<double> breadth;
    std::optional<double> draught;
    std::optional<std::string> ship_type;
};

/// A resampled position. `minute` is minutes since midnight.
struct DynamicRecord {
    Mmsi mmsi;
    int minute = 0;
    double latitude = 0.0;
    double longitude = 0.0;
    double sog = 0.0;

    [[nodiscard]] GeoPoint position() const { return {latitude, longitude}; }
    friend bool operator==(const DynamicRecord&, const DynamicRecord&) = default;
};

/// Time-ordered records of one vessel.
struct Trajectory {
    Mmsi mmsi;
    std::vector<DynamicRecord> records;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct ShipStatic {
    Mmsi mmsi;
    std::string name;
    std::optional<std::uint32_t> imo;
    std::optional<double> length;  ///< m
    std::optional<double> breadth; ///< m
    std::optional<double> draught; ///< m
    std::string ship_type;
    std::optional<double> annual_co2_kg;
    std::optional<double> co2_per_nm_kg;

    friend bool operator==(const ShipStatic&, const ShipStatic&) = default;
};

inline constexpr double kDefaultPortRadiusMeters = 2000.0;

struct Port {
    std::string name;
    GeoPoint position;
    double approach_radius = kDefaultPortRadiusMeters; ///< m

    friend bool operator==(const Port&, const Port&) = default;
};

/// The three prompt-ready datasets. Trajectories and statics are sorted by
/// mmsi, and every trajectory has a static row.
struct DatasetBundle {
    std::vector<Trajectory> dynamic;
    std::vector<ShipStatic> statics;
    std::vector<Port> ports;

    [[nodiscard]] std::size_t size() const { return dynamic.size(); }
    [[nodiscard]] const Trajectory* find_trajectory(Mmsi m) const;
    [[nodiscard]] const ShipStatic* find_static(Mmsi m) const;
    [[nodiscard]] std::vector<Mmsi> vessels() const;

    friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

/// Source column names. Defaults follow the Danish Maritime Authority export.
struct RawColumns {
    std::string timestamp = "Timestamp";
    std::string mmsi = "MMSI";
    std::string latitude = "Latitude";
    std::string longitude = "Longitude";
    std::string sog = "SOG";
    std::string name = "Name";
    std::string imo = "IMO";
    std::string length = "Length";
    std::string breadth = "Width";
    std::string draught = "Draught";
    std::string ship_type = "Ship type";
};

struct ParseReport {
    std::vector<RawAisRow> rows;
    std::size_t total = 0;
    std::size_t dropped = 0;
    std::vector<std::string> warnings;
};

/// Reads a comma-separated AIS export. Invalid rows are dropped and counted;
/// a missing file or required column is a DataError.
ParseReport parse_raw(const std::filesystem::path& path, const RawColumns& columns = {});
ParseReport parse_raw(std::istream& in, const std::string& source_name,
                      const RawColumns& columns = {});

inline constexpr int kResamplePeriodMinutes = 5;

/// Keeps, per vessel, the first report in each `period_minutes` bucket and
/// labels it with the bucket start. Output is sorted by (mmsi, minute).
/// All rows must share one civil day.
std::vector<DynamicRecord> resample(std::span<const RawAisRow> rows,
                                    int period_minutes = kResamplePeriodMinutes);

/// Splits mmsi-sorted records into per-vessel trajectories.
std::vector<Trajectory> group_by_vessel(std::span<const DynamicRecord> records);

struct EmissionsRow {
    std::uint32_t imo = 0;
    double annual_co2_kg = 0.0;
    std::optional<double> co2_per_nm_kg;
    std::optional<double> annual_distance_m;
};

/// Reads `imo,annual_co2_t[,co2_per_nm_kg][,annual_distance_nm]`.
std::vector<EmissionsRow> parse_emissions(const std::filesystem::path& path);

struct StaticReport {
    std::vector<ShipStatic> statics;
    std::vector<std::string> conflicts;
};

/// One row per vessel: modal non-empty AIS value for each static attribute,
/// CO2 figures joined by IMO. A vessel without an emissions match keeps its
/// CO2 fields absent. When the source lacks a per-distance figure but gives
/// the annual distance, co2_per_nm is annual CO2 over annual distance.
StaticReport build_static(std::span<const RawAisRow> rows, std::span<const EmissionsRow> emissions);

/// Reads `name,latitude,longitude`; every port gets `approach_radius`.
std::vector<Port> parse_ports(const std::filesystem::path& path,
                              double approach_radius = kDefaultPortRadiusMeters);

/// Joins trajectories with statics; vessels lacking a static row are dropped
/// and reported through `dropped`.
DatasetBundle assemble_bundle(std::vector<Trajectory> dynamic, std::vector<ShipStatic> statics,
                              std::vector<Port> ports, std::vector<Mmsi>* dropped = nullptr);

/// Deterministic n-vessel subset. Every pinned vessel is kept; the rest are
/// drawn from a seeded permutation, so the n1 subset is contained in the n2
/// subset for n1 < n2 and the same seed.
DatasetBundle subset(const DatasetBundle& bundle, std::size_t n, std::uint64_t seed,
                     std::span<const Mmsi> pinned = {});

/// The seeded vessel order used by subset(); pinned vessels first.
std::vector<Mmsi> subset_order(const DatasetBundle& bundle, std::uint64_t seed,
                               std::span<const Mmsi> pinned);

inline constexpr std::size_t kSweepSizes[] = {5, 10, 25, 50, 75, 100};

std::string dynamic_csv(std::span<const Trajectory> trajectories);
std::string static_csv(std::span<const ShipStatic> statics);
std::string ports_csv(std::span<const Port> ports);

/// Writes dynamic.csv, static.csv and ports.csv into `dir`.
void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle read_bundle(const std::filesystem::path& dir,
                          double approach_radius = kDefaultPortRadiusMeters);

} // namespace aisbench

template <>
struct std::hash<aisbench::Mmsi> {
    std::size_t operator()(const aisbench::Mmsi& m) const noexcept {
        return std::hash<std::uint32_t>{}(m.value);
    }
};
