#include "aisbench/ingest.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/error.hpp"
#include "aisbench/random.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace aisbench {

std::optional<Mmsi> parse_mmsi(std::string_view s) {
    s = text::trim(s);
    if (s.size() != 9 || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        return std::nullopt;
    }
    return Mmsi{static_cast<std::uint32_t>(*text::parse_int(s))};
}

const Trajectory* DatasetBundle::find_trajectory(Mmsi m) const {
    const auto it = std::lower_bound(dynamic.begin(), dynamic.end(), m,
                                     [](const Trajectory& t, Mmsi v) { return t.mmsi < v; });
    return it != dynamic.end() && it->mmsi == m ? &*it : nullptr;
}

const ShipStatic* DatasetBundle::find_static(Mmsi m) const {
    const auto it = std::lower_bound(statics.begin(), statics.end(), m,
                                     [](const ShipStatic& s, Mmsi v) { return s.mmsi < v; });
    return it != statics.end() && it->mmsi == m ? &*it : nullptr;
}

std::vector<Mmsi> DatasetBundle::vessels() const {
    std::vector<Mmsi> out;
    out.reserve(dynamic.size());
    for (const auto& t : dynamic) {
        out.push_back(t.mmsi);
    }
    return out;
}

namespace {

struct Timestamp {
    std::string day;
    int second_of_day = 0;
};

// Accepts "dd/mm/yyyy HH:MM:SS" (DMA) and "yyyy-mm-dd[ T]HH:MM[:SS]".
std::optional<Timestamp> parse_timestamp(std::string_view s) {
    s = text::trim(s);
    const auto sep = s.find_first_of(" T");
    if (sep == std::string_view::npos) {
        return std::nullopt;
    }
    const auto date = s.substr(0, sep);
    const auto clock = text::trim(s.substr(sep + 1));
    const bool dmy = date.size() == 10 && date[2] == '/' && date[5] == '/';
    const bool iso = date.size() == 10 && date[4] == '-' && date[7] == '-';
    if (!dmy && !iso) {
        return std::nullopt;
    }
    const auto parts = text::split(clock, ':');
    if (parts.size() < 2 || parts.size() > 3) {
        return std::nullopt;
    }
    const auto h = text::parse_int(parts[0]);
    const auto m = text::parse_int(parts[1]);
    const auto sec = parts.size() == 3 ? text::parse_double(parts[2]) : std::optional<double>{0.0};
    if (!h || !m || !sec || *h < 0 || *h > 23 || *m < 0 || *m > 59 || *sec < 0 || *sec >= 60) {
        return std::nullopt;
    }
    return Timestamp{std::string{date}, static_cast<int>(*h * 3600 + *m * 60 + static_cast<int>(*sec))};
}

std::optional<std::uint32_t> parse_imo(std::string_view s) {
    s = text::trim(s);
    if (text::starts_with_icase(s, "imo")) {
        s = text::trim(s.substr(3));
    }
    const auto v = text::parse_int(s);
    if (!v || *v <= 0 || *v > 9'999'999) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(*v);
}

std::optional<double> parse_positive(std::string_view s) {
    const auto v = text::parse_double(s);
    if (!v || *v <= 0.0) {
        return std::nullopt;
    }
    return v;
}

std::optional<std::string> non_empty(std::string_view s) {
    s = text::trim(s);
    if (s.empty() || text::to_lower(s) == "unknown" || text::to_lower(s) == "undefined") {
        return std::nullopt;
    }
    return std::string{s};
}

} // namespace

ParseReport parse_raw(const std::filesystem::path& path, const RawColumns& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("raw AIS file not found: " + path.string());
    }
    return parse_raw(in, path.string(), columns);
}

ParseReport parse_raw(std::istream& in, const std::string& source_name, const RawColumns& columns) {
    const auto table = csv::Table::parse(in, source_name);
    const auto c_ts = table.require(columns.timestamp);
    const auto c_mmsi = table.require(columns.mmsi);
    const auto c_lat = table.require(columns.latitude);
    const auto c_lon = table.require(columns.longitude);
    const auto c_sog = table.require(columns.sog);
    const auto c_name = table.find(columns.name);
    const auto c_imo = table.find(columns.imo);
    const auto c_len = table.find(columns.length);
    const auto c_breadth = table.find(columns.breadth);
    const auto c_draught = table.find(columns.draught);
    const auto c_type = table.find(columns.ship_type);

    ParseReport report;
    report.total = table.size();
    report.rows.reserve(table.size());
    for (const auto& row : table.rows()) {
        auto cell = [&row](std::optional<std::size_t> c) -> std::string_view {
            return c && *c < row.size() ? std::string_view{row[*c]} : std::string_view{};
        };
        const auto ts = parse_timestamp(cell(c_ts));
        const auto mmsi = parse_mmsi(cell(c_mmsi));
        const auto lat = text::parse_double(cell(c_lat));
        const auto lon = text::parse_double(cell(c_lon));
        const auto sog_text = text::trim(cell(c_sog));
        const auto sog = text::parse_double(sog_text);
        if (!ts || !mmsi || !lat || !lon || !is_valid({*lat, *lon}) ||
            (!sog_text.empty() && (!sog || *sog < 0.0))) {
            ++report.dropped;
            continue;
        }
        RawAisRow r;
        r.day = ts->day;
        r.second_of_day = ts->second_of_day;
        r.mmsi = *mmsi;
        r.latitude = *lat;
        r.longitude = *lon;
        r.sog = sog;
        r.name = non_empty(cell(c_name));
        r.imo = parse_imo(cell(c_imo));
        r.length = parse_positive(cell(c_len));
        r.breadth = parse_positive(cell(c_breadth));
        r.draught = parse_positive(cell(c_draught));
        r.ship_type = non_empty(cell(c_type));
        report.rows.push_back(std::move(r));
    }
    if (report.total > 0 && report.dropped * 2 > report.total) {
        report.warnings.push_back(source_name + ": dropped " + std::to_string(report.dropped) + " of " +
                                  std::to_string(report.total) + " rows (more than half)");
    }
    return report;
}

std::vector<DynamicRecord> resample(std::span<const RawAisRow> rows, int period_minutes) {
    if (period_minutes <= 0) {
        throw ConfigError("resample period must be positive");
    }
    std::vector<const RawAisRow*> order;
    order.reserve(rows.size());
    for (const auto& r : rows) {
        if (!rows.empty() && r.day != rows.front().day) {
            throw DataError("resample: input spans more than one day (" + rows.front().day + ", " +
                            r.day + ")");
        }
        // Reports without a speed cannot populate the dynamic table.
        if (r.sog) {
            order.push_back(&r);
        }
    }
    std::stable_sort(order.begin(), order.end(), [](const RawAisRow* a, const RawAisRow* b) {
        return a->mmsi != b->mmsi ? a->mmsi < b->mmsi : a->second_of_day < b->second_of_day;
    });

    const int period_seconds = period_minutes * 60;
    std::vector<DynamicRecord> out;
    out.reserve(order.size() / 2);
    for (const RawAisRow* r : order) {
        const int bucket = r->second_of_day / period_seconds * period_minutes;
        if (!out.empty() && out.back().mmsi == r->mmsi && out.back().minute == bucket) {
            continue;
        }
        out.push_back({r->mmsi, bucket, r->latitude, r->longitude, *r->sog});
    }
    return out;
}

std::vector<Trajectory> group_by_vessel(std::span<const DynamicRecord> records) {
    std::vector<Trajectory> out;
    for (const auto& r : records) {
        if (out.empty() || out.back().mmsi != r.mmsi) {
            out.push_back({r.mmsi, {}});
        }
        out.back().records.push_back(r);
    }
    return out;
}

std::vector<EmissionsRow> parse_emissions(const std::filesystem::path& path) {
    const auto table = csv::Table::read(path);
    const auto c_imo = table.require("imo");
    const auto c_co2 = table.require("annual_co2_t");
    const auto c_per_nm = table.find("co2_per_nm_kg");
    const auto c_dist = table.find("annual_distance_nm");
    std::vector<EmissionsRow> out;
    for (const auto& row : table.rows()) {
        auto cell = [&row](std::optional<std::size_t> c) -> std::string_view {
            return c && *c < row.size() ? std::string_view{row[*c]} : std::string_view{};
        };
        const auto imo = parse_imo(cell(c_imo));
        const auto co2 = text::parse_double(cell(c_co2));
        if (!imo || !co2 || *co2 < 0.0) {
            continue;
        }
        EmissionsRow e;
        e.imo = *imo;
        // kg resolution; the static CSV renders tonnes with three decimals.
        e.annual_co2_kg = std::round(*co2 * 1000.0);
        if (const auto v = text::parse_double(cell(c_per_nm)); v && *v >= 0.0) {
            e.co2_per_nm_kg = v;
        }
        if (const auto v = text::parse_double(cell(c_dist)); v && *v > 0.0) {
            e.annual_distance_m = *v * kMetersPerNauticalMile;
        }
        out.push_back(e);
    }
    return out;
}

namespace {

// Most frequent value; ties go to the value seen first.
template <typename T>
class ModeCounter {
public:
    void add(const T& v) {
        for (auto& [value, count] : counts_) {
            if (value == v) {
                ++count;
                return;
            }
        }
        counts_.emplace_back(v, 1);
    }
    [[nodiscard]] std::optional<T> mode() const {
        std::optional<T> best;
        std::size_t best_count = 0;
        for (const auto& [value, count] : counts_) {
            if (count > best_count) {
                best = value;
                best_count = count;
            }
        }
        return best;
    }
    [[nodiscard]] bool conflicting() const { return counts_.size() > 1; }

private:
    std::vector<std::pair<T, std::size_t>> counts_;
};

struct StaticAccumulator {
    ModeCounter<std::string> name;
    ModeCounter<std::uint32_t> imo;
    ModeCounter<double> length;
    ModeCounter<double> breadth;
    ModeCounter<double> draught;
    ModeCounter<std::string> ship_type;
};

} // namespace

StaticReport build_static(std::span<const RawAisRow> rows, std::span<const EmissionsRow> emissions) {
    std::map<Mmsi, StaticAccumulator> acc;
    for (const auto& r : rows) {
        auto& a = acc[r.mmsi];
        if (r.name) a.name.add(*r.name);
        if (r.imo) a.imo.add(*r.imo);
        if (r.length) a.length.add(*r.length);
        if (r.breadth) a.breadth.add(*r.breadth);
        if (r.draught) a.draught.add(*r.draught);
        if (r.ship_type) a.ship_type.add(*r.ship_type);
    }
    std::unordered_map<std::uint32_t, const EmissionsRow*> by_imo;
    for (const auto& e : emissions) {
        by_imo.emplace(e.imo, &e);
    }

    StaticReport report;
    for (const auto& [mmsi, a] : acc) {
        ShipStatic s;
        s.mmsi = mmsi;
        s.name = a.name.mode().value_or("");
        s.imo = a.imo.mode();
        s.length = a.length.mode();
        s.breadth = a.breadth.mode();
        s.draught = a.draught.mode();
        s.ship_type = a.ship_type.mode().value_or("");
        const std::pair<const char*, bool> checks[] = {
            {"name", a.name.conflicting()},       {"imo", a.imo.conflicting()},
            {"length", a.length.conflicting()},   {"breadth", a.breadth.conflicting()},
            {"draught", a.draught.conflicting()}, {"ship_type", a.ship_type.conflicting()},
        };
        for (const auto& [field, conflict] : checks) {
            if (conflict) {
                report.conflicts.push_back(mmsi.str() + ": conflicting " + field + " values, kept modal");
            }
        }
        if (s.imo) {
            if (const auto it = by_imo.find(*s.imo); it != by_imo.end()) {
                const auto& e = *it->second;
                s.annual_co2_kg = e.annual_co2_kg;
                s.co2_per_nm_kg = e.co2_per_nm_kg;
                if (!s.co2_per_nm_kg && e.annual_distance_m) {
                    s.co2_per_nm_kg = e.annual_co2_kg / (*e.annual_distance_m / kMetersPerNauticalMile);
                }
            }
        }
        report.statics.push_back(std::move(s));
    }
    return report;
}

std::vector<Port> parse_ports(const std::filesystem::path& path, double approach_radius) {
    const auto table = csv::Table::read(path);
    const auto c_name = table.require("name");
    const auto c_lat = table.require("latitude");
    const auto c_lon = table.require("longitude");
    std::vector<Port> ports;
    std::unordered_set<std::string> names;
    for (const auto& row : table.rows()) {
        if (std::max({c_name, c_lat, c_lon}) >= row.size()) {
            throw DataError(path.string() + ": short row");
        }
        const auto lat = text::parse_double(row[c_lat]);
        const auto lon = text::parse_double(row[c_lon]);
        std::string name{text::trim(row[c_name])};
        if (!lat || !lon || !is_valid({*lat, *lon}) || name.empty()) {
            throw DataError(path.string() + ": malformed port row '" + name + "'");
        }
        if (!names.insert(name).second) {
            throw DataError(path.string() + ": duplicate port '" + name + "'");
        }
        ports.push_back({std::move(name), {*lat, *lon}, approach_radius});
    }
    return ports;
}

DatasetBundle assemble_bundle(std::vector<Trajectory> dynamic, std::vector<ShipStatic> statics,
                              std::vector<Port> ports, std::vector<Mmsi>* dropped) {
    std::sort(dynamic.begin(), dynamic.end(),
              [](const Trajectory& a, const Trajectory& b) { return a.mmsi < b.mmsi; });
    std::sort(statics.begin(), statics.end(),
              [](const ShipStatic& a, const ShipStatic& b) { return a.mmsi < b.mmsi; });
    DatasetBundle bundle;
    bundle.ports = std::move(ports);
    std::unordered_set<Mmsi> moving;
    for (auto& t : dynamic) {
        const bool known = std::binary_search(
            statics.begin(), statics.end(), t.mmsi,
            [](const auto& l, const auto& r) {
                if constexpr (std::is_same_v<std::decay_t<decltype(l)>, Mmsi>) {
                    return l < r.mmsi;
                } else {
                    return l.mmsi < r;
                }
            });
        if (!known) {
            if (dropped) {
                dropped->push_back(t.mmsi);
            }
            continue;
        }
        moving.insert(t.mmsi);
        bundle.dynamic.push_back(std::move(t));
    }
    for (auto& s : statics) {
        if (moving.contains(s.mmsi)) {
            bundle.statics.push_back(std::move(s));
        }
    }
    return bundle;
}

std::vector<Mmsi> subset_order(const DatasetBundle& bundle, std::uint64_t seed,
                               std::span<const Mmsi> pinned) {
    std::vector<Mmsi> order;
    std::unordered_set<Mmsi> seen;
    for (const auto m : pinned) {
        if (!bundle.find_trajectory(m)) {
            throw DataError("subset: pinned vessel " + m.str() + " is not in the dataset");
        }
        if (seen.insert(m).second) {
            order.push_back(m);
        }
    }
    std::vector<Mmsi> rest;
    for (const auto& t : bundle.dynamic) {
        if (!seen.contains(t.mmsi)) {
            rest.push_back(t.mmsi);
        }
    }
    Rng rng(seed);
    rng.shuffle(rest);
    order.insert(order.end(), rest.begin(), rest.end());
    return order;
}

DatasetBundle subset(const DatasetBundle& bundle, std::size_t n, std::uint64_t seed,
                     std::span<const Mmsi> pinned) {
    if (n > bundle.size()) {
        throw ConfigError("subset: requested " + std::to_string(n) + " vessels but the dataset has " +
                          std::to_string(bundle.size()));
    }
    const auto order = subset_order(bundle, seed, pinned);
    const std::size_t pinned_count =
        std::unordered_set<Mmsi>(pinned.begin(), pinned.end()).size();
    if (n < pinned_count) {
        throw ConfigError("subset: size " + std::to_string(n) + " is smaller than the " +
                          std::to_string(pinned_count) + " probe vessels that must be kept");
    }
    const std::unordered_set<Mmsi> keep(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    DatasetBundle out;
    out.ports = bundle.ports;
    for (const auto& t : bundle.dynamic) {
        if (keep.contains(t.mmsi)) {
            out.dynamic.push_back(t);
        }
    }
    for (const auto& s : bundle.statics) {
        if (keep.contains(s.mmsi)) {
            out.statics.push_back(s);
        }
    }
    return out;
}

namespace {

std::string opt_number(const std::optional<double>& v) {
    return v ? text::shortest(*v) : std::string{};
}

} // namespace

std::string dynamic_csv(std::span<const Trajectory> trajectories) {
    std::string out = "mmsi,time,latitude,longitude,sog\n";
    for (const auto& t : trajectories) {
        const auto id = t.mmsi.str();
        for (const auto& r : t.records) {
            out += id;
            out += ',';
            out += text::hhmm(r.minute);
            out += ',';
            out += text::shortest(r.latitude);
            out += ',';
            out += text::shortest(r.longitude);
            out += ',';
            out += text::shortest(r.sog);
            out += '\n';
        }
    }
    return out;
}

std::string static_csv(std::span<const ShipStatic> statics) {
    csv::Writer w({"mmsi", "name", "imo", "length", "breadth", "draught", "ship_type", "annual_co2",
                   "co2_per_nm"});
    for (const auto& s : statics) {
        w.add({s.mmsi.str(), s.name, s.imo ? std::to_string(*s.imo) : "", opt_number(s.length),
               opt_number(s.breadth), opt_number(s.draught), s.ship_type,
               s.annual_co2_kg ? text::fixed(*s.annual_co2_kg / 1000.0, 3) : "",
               opt_number(s.co2_per_nm_kg)});
    }
    return w.str();
}

std::string ports_csv(std::span<const Port> ports) {
    csv::Writer w({"name", "latitude", "longitude"});
    for (const auto& p : ports) {
        w.add({p.name, text::shortest(p.position.latitude), text::shortest(p.position.longitude)});
    }
    return w.str();
}

void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir) {
    text::write_file(dir / "dynamic.csv", dynamic_csv(bundle.dynamic));
    text::write_file(dir / "static.csv", static_csv(bundle.statics));
    text::write_file(dir / "ports.csv", ports_csv(bundle.ports));
}

DatasetBundle read_bundle(const std::filesystem::path& dir, double approach_radius) {
    std::vector<DynamicRecord> records;
    {
        const auto table = csv::Table::read(dir / "dynamic.csv");
        const auto c_mmsi = table.require("mmsi");
        const auto c_time = table.require("time");
        const auto c_lat = table.require("latitude");
        const auto c_lon = table.require("longitude");
        const auto c_sog = table.require("sog");
        records.reserve(table.size());
        for (const auto& row : table.rows()) {
            if (row.size() < 5) {
                throw DataError((dir / "dynamic.csv").string() + ": short row");
            }
            const auto mmsi = parse_mmsi(row[c_mmsi]);
            const auto minute = text::parse_hhmm(row[c_time]);
            const auto lat = text::parse_double(row[c_lat]);
            const auto lon = text::parse_double(row[c_lon]);
            const auto sog = text::parse_double(row[c_sog]);
            if (!mmsi || !minute || !lat || !lon || !sog) {
                throw DataError((dir / "dynamic.csv").string() + ": malformed row");
            }
            records.push_back({*mmsi, *minute, *lat, *lon, *sog});
        }
    }
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.mmsi != b.mmsi ? a.mmsi < b.mmsi : a.minute < b.minute;
    });

    std::vector<ShipStatic> statics;
    {
        const auto table = csv::Table::read(dir / "static.csv");
        const std::size_t cols[] = {table.require("mmsi"),      table.require("name"),
                                    table.require("imo"),       table.require("length"),
                                    table.require("breadth"),   table.require("draught"),
                                    table.require("ship_type"), table.require("annual_co2"),
                                    table.require("co2_per_nm")};
        for (const auto& row : table.rows()) {
            if (row.size() < 9) {
                throw DataError((dir / "static.csv").string() + ": short row");
            }
            auto cell = [&](int i) -> std::string_view { return row[cols[i]]; };
            const auto mmsi = parse_mmsi(cell(0));
            if (!mmsi) {
                throw DataError((dir / "static.csv").string() + ": malformed mmsi");
            }
            ShipStatic s;
            s.mmsi = *mmsi;
            s.name = std::string{cell(1)};
            s.imo = parse_imo(cell(2));
            s.length = text::parse_double(cell(3));
            s.breadth = text::parse_double(cell(4));
            s.draught = text::parse_double(cell(5));
            s.ship_type = std::string{cell(6)};
            if (const auto t = text::parse_double(cell(7))) {
                s.annual_co2_kg = std::round(*t * 1000.0);
            }
            s.co2_per_nm_kg = text::parse_double(cell(8));
            statics.push_back(std::move(s));
        }
    }
    return assemble_bundle(group_by_vessel(records), std::move(statics),
                           parse_ports(dir / "ports.csv", approach_radius));
}

} // namespace aisbench
