#include "fixture.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/error.hpp"
#include "aisbench/geo.hpp"
#include "aisbench/random.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace aisbench::fixture {
namespace {

constexpr int kDay = 24 * 3600;
constexpr double kMetersPerDegree = kEarthRadiusMeters * std::numbers::pi / 180.0;

GeoPoint offset(const GeoPoint& p, double east_m, double north_m) {
    return {p.latitude + north_m / kMetersPerDegree,
            p.longitude + east_m / (kMetersPerDegree * std::cos(p.latitude * std::numbers::pi / 180.0))};
}

double bearing_deg(const GeoPoint& a, const GeoPoint& b) {
    const double y = (b.longitude - a.longitude) * std::cos(a.latitude * std::numbers::pi / 180.0);
    const double x = b.latitude - a.latitude;
    double deg = std::atan2(y, x) * 180.0 / std::numbers::pi;
    return deg < 0 ? deg + 360.0 : deg;
}

struct Key {
    int t;
    GeoPoint p;
};

struct Vessel {
    Mmsi mmsi;
    std::string role;
    std::string group;
    std::string name;
    std::optional<std::uint32_t> imo;
    std::optional<double> length, width, draught;
    std::string ship_type;
    std::vector<Key> keys;
    int active_from = 0;
    int active_to = kDay - 1;
    int report_offset = 0; ///< s after each 5-minute bucket start
    std::string alias;     ///< occasional conflicting name
    bool anchored_phase = false;

    [[nodiscard]] GeoPoint at(int t) const {
        if (t <= keys.front().t) {
            return keys.front().p;
        }
        if (t >= keys.back().t) {
            return keys.back().p;
        }
        const auto it = std::upper_bound(keys.begin(), keys.end(), t, [](int v, const Key& k) { return v < k.t; });
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double f = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
        return {a.p.latitude + f * (b.p.latitude - a.p.latitude), a.p.longitude + f * (b.p.longitude - a.p.longitude)};
    }

    /// Segment speed in knots and course at t.
    [[nodiscard]] std::pair<double, double> motion(int t) const {
        if (keys.size() < 2 || t < keys.front().t || t >= keys.back().t) {
            return {0.0, 0.0};
        }
        const auto it = std::upper_bound(keys.begin(), keys.end(), t, [](int v, const Key& k) { return v < k.t; });
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double meters = great_circle_distance(a.p, b.p);
        const double knots = meters / (b.t - a.t) * 3600.0 / kMetersPerNauticalMile;
        return {knots, bearing_deg(a.p, b.p)};
    }

    void stay(int until) { keys.push_back({until, keys.back().p}); }

    /// Sails along `route` from the last key at `knots`; returns arrival time.
    int sail(const std::vector<GeoPoint>& route, double knots) {
        for (const auto& p : route) {
            const double meters = great_circle_distance(keys.back().p, p);
            const int dt = std::max(1, static_cast<int>(std::lround(meters / (knots * kMetersPerNauticalMile / 3600.0))));
            keys.push_back({keys.back().t + dt, p});
        }
        return keys.back().t;
    }
};

const std::vector<std::string> kPrefixes = {"NORD", "SEA", "BALTIC", "DANA", "ARCTIC", "POLAR", "KATTEGAT",
                                            "JUTLAND", "NORTHERN", "OCEAN", "STAR", "FJORD", "AMBER", "SKAW",
                                            "ODIN", "FREJA", "THOR", "HAVET", "LYNX", "MERMAID"};
const std::vector<std::string> kSuffixes = {"EXPRESS", "TRADER", "SPIRIT", "CARRIER", "VIKING", "PRIDE",
                                            "QUEEN", "HAWK", "RUNNER", "WIND", "SWAN", "FALCON",
                                            "BREEZE", "STREAM", "CREST", "HORIZON"};

// Sea gates where through traffic enters or leaves the area.
const std::vector<GeoPoint> kGates = {
    {57.95, 10.0}, {57.85, 11.3}, {56.6, 11.95}, {56.05, 12.7},  {55.3, 12.85}, {54.7, 11.05},
    {54.6, 12.6},  {55.0, 14.3},  {55.8, 11.6},  {55.1, 10.95}, {56.9, 11.05}, {57.3, 7.9},
    {55.9, 7.6},   {54.9, 13.5},  {56.3, 12.2}};

const std::vector<GeoPoint> kAnchorages = {{57.77, 10.8},  {57.5, 10.72}, {56.08, 10.42}, {55.42, 12.33},
                                           {55.79, 12.75}, {55.2, 10.97}, {56.0, 12.48}};

const std::vector<GeoPoint> kAarhusSkagen = {{56.25, 10.55}, {57.0, 10.75}, {57.6, 10.75}};

struct Builder {
    Rng rng;
    std::vector<Port> ports;
    std::vector<Vessel> fleet;
    std::set<std::uint32_t> used_mmsi;
    std::set<std::uint32_t> used_imo;
    std::set<std::string> used_names;

    const Port& port(std::string_view name) const {
        for (const auto& p : ports) {
            if (p.name == name) {
                return p;
            }
        }
        throw DataError("fixture port missing: " + std::string{name});
    }

    Mmsi fresh_mmsi() {
        static constexpr std::uint32_t kMids[] = {219, 220, 211, 265, 257, 230, 244, 636};
        while (true) {
            const auto mid = kMids[rng.below(std::size(kMids))];
            const auto v = mid * 1'000'000u + static_cast<std::uint32_t>(rng.below(1'000'000));
            if (used_mmsi.insert(v).second) {
                return Mmsi{v};
            }
        }
    }

    std::uint32_t fresh_imo() {
        while (true) {
            const auto v = 9'000'000u + static_cast<std::uint32_t>(rng.below(900'000));
            if (used_imo.insert(v).second) {
                return v;
            }
        }
    }

    std::string fresh_name() {
        while (true) {
            auto n = kPrefixes[rng.below(kPrefixes.size())] + " " + kSuffixes[rng.below(kSuffixes.size())];
            if (rng.chance(0.3)) {
                n += " " + std::to_string(1 + rng.below(9));
            }
            if (used_names.insert(n).second) {
                return n;
            }
        }
    }

    Vessel& add(std::string role, std::string ship_type, bool with_imo, double length) {
        Vessel v;
        v.mmsi = fresh_mmsi();
        v.role = std::move(role);
        v.name = fresh_name();
        v.ship_type = std::move(ship_type);
        if (with_imo) {
            v.imo = fresh_imo();
        }
        v.length = std::round(length);
        v.width = std::round(length * rng.uniform(0.13, 0.17) * 10.0) / 10.0;
        v.draught = std::round(length * rng.uniform(0.035, 0.06) * 10.0) / 10.0;
        v.report_offset = static_cast<int>(rng.below(150));
        fleet.push_back(std::move(v));
        return fleet.back();
    }

    GeoPoint near(const GeoPoint& p, double max_m) {
        const double r = max_m * std::sqrt(rng.uniform());
        const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        return offset(p, r * std::cos(a), r * std::sin(a));
    }

    void ferries() {
        struct Route {
            const char* a;
            const char* b;
            double knots;
            int first_departure;
        };
        const Route routes[] = {{"Spodsbjerg", "Taars", 15.0, 5 * 3600},
                                {"Taars", "Spodsbjerg", 15.0, 5 * 3600 + 1800},
                                {"Aarhus", "Odden", 30.0, 6 * 3600},
                                {"Frederikshavn", "Laesoe", 16.0, 6 * 3600 + 900},
                                {"Kalundborg", "Kolby Kaas", 17.0, 5 * 3600 + 2700},
                                {"Svendborg", "Aeroeskoebing", 13.0, 6 * 3600 + 1200}};
        for (const auto& r : routes) {
            auto& v = add("ferry", "Passenger", true, rng.uniform(70, 160));
            v.group = std::string{r.a} + "-" + r.b;
            const auto a = near(port(r.a).position, 150);
            const auto b = near(port(r.b).position, 150);
            // a lateral dog-leg keeps opposing ferries on the same route apart
            const auto mid = offset(GeoPoint{(a.latitude + b.latitude) / 2, (a.longitude + b.longitude) / 2},
                                    r.a < std::string_view{r.b} ? 700.0 : -700.0, 0.0);
            v.keys.push_back({0, a});
            v.stay(r.first_departure);
            bool at_a = true;
            while (true) {
                v.sail({mid, at_a ? b : a}, r.knots);
                at_a = !at_a;
                const int dwell = 1200 + static_cast<int>(rng.below(900));
                if (v.keys.back().t + dwell > 22 * 3600) {
                    break;
                }
                v.stay(v.keys.back().t + dwell);
            }
            v.stay(kDay);
        }
    }

    void traders() {
        const auto aarhus = port("Aarhus").position;
        const auto skagen = port("Skagen").position;
        std::vector<GeoPoint> north = kAarhusSkagen;
        north.push_back(skagen);
        std::vector<GeoPoint> south(kAarhusSkagen.rbegin(), kAarhusSkagen.rend());
        south.push_back(aarhus);

        for (int k = 0; k < 3; ++k) {
            auto& v = add("trader", "Cargo", true, rng.uniform(90, 140));
            v.group = "aarhus-skagen";
            const double knots = rng.uniform(11.5, 13.0);
            if (k == 0) {
                v.keys.push_back({0, aarhus});
                v.stay(3600 + static_cast<int>(rng.below(1800)));
                v.sail(north, knots);
                v.stay(v.keys.back().t + 3600);
                v.sail(south, knots);
            } else if (k == 1) {
                v.keys.push_back({0, skagen});
                v.stay(2 * 3600 + static_cast<int>(rng.below(1800)));
                v.sail(south, knots);
                v.stay(v.keys.back().t + 3600);
                v.sail(north, knots);
            } else {
                v.keys.push_back({0, aarhus});
                v.stay(8 * 3600);
                v.sail(north, knots);
            }
            v.stay(kDay);
        }
    }

    void moored(int count) {
        static const char* kTypes[] = {"Cargo", "Fishing", "Pleasure", "Tug", "Other", "Tanker"};
        for (int i = 0; i < count; ++i) {
            const std::string type = kTypes[rng.below(std::size(kTypes))];
            auto& v = add("moored", type, type == "Cargo" || type == "Tanker" || rng.chance(0.3),
                          type == "Pleasure" ? rng.uniform(8, 20) : rng.uniform(20, 120));
            const auto& p = ports[rng.below(ports.size())];
            v.keys.push_back({0, near(p.position, 400)});
            v.stay(kDay);
        }
    }

    void anchored(int count) {
        for (int i = 0; i < count; ++i) {
            auto& v = add("anchored", rng.chance(0.5) ? "Tanker" : "Cargo", true, rng.uniform(90, 230));
            const auto& anchorage = kAnchorages[rng.below(kAnchorages.size())];
            const auto spot = near(anchorage, 600);
            const auto& gate = kGates[rng.below(kGates.size())];
            v.active_from = static_cast<int>(rng.below(4 * 3600));
            v.keys.push_back({v.active_from, gate});
            v.sail({spot}, rng.uniform(9, 12));
            const int anchor_until = v.keys.back().t + 2 * 3600 + static_cast<int>(rng.below(4 * 3600));
            // slow swing around the anchor
            v.keys.push_back({(v.keys.back().t + anchor_until) / 2, offset(spot, 40, 30)});
            v.keys.push_back({anchor_until, offset(spot, -20, 50)});
            // nearest port, then moor
            const Port* best = &ports.front();
            for (const auto& p : ports) {
                if (great_circle_distance(p.position, spot) < great_circle_distance(best->position, spot)) {
                    best = &p;
                }
            }
            v.sail({near(best->position, 200)}, rng.uniform(8, 11));
            v.stay(kDay);
            v.anchored_phase = true;
        }
    }

    void convoys() {
        const std::pair<GeoPoint, GeoPoint> legs[] = {
            {{57.85, 11.3}, {56.3, 12.2}}, {{55.9, 7.6}, {57.3, 7.9}}, {{54.9, 13.5}, {55.0, 14.6}}};
        for (std::size_t c = 0; c < std::size(legs); ++c) {
            const auto [from, to] = legs[c];
            const int start = 3 * 3600 + static_cast<int>(rng.below(6)) * 1800;
            const double knots = rng.uniform(9.5, 11.5);
            const double brg = bearing_deg(from, to) * std::numbers::pi / 180.0;
            for (int k = -1; k <= 1; ++k) {
                auto& v = add("convoy", k == 0 ? "Military" : "Tug", rng.chance(0.5), rng.uniform(30, 60));
                v.group = "convoy-" + std::to_string(c + 1);
                v.report_offset = 0;
                // 400 m abeam of the leader
                const double east = std::cos(brg) * 400.0 * k;
                const double north = -std::sin(brg) * 400.0 * k;
                v.active_from = start;
                v.keys.push_back({start, offset(from, east, north)});
                v.sail({offset(to, east, north)}, knots);
                v.active_to = std::min(kDay - 1, v.keys.back().t);
            }
        }
    }

    void near_misses() {
        const std::pair<GeoPoint, int> crossings[] = {{{56.7, 11.45}, 10 * 3600}, {{54.95, 12.85}, 14 * 3600 + 1800}};
        for (std::size_t c = 0; c < std::size(crossings); ++c) {
            const auto [p, when] = crossings[c];
            const double knots = 12.0;
            const double half = 20'000.0;
            const int dt = static_cast<int>(std::lround(half / (knots * kMetersPerNauticalMile / 3600.0)));
            for (int k = 0; k < 2; ++k) {
                auto& v = add("near_miss", "Cargo", true, rng.uniform(80, 150));
                v.group = "crossing-" + std::to_string(c + 1);
                v.report_offset = 0;
                // eastbound through p; northbound 120 m east of it
                const auto centre = k == 0 ? p : offset(p, 120.0, 0.0);
                const auto a = k == 0 ? offset(centre, -half, 0) : offset(centre, 0, -half);
                const auto b = k == 0 ? offset(centre, half, 0) : offset(centre, 0, half);
                v.keys = {{when - dt, a}, {when, centre}, {when + dt, b}};
                v.active_from = when - dt;
                v.active_to = when + dt;
            }
        }
    }

    void transits(int count) {
        static const char* kTypes[] = {"Cargo", "Tanker", "Cargo", "Fishing", "Other"};
        for (int i = 0; i < count; ++i) {
            const std::string type = kTypes[rng.below(std::size(kTypes))];
            auto& v = add("transit", type, type != "Fishing" || rng.chance(0.3), rng.uniform(40, 300));
            std::size_t a = 0;
            std::size_t b = 0;
            while (a == b || great_circle_distance(kGates[a], kGates[b]) < 60'000.0) {
                a = rng.below(kGates.size());
                b = rng.below(kGates.size());
            }
            v.active_from = static_cast<int>(rng.below(18 * 3600));
            v.keys.push_back({v.active_from, near(kGates[a], 2000)});
            v.sail({near(kGates[b], 2000)}, rng.uniform(8, 16));
            v.active_to = std::min(kDay - 1, v.keys.back().t);
        }
    }

    void cargo(int count) {
        static const char* kTypes[] = {"Cargo", "Tanker", "Cargo", "Fishing", "Passenger", "Other"};
        for (int i = 0; i < count; ++i) {
            const std::string type = kTypes[rng.below(std::size(kTypes))];
            auto& v = add("cargo", type == "Passenger" ? "Pleasure" : type, type != "Fishing" || rng.chance(0.3),
                          rng.uniform(25, 200));
            const Port* a = &ports[rng.below(ports.size())];
            const Port* b = a;
            while (b == a || great_circle_distance(a->position, b->position) < 30'000.0 ||
                   great_circle_distance(a->position, b->position) > 250'000.0) {
                b = &ports[rng.below(ports.size())];
            }
            v.keys.push_back({0, near(a->position, 300)});
            v.stay(static_cast<int>(rng.below(14 * 3600)));
            v.sail({near(b->position, 300)}, rng.uniform(9, 14));
            v.stay(v.keys.back().t + 3600 + static_cast<int>(rng.below(2 * 3600)));
            if (rng.chance(0.5) && v.keys.back().t < 18 * 3600) {
                const Port* c = &ports[rng.below(ports.size())];
                if (c != b && great_circle_distance(b->position, c->position) < 200'000.0) {
                    v.sail({near(c->position, 300)}, rng.uniform(9, 14));
                }
            }
            if (v.keys.back().t < kDay) {
                v.stay(kDay);
            }
            v.active_to = std::min(kDay - 1, v.keys.back().t);
        }
    }
};

std::string timestamp(int t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "20/11/2024 %02d:%02d:%02d", t / 3600, (t / 60) % 60, t % 60);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? text::shortest(*v) : ""; }

} // namespace

Generated generate(const std::filesystem::path& ports_csv, const std::filesystem::path& out_dir, std::uint64_t seed) {
    Builder b{Rng(seed), parse_ports(ports_csv), {}, {}, {}, {}};
    b.ferries();
    b.traders();
    b.moored(30);
    b.anchored(15);
    b.convoys();
    b.near_misses();
    b.transits(100);
    b.cargo(static_cast<int>(kFleetSize - b.fleet.size()));

    // a few vessels report a second spelling of their name now and then
    for (std::size_t i = 0; i < 3; ++i) {
        auto& v = b.fleet[40 + i * 50];
        v.alias = v.name + " I";
    }
    // dimensions and IMO gaps
    for (auto& v : b.fleet) {
        if (v.role == "cargo" || v.role == "transit" || v.role == "moored") {
            if (b.rng.chance(0.08)) {
                v.draught.reset();
            }
            if (b.rng.chance(0.03)) {
                v.width.reset();
            }
        }
    }

    struct Row {
        int t;
        std::uint32_t mmsi;
        std::string line;
    };
    std::vector<Row> rows;
    rows.reserve(kFleetSize * 288 * 2);
    for (const auto& v : b.fleet) {
        for (int bucket = 0; bucket < kDay / 300; ++bucket) {
            for (const int half : {0, 150}) {
                const int t = bucket * 300 + v.report_offset + half;
                if (t < v.active_from || t > v.active_to) {
                    continue;
                }
                const auto p = v.at(t);
                const auto [knots, course] = v.motion(t);
                double sog = 0.0;
                std::string status;
                if (knots < 0.3) {
                    sog = std::floor(b.rng.uniform(0.0, 0.2) * 10.0) / 10.0;
                    const bool in_port = std::any_of(b.ports.begin(), b.ports.end(), [&](const Port& port) {
                        return great_circle_distance(port.position, p) < port.approach_radius;
                    });
                    status = in_port ? "Moored" : "At anchor";
                } else {
                    sog = std::max(0.5, std::round((knots + 0.15 * b.rng.normal()) * 10.0) / 10.0);
                    status = "Under way using engine";
                }
                const bool alias = !v.alias.empty() && b.rng.chance(0.1);
                std::string line = timestamp(t) + ",Class A," + v.mmsi.str() + "," + text::fixed(p.latitude, 6) +
                                   "," + text::fixed(p.longitude, 6) + "," + status + "," + text::fixed(sog, 1) +
                                   "," + text::fixed(course, 1) + "," + (v.imo ? std::to_string(*v.imo) : "") +
                                   "," + (alias ? v.alias : v.name) + "," + v.ship_type + "," + opt(v.width) +
                                   "," + opt(v.length) + "," + opt(v.draught);
                rows.push_back({t, v.mmsi.value, std::move(line)});
            }
        }
    }
    std::size_t invalid = 0;
    const auto add_invalid = [&](int t, std::string line) {
        rows.push_back({t, 0, std::move(line)});
        ++invalid;
    };
    for (int i = 0; i < 12; ++i) {
        const int t = static_cast<int>(b.rng.below(kDay));
        const auto& v = b.fleet[b.rng.below(b.fleet.size())];
        add_invalid(t, timestamp(t) + ",Class A," + v.mmsi.str() + ",91.000000,10.000000,Unknown value,0.0,0.0,,,,,,");
        add_invalid(t, timestamp(t) + ",Class A,12345,56.000000,10.000000,Unknown value,0.0,0.0,,,,,,");
        add_invalid(t, "20/11/2024 25:61:00,Class A," + v.mmsi.str() + ",56.000000,10.000000,Unknown value,0.0,0.0,,,,,,");
        add_invalid(t, timestamp(t) + ",Base Station," + v.mmsi.str() + ",,,Unknown value,,,,,,,,");
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& x, const Row& y) { return x.t != y.t ? x.t < y.t : x.mmsi < y.mmsi; });

    std::filesystem::create_directories(out_dir);
    Generated g;
    g.raw = out_dir / std::string{kRawFileName};
    g.emissions = out_dir / "emissions.csv";
    g.manifest = out_dir / "fleet.csv";
    g.invalid_rows = invalid;
    {
        std::string out = "# Timestamp,Type of mobile,MMSI,Latitude,Longitude,Navigational status,SOG,COG,IMO,Name,"
                          "Ship type,Width,Length,Draught\n";
        out.reserve(rows.size() * 110);
        for (const auto& r : rows) {
            out += r.line;
            out += '\n';
        }
        text::write_file(g.raw, out);
    }
    {
        csv::Writer w({"imo", "annual_co2_t", "co2_per_nm_kg", "annual_distance_nm"});
        for (const auto& v : b.fleet) {
            if (!v.imo) {
                continue;
            }
            const bool always = v.role == "ferry" || v.role == "trader";
            if (!always && !b.rng.chance(0.75)) {
                continue;
            }
            const double per_nm = std::round(b.rng.uniform(40.0, 900.0) * 100.0) / 100.0;
            const double distance = std::round(b.rng.uniform(8'000.0, 80'000.0));
            const double annual_t = std::round(per_nm * distance / 1000.0 * 1000.0) / 1000.0;
            const double form = always ? 0.0 : b.rng.uniform();
            if (form < 0.8) {
                w.add({std::to_string(*v.imo), text::fixed(annual_t, 3), text::shortest(per_nm),
                       text::shortest(distance)});
            } else if (form < 0.95) {
                w.add({std::to_string(*v.imo), text::fixed(annual_t, 3), "", text::shortest(distance)});
            } else {
                w.add({std::to_string(*v.imo), text::fixed(annual_t, 3), "", ""});
            }
        }
        w.write(g.emissions);
    }
    {
        csv::Writer w({"mmsi", "role", "group"});
        for (const auto& v : b.fleet) {
            w.add({v.mmsi.str(), v.role, v.group});
            g.fleet.push_back({v.mmsi, v.role, v.group});
        }
        w.write(g.manifest);
    }
    return g;
}

std::vector<FleetMember> load_manifest(const std::filesystem::path& path) {
    const auto table = csv::Table::read(path);
    const auto c_m = table.require("mmsi");
    const auto c_r = table.require("role");
    const auto c_g = table.require("group");
    std::vector<FleetMember> out;
    for (const auto& row : table.rows()) {
        const auto m = parse_mmsi(row.at(c_m));
        if (!m) {
            throw DataError(path.string() + ": bad mmsi " + row.at(c_m));
        }
        out.push_back({*m, row.at(c_r), c_g < row.size() ? row[c_g] : ""});
    }
    return out;
}

ExpertLabels expert_labels(const std::vector<FleetMember>& fleet,
                           const std::map<std::size_t, std::vector<Mmsi>>& subsets) {
    ExpertLabels labels;
    for (const auto& [n, members] : subsets) {
        const std::set<Mmsi> in(members.begin(), members.end());
        std::map<std::string, std::set<std::string>> convoys;
        EntitySet ferries;
        for (const auto& f : fleet) {
            if (!in.contains(f.mmsi)) {
                continue;
            }
            if (f.role == "convoy") {
                convoys[f.group].insert(f.mmsi.str());
            } else if (f.role == "ferry") {
                ferries.insert(f.mmsi.str());
            }
        }
        EntitySet groups;
        std::vector<std::string> notes;
        for (const auto& [name, m] : convoys) {
            if (m.size() >= 2) {
                groups.insert(group_id(m));
                notes.push_back(name);
            }
        }
        labels.set("Q16", n,
                   {payload_string(Answer::entities(groups, "group")),
                    notes.empty() ? "no convoy with two members present" : "convoys " + text::join(notes, " ")});
        labels.set("Q17", n,
                   {payload_string(Answer::entities(ferries, "mmsi")),
                    std::to_string(ferries.size()) + " scheduled ferries present"});
    }
    return labels;
}

std::map<std::size_t, std::vector<Mmsi>> read_subsets(const std::filesystem::path& subsets_csv,
                                                      const std::vector<std::size_t>& sizes) {
    const auto table = csv::Table::read(subsets_csv);
    const auto c_m = table.require("mmsi");
    std::vector<Mmsi> order;
    for (const auto& row : table.rows()) {
        order.push_back(parse_mmsi(row.at(c_m)).value());
    }
    std::map<std::size_t, std::vector<Mmsi>> out;
    for (const auto n : sizes) {
        if (n > order.size()) {
            throw DataError("subset size " + std::to_string(n) + " exceeds fleet");
        }
        out[n] = std::vector<Mmsi>(order.begin(), order.begin() + static_cast<long>(n));
    }
    return out;
}

std::string fixture_config(const std::filesystem::path& data_dir, const std::filesystem::path& fixture_dir) {
    const auto q = [](const std::filesystem::path& p) { return "\"" + p.lexically_normal().string() + "\""; };
    return "{\n"
           "  \"inputs\": {\n"
           "    \"raw_ais\": " + q(fixture_dir / std::string{kRawFileName}) + ",\n"
           "    \"emissions\": " + q(fixture_dir / "emissions.csv") + ",\n"
           "    \"ports\": " + q(data_dir / "fixture" / "ports.csv") + ",\n"
           "    \"zones\": " + q(data_dir / "fixture" / "zones.csv") + ",\n"
           "    \"queries\": " + q(data_dir / "queries.csv") + ",\n"
           "    \"expert_labels\": " + q(data_dir / "fixture" / "expert_labels.csv") + "\n"
           "  },\n"
           "  \"out\": " + q(fixture_dir / "out") + ",\n"
           "  \"sizes\": [5, 10, 25, 50, 75, 100],\n"
           "  \"methods\": [\"zsa1\", \"zsa2\", \"zsa3\", \"nlidb\"],\n"
           "  \"seed\": 42,\n"
           "  \"probes_per_query\": 5,\n"
           "  \"run_id\": \"fixture\",\n"
           "  \"sampling\": {\"temperature\": 0.5, \"samples\": 5},\n"
           "  \"transport\": {\"mode\": \"replay\", \"archive\": " + q(data_dir / "replay" / "archive.jsonl") +
           ", \"model_id\": \"" + std::string{kScriptedModelId} + "\"}\n"
           "}\n";
}

} // namespace aisbench::fixture
