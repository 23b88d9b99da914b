#include "aisbench/oracle.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/error.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <set>

namespace aisbench {
namespace {

// Index of the nearest port whose approach radius contains p, or -1.
int port_at(const GeoPoint& p, std::span<const Port> ports) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const double d = great_circle_distance(p, ports[i].position);
        if (d < ports[i].approach_radius && d < best_d) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return best;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Vessels attaining the extreme score; Unknown when nobody has one.
Answer extreme_vessels(const std::vector<std::pair<Mmsi, double>>& scores, bool maximise) {
    if (scores.empty()) {
        return Answer::unknown_value(AnswerKind::entity_set, "mmsi");
    }
    double best = scores.front().second;
    for (const auto& [m, s] : scores) {
        best = maximise ? std::max(best, s) : std::min(best, s);
    }
    EntitySet out;
    for (const auto& [m, s] : scores) {
        if (s == best) {
            out.insert(m.str());
        }
    }
    return Answer::entities(std::move(out), "mmsi");
}

bool is_ferry_type(std::string_view ship_type) {
    const auto t = text::to_lower(ship_type);
    return t == "passenger" || t.find("ferry") != std::string::npos;
}

} // namespace

std::vector<PortVisit> detect_port_visits(std::span<const DynamicRecord> records, std::span<const Port> ports,
                                          const SegmentationConfig& cfg) {
    std::vector<PortVisit> runs;
    int open = -1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const int port = port_at(records[i].position(), ports);
        if (port >= 0 && port == open) {
            runs.back().last = i;
            runs.back().exit_minute = records[i].minute;
        } else if (port >= 0) {
            runs.push_back({ports[static_cast<std::size_t>(port)].name, i, i, records[i].minute,
                            records[i].minute});
        }
        open = port;
    }
    std::vector<PortVisit> merged;
    for (auto& r : runs) {
        if (!merged.empty() && merged.back().port == r.port &&
            r.enter_minute - merged.back().exit_minute < cfg.min_port_dwell) {
            merged.back().last = r.last;
            merged.back().exit_minute = r.exit_minute;
        } else {
            merged.push_back(std::move(r));
        }
    }
    std::erase_if(merged, [&](const PortVisit& v) { return v.duration() < cfg.min_port_dwell; });
    return merged;
}

std::vector<Episode> segment_stops(std::span<const DynamicRecord> records, const SegmentationConfig& cfg) {
    std::vector<Episode> stops;
    std::size_t i = 0;
    while (i < records.size()) {
        if (records[i].sog >= cfg.anchorage_sog_threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < records.size() && records[j + 1].sog < cfg.anchorage_sog_threshold) {
            ++j;
        }
        if (records[j].minute - records[i].minute >= cfg.anchorage_min_duration) {
            stops.push_back({EpisodeKind::stop, i, j, records[i].minute, records[j].minute});
        }
        i = j + 1;
    }
    std::vector<Episode> out;
    std::size_t next = 0;
    for (const auto& s : stops) {
        if (s.first > next) {
            out.push_back({EpisodeKind::move, next, s.first - 1, records[next].minute, records[s.first - 1].minute});
        }
        out.push_back(s);
        next = s.last + 1;
    }
    if (next < records.size()) {
        out.push_back({EpisodeKind::move, next, records.size() - 1, records[next].minute, records.back().minute});
    }
    return out;
}

std::vector<Leg> port_legs(std::span<const DynamicRecord> records, std::span<const PortVisit> visits) {
    std::vector<Leg> legs;
    for (std::size_t i = 1; i < visits.size(); ++i) {
        const auto& a = visits[i - 1];
        const auto& b = visits[i];
        if (a.port == b.port) {
            continue;
        }
        legs.push_back({a.port, b.port, a.exit_minute, b.enter_minute,
                        trajectory_length(records.subspan(a.last, b.first - a.last + 1))});
    }
    return legs;
}

ExpertLabels ExpertLabels::load(const std::filesystem::path& path) {
    const auto table = csv::Table::read(path);
    const auto c_q = table.require("query_id");
    const auto c_n = table.require("dataset_size");
    const auto c_p = table.require("answer_payload");
    const auto c_note = table.find("annotator_note");
    ExpertLabels labels;
    for (const auto& row : table.rows()) {
        const auto n = c_n < row.size() ? text::parse_int(row[c_n]) : std::nullopt;
        if (!n || c_q >= row.size() || c_p >= row.size()) {
            throw DataError(path.string() + ": malformed label row");
        }
        labels.set(row[c_q], static_cast<std::size_t>(*n),
                   {row[c_p], c_note && *c_note < row.size() ? row[*c_note] : ""});
    }
    return labels;
}

void ExpertLabels::set(const std::string& query_id, std::size_t dataset_size, Entry entry) {
    entries_[{query_id, dataset_size}] = std::move(entry);
}

const ExpertLabels::Entry* ExpertLabels::find(const std::string& query_id, std::size_t dataset_size) const {
    const auto it = entries_.find({query_id, dataset_size});
    return it == entries_.end() ? nullptr : &it->second;
}

std::string ExpertLabels::to_csv() const {
    std::vector<std::pair<std::pair<std::string, std::size_t>, const Entry*>> rows;
    for (const auto& [key, e] : entries_) {
        rows.emplace_back(key, &e);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        const auto na = text::parse_int(std::string_view{a.first.first}.substr(1)).value_or(0);
        const auto nb = text::parse_int(std::string_view{b.first.first}.substr(1)).value_or(0);
        return na != nb ? na < nb : a.first.second < b.first.second;
    });
    csv::Writer w({"query_id", "dataset_size", "answer_payload", "annotator_note"});
    for (const auto& [key, e] : rows) {
        w.add({key.first, std::to_string(key.second), e->payload, e->note});
    }
    return w.str();
}

Oracle::Oracle(const DatasetBundle& bundle, SegmentationConfig cfg, const ExpertLabels* labels)
    : bundle_(bundle), cfg_(cfg), labels_(labels) {
    state_.reserve(bundle.size());
    for (const auto& t : bundle.dynamic) {
        VesselState s;
        s.visits = detect_port_visits(t.records, bundle.ports, cfg_);
        s.episodes = segment_stops(t.records, cfg_);
        s.legs = port_legs(t.records, s.visits);
        state_.emplace(t.mmsi, std::move(s));
    }
}

const Trajectory& Oracle::trajectory(Mmsi vessel) const {
    if (const auto* t = bundle_.find_trajectory(vessel)) {
        return *t;
    }
    throw DataError("vessel " + vessel.str() + " is not in the dataset");
}

const ShipStatic& Oracle::ship(Mmsi vessel) const {
    if (const auto* s = bundle_.find_static(vessel)) {
        return *s;
    }
    throw DataError("vessel " + vessel.str() + " has no static record");
}

const std::vector<PortVisit>& Oracle::visits(Mmsi vessel) const {
    trajectory(vessel);
    return state_.at(vessel).visits;
}

const std::vector<Episode>& Oracle::episodes(Mmsi vessel) const {
    trajectory(vessel);
    return state_.at(vessel).episodes;
}

bool Oracle::near_any_port(const GeoPoint& p) const { return port_at(p, bundle_.ports) >= 0; }

std::vector<Episode> Oracle::anchorage_episodes(Mmsi vessel) const {
    const auto& records = trajectory(vessel).records;
    std::vector<Episode> out;
    for (const auto& e : episodes(vessel)) {
        if (e.kind != EpisodeKind::stop) {
            continue;
        }
        bool at_sea = true;
        for (std::size_t i = e.first; i <= e.last && at_sea; ++i) {
            at_sea = !near_any_port(records[i].position());
        }
        if (at_sea) {
            out.push_back(e);
        }
    }
    return out;
}

std::vector<std::string> Oracle::terminal_ports(Mmsi vessel) const {
    std::vector<std::pair<std::string, int>> counts; // first-visit order
    for (const auto& v : visits(vessel)) {
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == v.port; });
        if (it == counts.end()) {
            counts.emplace_back(v.port, 1);
        } else {
            ++it->second;
        }
    }
    if (counts.size() < 2) {
        return {};
    }
    std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return {counts[0].first, counts[1].first};
}

int Oracle::round_trips(Mmsi vessel) const {
    const auto terminals = terminal_ports(vessel);
    if (terminals.empty()) {
        return 0;
    }
    std::vector<std::string> sequence;
    for (const auto& v : visits(vessel)) {
        if (v.port != terminals[0] && v.port != terminals[1]) {
            continue;
        }
        if (sequence.empty() || sequence.back() != v.port) {
            sequence.push_back(v.port);
        }
    }
    return sequence.size() < 3 ? 0 : static_cast<int>((sequence.size() - 1) / 2);
}

bool Oracle::looks_like_ferry(Mmsi vessel) const { return round_trips(vessel) >= 2; }

std::vector<FerryCrossCheck> Oracle::ferry_cross_check(const std::string& query_id) const {
    EntitySet expert;
    if (labels_) {
        if (const auto* e = labels_->find(query_id, bundle_.size())) {
            const auto a = parse_payload(AnswerKind::entity_set, "mmsi", 0.0, e->payload);
            if (const auto* s = std::get_if<EntitySet>(&a.value)) {
                expert = *s;
            }
        }
    }
    std::vector<FerryCrossCheck> out;
    for (const auto& t : bundle_.dynamic) {
        const bool e = expert.contains(t.mmsi.str());
        const bool h = looks_like_ferry(t.mmsi);
        if (e || h) {
            out.push_back({t.mmsi, e, h});
        }
    }
    return out;
}

bool Oracle::applicable(const QuerySpec& spec, Mmsi vessel) const {
    const auto& app = spec.applicability;
    if (app == "any") {
        return true;
    }
    const auto& s = ship(vessel);
    if (app == "imo") {
        return s.imo.has_value();
    }
    if (app == "emissions") {
        return s.annual_co2_kg && s.co2_per_nm_kg;
    }
    if (app == "dimensions") {
        return s.length && s.breadth && s.draught;
    }
    if (app == "moving") {
        const auto& r = trajectory(vessel).records;
        return std::any_of(r.begin(), r.end(), [&](const auto& x) { return x.sog > cfg_.moving_sog_threshold; });
    }
    if (app == "ferry") {
        return is_ferry_type(s.ship_type);
    }
    if (app == "anchorage") {
        return !anchorage_episodes(vessel).empty();
    }
    if (app == "aarhus_skagen") {
        if (!s.co2_per_nm_kg) {
            return false;
        }
        const auto& legs = state_.at(vessel).legs;
        return std::any_of(legs.begin(), legs.end(), [](const Leg& l) {
            return l.from == kTripDestinationPort && l.to == kTripOriginPort;
        });
    }
    throw DataError(spec.id + ": unknown applicability '" + app + "'");
}

Answer Oracle::answer(const QueryInstance& instance) const {
    if (instance.spec.oracle_mode == OracleMode::expert_fixture) {
        return expert(instance);
    }
    if (const auto probe = instance.probe()) {
        return vessel_answer(instance, *probe);
    }
    if (instance.spec.parameterized()) {
        throw DataError(instance.spec.id + ": no vessel bound");
    }
    return global_answer(instance);
}

Answer Oracle::expert(const QueryInstance& instance) const {
    const auto* entry = labels_ ? labels_->find(instance.spec.id, bundle_.size()) : nullptr;
    if (!entry) {
        throw DataError(instance.spec.id + ": no expert label for dataset size " + std::to_string(bundle_.size()));
    }
    return parse_payload(instance.spec.answer_kind, instance.spec.unit, instance.spec.numeric_tolerance(),
                         entry->payload);
}

Answer Oracle::vessel_answer(const QueryInstance& instance, Mmsi vessel) const {
    const auto& spec = instance.spec;
    const auto& records = trajectory(vessel).records;
    const auto& s = ship(vessel);
    const double tol = spec.numeric_tolerance();
    auto number = [&](double v) { return Answer::number(v, spec.unit, tol); };
    auto unknown = [&]() { return Answer::unknown_value(spec.answer_kind, spec.unit); };

    switch (spec.number()) {
    case 1:
        return s.name.empty() ? unknown() : Answer::label(s.name);
    case 2:
        return s.imo ? number(*s.imo) : unknown();
    case 3:
        return s.annual_co2_kg ? number(*s.annual_co2_kg / 1000.0) : unknown();
    case 6:
        return s.co2_per_nm_kg ? number(*s.co2_per_nm_kg) : unknown();
    case 7:
        // Box hull: block coefficient 1.
        return s.length && s.breadth && s.draught ? number(*s.length * *s.breadth * *s.draught) : unknown();
    case 8: {
        double best = 0.0;
        for (const auto& r : records) {
            best = std::max(best, r.sog);
        }
        return number(best);
    }
    case 9: {
        const auto terminals = terminal_ports(vessel);
        std::vector<double> durations;
        for (const auto& leg : state_.at(vessel).legs) {
            const bool between = (leg.from == terminals.at(0) && leg.to == terminals.at(1)) ||
                                 (leg.from == terminals.at(1) && leg.to == terminals.at(0));
            if (between) {
                durations.push_back(leg.arrive_minute - leg.depart_minute);
            }
        }
        return durations.empty() ? unknown() : number(mean(durations));
    }
    case 10:
        return number(trajectory_length(records) / 1000.0);
    case 11: {
        std::vector<double> speeds;
        for (const auto& r : records) {
            if (r.sog > cfg_.moving_sog_threshold) {
                speeds.push_back(r.sog * kKmhPerKnot);
            }
        }
        return speeds.empty() ? number(0.0) : number(mean(speeds));
    }
    case 12:
        return Answer::location(records.back().position());
    case 13: {
        std::vector<double> waits;
        for (const auto& e : anchorage_episodes(vessel)) {
            waits.push_back(e.duration());
        }
        return number(waits.empty() ? 0.0 : mean(waits));
    }
    case 14:
        return number(round_trips(vessel));
    case 15: {
        EntitySet close;
        for (const auto& other : bundle_.dynamic) {
            if (other.mmsi == vessel) {
                continue;
            }
            const auto approach = pairwise_min_distance(records, other.records);
            if (approach && approach->meters < cfg_.proximity_threshold) {
                close.insert(other.mmsi.str());
            }
        }
        return Answer::entities(std::move(close), spec.unit);
    }
    case 18: {
        const auto at_sea = std::count_if(records.begin(), records.end(),
                                          [&](const auto& r) { return !near_any_port(r.position()); });
        return number(static_cast<double>(at_sea * cfg_.sample_period));
    }
    case 21:
        if (!s.breadth || !s.draught) {
            return unknown();
        }
        return Answer::flag(*s.breadth <= kSuezMaxBeamMeters && *s.draught <= kSuezMaxDraughtMeters);
    case 24: {
        if (!s.co2_per_nm_kg) {
            return unknown();
        }
        std::vector<double> trips;
        for (const auto& leg : state_.at(vessel).legs) {
            if (leg.from == kTripDestinationPort && leg.to == kTripOriginPort) {
                trips.push_back(leg.distance / kMetersPerNauticalMile * *s.co2_per_nm_kg);
            }
        }
        return trips.empty() ? unknown() : number(mean(trips));
    }
    default:
        throw DataError(spec.id + ": no per-vessel computation");
    }
}

Answer Oracle::global_answer(const QueryInstance& instance) const {
    const auto& spec = instance.spec;
    const double tol = spec.numeric_tolerance();
    std::vector<std::pair<Mmsi, double>> scores;

    switch (spec.number()) {
    case 4:
        return Answer::number(static_cast<double>(bundle_.size()), spec.unit, tol);
    case 5:
        for (const auto& s : bundle_.statics) {
            if (s.length && s.breadth && s.draught) {
                scores.emplace_back(s.mmsi, *s.length * *s.breadth * *s.draught);
            }
        }
        return extreme_vessels(scores, true);
    case 19:
        for (const auto& t : bundle_.dynamic) {
            const auto& s = ship(t.mmsi);
            if (!s.co2_per_nm_kg) {
                continue;
            }
            double meters = 0.0;
            for (std::size_t i = 1; i < t.records.size(); ++i) {
                const auto& a = t.records[i - 1];
                const auto& b = t.records[i];
                if (a.minute >= kFuelWindowStartMinute && b.minute <= kFuelWindowEndMinute) {
                    meters += great_circle_distance(a.position(), b.position());
                }
            }
            scores.emplace_back(t.mmsi, meters / kMetersPerNauticalMile * *s.co2_per_nm_kg);
        }
        return extreme_vessels(scores, true);
    case 20: {
        std::vector<double> lengths;
        for (const auto& t : bundle_.dynamic) {
            for (const auto& leg : state_.at(t.mmsi).legs) {
                if (leg.from == kTripOriginPort && leg.to == kTripDestinationPort) {
                    lengths.push_back(leg.distance / 1000.0);
                }
            }
        }
        return lengths.empty() ? Answer::unknown_value(spec.answer_kind, spec.unit)
                               : Answer::number(mean(lengths), spec.unit, tol);
    }
    case 22:
        for (const auto& t : bundle_.dynamic) {
            if (const auto& s = ship(t.mmsi); s.co2_per_nm_kg) {
                scores.emplace_back(t.mmsi, trajectory_length(t.records) / kMetersPerNauticalMile * *s.co2_per_nm_kg);
            }
        }
        return extreme_vessels(scores, true);
    case 23:
        for (const auto& s : bundle_.statics) {
            if (s.co2_per_nm_kg) {
                scores.emplace_back(s.mmsi, *s.co2_per_nm_kg);
            }
        }
        return extreme_vessels(scores, false);
    case 25: {
        std::map<std::string, std::size_t> visitors;
        for (const auto& t : bundle_.dynamic) {
            std::set<std::string> seen;
            for (const auto& v : state_.at(t.mmsi).visits) {
                seen.insert(v.port);
            }
            for (const auto& p : seen) {
                ++visitors[p];
            }
        }
        if (visitors.empty()) {
            return Answer::unknown_value(spec.answer_kind);
        }
        // map order breaks ties by port name
        const auto best = std::max_element(visitors.begin(), visitors.end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
        return Answer::label(best->first);
    }
    case 26: {
        EntitySet pairs;
        const auto& dyn = bundle_.dynamic;
        for (std::size_t a = 0; a < dyn.size(); ++a) {
            for (std::size_t b = a + 1; b < dyn.size(); ++b) {
                const auto& ra = dyn[a].records;
                const auto& rb = dyn[b].records;
                std::size_t i = 0;
                std::size_t j = 0;
                bool risk = false;
                while (!risk && i < ra.size() && j < rb.size()) {
                    if (ra[i].minute < rb[j].minute) {
                        ++i;
                    } else if (rb[j].minute < ra[i].minute) {
                        ++j;
                    } else {
                        risk = ra[i].sog > cfg_.collision_relative_speed && rb[j].sog > cfg_.collision_relative_speed &&
                               great_circle_distance(ra[i].position(), rb[j].position()) < cfg_.collision_distance;
                        ++i;
                        ++j;
                    }
                }
                if (risk) {
                    pairs.insert(pair_id(dyn[a].mmsi.str(), dyn[b].mmsi.str()));
                }
            }
        }
        return Answer::entities(std::move(pairs), spec.unit);
    }
    case 27: {
        EntitySet stayed;
        for (const auto& t : bundle_.dynamic) {
            const bool in_port = std::all_of(t.records.begin(), t.records.end(),
                                             [&](const auto& r) { return near_any_port(r.position()); });
            if (in_port) {
                stayed.insert(t.mmsi.str());
            }
        }
        return Answer::entities(std::move(stayed), spec.unit);
    }
    default:
        throw DataError(spec.id + ": no dataset-wide computation");
    }
}

} // namespace aisbench
