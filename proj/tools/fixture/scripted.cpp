#include "fixture.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/digest.hpp"
#include "aisbench/error.hpp"
#include "aisbench/eval.hpp"
#include "aisbench/random.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace aisbench::fixture {
namespace {

constexpr std::string_view kRefusal = "I cannot determine this from the data provided.";

// Plain decimal without exponent, trailing zeros trimmed.
std::string plain(double v) {
    auto s = text::fixed(v, 6);
    if (s.find('.') != std::string::npos) {
        s.erase(s.find_last_not_of('0') + 1);
        if (s.back() == '.') {
            s.pop_back();
        }
    }
    return s;
}

std::string with_unit(double v, const std::string& unit) {
    if (unit.empty() || unit == "id") {
        return plain(v);
    }
    return plain(v) + " " + unit;
}

std::string render(const Answer& a) {
    if (a.unknown()) {
        return "UNKNOWN";
    }
    switch (a.kind) {
    case AnswerKind::numeric:
        return with_unit(std::get<double>(a.value), a.unit);
    case AnswerKind::text:
        return "\"" + std::get<std::string>(a.value) + "\"";
    case AnswerKind::boolean:
        return std::get<bool>(a.value) ? "yes" : "no";
    case AnswerKind::location: {
        const auto& p = std::get<GeoPoint>(a.value);
        return plain(p.latitude) + " N, " + plain(p.longitude) + " E";
    }
    case AnswerKind::entity_set: {
        const auto& s = std::get<EntitySet>(a.value);
        if (s.empty()) {
            return "none";
        }
        return text::join(std::vector<std::string>(s.begin(), s.end()), ", ");
    }
    }
    return "UNKNOWN";
}

const std::vector<std::string> kWrongPorts = {"Esbjerg", "Roenne", "Gedser"};

// An element of the given kind that is not in `avoid`.
std::string fabricated(const std::string& unit, const std::vector<std::string>& vessels, const EntitySet& avoid) {
    for (std::size_t i = 0; i < vessels.size(); ++i) {
        for (std::size_t j = i + 1; j < vessels.size(); ++j) {
            std::string id = unit == "pair"    ? pair_id(vessels[i], vessels[j])
                             : unit == "group" ? group_id({vessels[i], vessels[j]})
                                               : vessels[i];
            if (!avoid.contains(id)) {
                return id;
            }
        }
    }
    return "000000000";
}

Answer wrong_of(const Answer& truth, const QuerySpec& spec, const std::vector<std::string>& vessels) {
    if (truth.unknown()) {
        switch (truth.kind) {
        case AnswerKind::numeric: return Answer::number(0.0, truth.unit);
        case AnswerKind::text: return Answer::label("Copenhagen");
        case AnswerKind::boolean: return Answer::flag(true);
        case AnswerKind::location: return Answer::location({56.0, 11.0});
        case AnswerKind::entity_set: return Answer::entities({fabricated(truth.unit, vessels, {})}, truth.unit);
        }
    }
    switch (truth.kind) {
    case AnswerKind::numeric: {
        const double t = std::get<double>(truth.value);
        if (spec.tolerance && *spec.tolerance == 0.0) {
            return Answer::number(t == 0.0 ? t + 2.0 : t + 1.0, truth.unit);
        }
        return Answer::number(t + std::max(0.4 * std::abs(t), 10.0 * absolute_floor(truth.unit)), truth.unit);
    }
    case AnswerKind::text: {
        const auto& s = std::get<std::string>(truth.value);
        if (spec.id == "Q25") {
            for (const auto& p : kWrongPorts) {
                if (p != s) {
                    return Answer::label(p);
                }
            }
        }
        return Answer::label(s + " II");
    }
    case AnswerKind::boolean:
        return Answer::flag(!std::get<bool>(truth.value));
    case AnswerKind::location: {
        const auto& p = std::get<GeoPoint>(truth.value);
        return Answer::location({p.latitude + 0.1, p.longitude});
    }
    case AnswerKind::entity_set: {
        const auto& t = std::get<EntitySet>(truth.value);
        auto s = t;
        if (!s.empty()) {
            s.erase(s.begin());
        }
        if (s.empty()) {
            s.insert(fabricated(truth.unit, vessels, t));
        }
        return Answer::entities(std::move(s), truth.unit);
    }
    }
    return truth;
}

struct ResultBlock {
    bool ok = false;
    std::vector<std::vector<std::string>> rows; ///< header excluded
};

ResultBlock result_block(const std::string& prompt) {
    ResultBlock out;
    const auto pos = prompt.find("\nResult (");
    if (pos == std::string::npos) {
        return out;
    }
    out.ok = true;
    const auto open = pos + 9;
    const auto n = std::stoul(prompt.substr(open, prompt.find(' ', open) - open));
    auto line_start = prompt.find('\n', open) + 1;
    line_start = prompt.find('\n', line_start) + 1; // skip the header
    for (std::size_t i = 0; i < n; ++i) {
        const auto end = prompt.find('\n', line_start);
        const auto line = prompt.substr(line_start, end - line_start);
        std::vector<std::string> cells;
        std::size_t from = 0;
        while (true) {
            const auto bar = line.find(" | ", from);
            cells.emplace_back(text::trim(line.substr(from, bar == std::string::npos ? std::string::npos : bar - from)));
            if (bar == std::string::npos) {
                break;
            }
            from = bar + 3;
        }
        out.rows.push_back(std::move(cells));
        line_start = end + 1;
    }
    return out;
}

std::string mmsi_of(const std::string& bindings) { return parse_bindings(bindings).at("MMSI"); }

} // namespace

double zsa_accuracy(std::string_view method, std::size_t size) {
    struct Row {
        std::size_t size;
        double p[3];
    };
    static constexpr Row kTable[] = {{5, {0.85, 0.6, 0.55}},   {10, {0.75, 0.55, 0.5}}, {25, {0.6, 0.45, 0.45}},
                                     {50, {0.45, 0.4, 0.35}},  {75, {0.4, 0.35, 0.3}},  {100, {0.35, 0.3, 0.3}}};
    const std::size_t col = method == "zsa1" ? 0 : method == "zsa2" ? 1 : method == "zsa3" ? 2 : 3;
    if (col == 3) {
        throw ConfigError("no ZSA accuracy for method " + std::string{method});
    }
    double p = kTable[0].p[col];
    for (const auto& r : kTable) {
        if (r.size <= size) {
            p = r.p[col];
        }
    }
    return p;
}

bool zsa_intends_correct(std::string_view method, const std::string& query_id, const std::string& bindings,
                         std::size_t size) {
    if (query_id == "Q12") {
        return true;
    }
    if (query_id == "Q16") {
        return false;
    }
    Rng rng(fnv1a(std::string{method} + "|" + query_id + "|" + bindings));
    return rng.uniform() < zsa_accuracy(method, size);
}

bool nlidb_intends_correct(const std::string& query_id) {
    static const std::set<std::string> kCorrect = {"Q1", "Q2",  "Q3",  "Q4",  "Q5",  "Q6",  "Q7", "Q8",
                                                   "Q10", "Q11", "Q12", "Q15", "Q21", "Q23"};
    return kCorrect.contains(query_id);
}

std::string canned_sql(const std::string& query_id, const std::string& bindings) {
    const auto m = [&] { return mmsi_of(bindings); };
    if (query_id == "Q1") return "SELECT name FROM static WHERE mmsi = " + m() + ";";
    if (query_id == "Q2") return "SELECT imo FROM static WHERE mmsi = " + m() + ";";
    if (query_id == "Q3") return "SELECT annual_co2 FROM static WHERE mmsi = " + m() + ";";
    if (query_id == "Q4") return "SELECT count(*) FROM static;";
    if (query_id == "Q5")
        return "SELECT mmsi FROM static\nWHERE length * breadth * draught =\n"
               "  (SELECT max(length * breadth * draught) FROM static)\nORDER BY mmsi;";
    if (query_id == "Q6") return "SELECT co2_per_nm FROM static WHERE mmsi = " + m() + ";";
    if (query_id == "Q7") return "SELECT length * breadth * draught FROM static WHERE mmsi = " + m() + ";";
    if (query_id == "Q8") return "SELECT max(sog) FROM dynamic WHERE mmsi = " + m() + ";";
    if (query_id == "Q10")
        return "SELECT sum(d) / 1000.0 FROM (\n"
               "  SELECT st_distance_m(lag(latitude) OVER w, lag(longitude) OVER w, latitude, longitude) AS d\n"
               "  FROM dynamic WHERE mmsi = " + m() + "\n  WINDOW w AS (ORDER BY time)\n);";
    if (query_id == "Q11")
        return "SELECT avg(sog) * 1.852 FROM dynamic WHERE mmsi = " + m() + " AND sog > 0.1;";
    if (query_id == "Q12")
        return "SELECT latitude, longitude FROM dynamic WHERE mmsi = " + m() + "\nORDER BY time DESC LIMIT 1;";
    if (query_id == "Q15")
        return "SELECT DISTINCT b.mmsi FROM dynamic a\nJOIN dynamic b ON b.time = a.time AND b.mmsi <> a.mmsi\n"
               "WHERE a.mmsi = " + m() +
               " AND st_distance_m(a.latitude, a.longitude, b.latitude, b.longitude) < 500\nORDER BY b.mmsi;";
    if (query_id == "Q21")
        return "SELECT CASE WHEN breadth <= 77.5 AND draught <= 20.1 THEN 'yes' ELSE 'no' END\n"
               "FROM static WHERE mmsi = " + m() + ";";
    if (query_id == "Q23")
        return "SELECT mmsi FROM static\nWHERE co2_per_nm = (SELECT min(co2_per_nm) FROM static)\nORDER BY mmsi;";

    // The rest lean on spatial extensions the backend does not provide.
    if (query_id == "Q9" || query_id == "Q14")
        return "SELECT count(*) FROM dynamic d JOIN ports p\n"
               "  ON ST_DWithin(ST_MakePoint(d.longitude, d.latitude)::geography,\n"
               "                ST_MakePoint(p.longitude, p.latitude)::geography, 2000)\n"
               "WHERE d.mmsi = " + m() + ";";
    if (query_id == "Q13" || query_id == "Q18" || query_id == "Q24")
        return "SELECT sum(EXTRACT(EPOCH FROM time::interval)) / 60 FROM dynamic d\n"
               "WHERE d.mmsi = " + m() +
               " AND NOT EXISTS (SELECT 1 FROM ports p\n"
               "  WHERE ST_DWithin(ST_MakePoint(d.longitude, d.latitude)::geography,\n"
               "                  ST_MakePoint(p.longitude, p.latitude)::geography, 2000));";
    return "SELECT s.mmsi, ST_Length(ST_MakeLine(ST_MakePoint(d.longitude, d.latitude) ORDER BY d.time)::geography)\n"
           "FROM static s JOIN dynamic d ON d.mmsi = s.mmsi\nGROUP BY s.mmsi\nORDER BY 2 DESC;";
}

ScriptedModel::ScriptedModel(const Catalog& catalog, const Layout& layout, const std::vector<std::size_t>& sizes)
    : catalog_(catalog) {
    const auto table = csv::Table::read(layout.ground_truth());
    const auto c_n = table.require("dataset_size");
    const auto c_q = table.require("query_id");
    const auto c_b = table.require("bindings");
    const auto c_p = table.require("payload");
    for (const auto& row : table.rows()) {
        truth_[row.at(c_n) + "|" + row.at(c_q) + "|" + row.at(c_b)] = row.at(c_p);
    }
    for (const auto n : sizes) {
        const auto statics = csv::Table::read(layout.variant(n) / "static.csv");
        const auto c_m = statics.require("mmsi");
        auto& v = vessels_[n];
        for (const auto& row : statics.rows()) {
            v.push_back(row.at(c_m));
        }
    }
}

std::string ScriptedModel::respond(const ChatRequest& request) const {
    const auto& tag = request.tag;
    if (tag.phase == "answer") {
        return zsa_response(request);
    }
    if (tag.phase == "sql" || tag.phase == "regenerate") {
        return "Here is the query.\n\n```sql\n" + canned_sql(tag.query_id, tag.bindings) + "\n```\n";
    }
    if (tag.phase == "interpret") {
        return interpret_response(request);
    }
    throw TransportError("scripted model: unknown phase '" + tag.phase + "'");
}

std::string ScriptedModel::zsa_response(const ChatRequest& request) const {
    const auto& tag = request.tag;
    const auto& spec = catalog_.at(tag.query_id);
    const auto key = std::to_string(tag.dataset_size) + "|" + tag.query_id + "|" + tag.bindings;
    const auto it = truth_.find(key);
    if (it == truth_.end()) {
        throw TransportError("scripted model: no ground truth for " + key);
    }
    const auto truth = parse_payload(spec.answer_kind, spec.unit, spec.numeric_tolerance(), it->second);
    const auto& vessels = vessels_.at(tag.dataset_size);
    const bool correct = zsa_intends_correct(tag.method, tag.query_id, tag.bindings, tag.dataset_size);
    // C = correct, W = wrong, R = refusal; the majority carries the intent
    static constexpr char kCorrectPattern[] = "CCWCR";
    static constexpr char kWrongPattern[] = "WRCWW";
    const char slot = (correct ? kCorrectPattern : kWrongPattern)[request.sample_index % 5];
    switch (slot) {
    case 'C':
        return "Looking at the records for this question.\nAnswer: " + render(truth);
    case 'W':
        return "Based on the data I estimate the following.\nAnswer: " + render(wrong_of(truth, spec, vessels));
    default:
        return std::string{kRefusal};
    }
}

std::string ScriptedModel::interpret_response(const ChatRequest& request) const {
    const auto& spec = catalog_.at(request.tag.query_id);
    const auto block = result_block(request.prompt);
    if (!block.ok) {
        return "The query failed, so I cannot determine the answer.";
    }
    const auto& rows = block.rows;
    const bool empty = rows.empty() || rows.front().empty() || rows.front().front() == "NULL";
    std::string answer;
    switch (spec.answer_kind) {
    case AnswerKind::numeric:
        answer = empty ? "UNKNOWN" : with_unit(text::parse_double(rows.front().front()).value_or(0.0), spec.unit);
        break;
    case AnswerKind::text:
        answer = empty ? "UNKNOWN" : "\"" + rows.front().front() + "\"";
        break;
    case AnswerKind::boolean:
        answer = empty ? "UNKNOWN" : rows.front().front();
        break;
    case AnswerKind::location:
        if (empty || rows.front().size() < 2) {
            answer = "UNKNOWN";
        } else {
            answer = plain(text::parse_double(rows.front()[0]).value_or(0.0)) + " N, " +
                     plain(text::parse_double(rows.front()[1]).value_or(0.0)) + " E";
        }
        break;
    case AnswerKind::entity_set: {
        std::vector<std::string> ids;
        for (const auto& r : rows) {
            if (!r.empty() && r.front() != "NULL") {
                ids.push_back(r.front());
            }
        }
        answer = ids.empty() ? "none" : text::join(ids, ", ");
        break;
    }
    }
    return "The result answers the question directly.\nAnswer: " + answer;
}

} // namespace aisbench::fixture

namespace aisbench::fixture {

std::vector<std::string> intent_mismatches(const Layout& layout) {
    const auto table = csv::Table::read(layout.score_detail());
    const auto c_m = table.require("method");
    const auto c_n = table.require("dataset_size");
    const auto c_q = table.require("query_id");
    const auto c_b = table.require("bindings");
    const auto c_o = table.require("outcome");
    std::vector<std::string> out;
    for (const auto& row : table.rows()) {
        const auto& method = row.at(c_m);
        const auto n = static_cast<std::size_t>(text::parse_int(row.at(c_n)).value_or(0));
        const bool intended = method == "nlidb" ? nlidb_intends_correct(row.at(c_q))
                                                : zsa_intends_correct(method, row.at(c_q), row.at(c_b), n);
        const bool actual = row.at(c_o) == "1";
        if (intended != actual) {
            out.push_back(method + " size " + row.at(c_n) + " " + row.at(c_q) + " [" + row.at(c_b) + "]: intended " +
                          (intended ? "correct" : "wrong") + ", scored " + row.at(c_o));
        }
    }
    return out;
}

} // namespace aisbench::fixture
