#include "aisbench/llm.hpp"

#include "aisbench/error.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

namespace aisbench {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::zsa1: return "zsa1";
    case Method::zsa2: return "zsa2";
    case Method::zsa3: return "zsa3";
    case Method::nlidb: return "nlidb";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view s) {
    const auto l = text::to_lower(text::trim(s));
    for (const auto m : kAllMethods) {
        if (l == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

std::string_view model_label(Method m) {
    switch (m) {
    case Method::zsa1: return "Raw";
    case Method::zsa2: return "Compressed";
    case Method::zsa3: return "Semantic";
    case Method::nlidb: return "PostGIS";
    }
    return "?";
}

void SamplingConfig::validate() const {
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw ConfigError("temperature must lie in [0, 2]");
    }
    if (samples < 1) {
        throw ConfigError("samples must be at least 1");
    }
    if (max_retries < 0) {
        throw ConfigError("max_retries must be non-negative");
    }
    if (parallelism < 1) {
        throw ConfigError("parallelism must be at least 1");
    }
}

std::size_t estimate_tokens(std::string_view s) { return (s.size() + 3) / 4; }

std::string Prompt::text() const {
    std::string out = system_preamble;
    for (const auto& [label, body] : data_blocks) {
        out += "\n\n### ";
        out += label;
        out += '\n';
        out += body;
    }
    out += "\n\n";
    out += question;
    out += '\n';
    return out;
}

PromptData PromptData::tabular(const DatasetBundle& bundle) {
    return {aisbench::static_csv(bundle.statics), aisbench::dynamic_csv(bundle.dynamic), {},
            aisbench::ports_csv(bundle.ports)};
}

PromptData PromptData::semantic(const DatasetBundle& bundle, std::string events_text) {
    return {aisbench::static_csv(bundle.statics), {}, std::move(events_text), aisbench::ports_csv(bundle.ports)};
}

namespace {

std::string unit_phrase(const std::string& unit) {
    static const std::map<std::string, std::string> phrases = {
        {"id", "the number only"},
        {"t", "tonnes of CO2"},
        {"ships", "a count of ships"},
        {"kg/nm", "kg of CO2 per nautical mile"},
        {"m3", "cubic metres"},
        {"kn", "knots"},
        {"min", "minutes"},
        {"km", "kilometres"},
        {"km/h", "kilometres per hour"},
        {"trips", "a count of round trips"},
        {"kg", "kg of CO2"},
    };
    const auto it = phrases.find(unit);
    return it == phrases.end() ? unit : it->second;
}

std::string_view preamble(Method m) {
    switch (m) {
    case Method::zsa1:
        return "You are a maritime data analyst. The tables below describe the ships in Danish waters over one "
               "day: static ship attributes with CO2 figures, AIS positions sampled every 5 minutes, and port "
               "locations. Answer the question using only this data.";
    case Method::zsa2:
        return "You are a maritime data analyst. The tables below describe the ships in Danish waters over one "
               "day: static ship attributes with CO2 figures, simplified AIS trajectories where positions that "
               "can be interpolated from their neighbours were removed, and port locations. Answer the question "
               "using only this data.";
    case Method::zsa3:
        return "You are a maritime data analyst. The data below describes the ships in Danish waters over one "
               "day: static ship attributes with CO2 figures, each ship's movement as a sequence of zone "
               "events, and port locations. Answer the question using only this data.";
    case Method::nlidb:
        break;
    }
    throw ConfigError("the SQL method does not use data prompts");
}

} // namespace

std::string answer_instruction(const QuerySpec& spec) {
    std::string what;
    switch (spec.answer_kind) {
    case AnswerKind::numeric:
        what = "Answer with a single value in " + unit_phrase(spec.unit) + ".";
        break;
    case AnswerKind::text:
        what = "Answer with the name only.";
        break;
    case AnswerKind::boolean:
        what = "Answer yes or no.";
        break;
    case AnswerKind::location:
        what = "Answer with latitude and longitude in decimal degrees.";
        break;
    case AnswerKind::entity_set:
        if (spec.unit == "pair") {
            what = "Answer with each pair written as MMSI-MMSI, pairs separated by commas, or none.";
        } else if (spec.unit == "group") {
            what = "Answer with each group written as MMSI+MMSI+..., groups separated by commas, or none.";
        } else {
            what = "Answer with the MMSI numbers separated by commas, or none.";
        }
        break;
    }
    return what + " End your reply with a final line of the form 'Answer: <answer>'. If the data does not "
                  "determine the answer, reply 'Answer: UNKNOWN'.";
}

Prompt build_prompt(Method method, const PromptData& data, const QueryInstance& instance,
                    std::size_t max_context_tokens) {
    Prompt p;
    p.system_preamble = std::string{preamble(method)};
    p.data_blocks.emplace_back("static.csv", data.static_csv);
    if (method == Method::zsa3) {
        p.data_blocks.emplace_back("semantic events", data.semantic_text);
    } else {
        p.data_blocks.emplace_back("dynamic.csv", data.dynamic_csv);
    }
    p.data_blocks.emplace_back("ports.csv", data.ports_csv);
    p.question = "Question: " + instance.question() + "\n" + answer_instruction(instance.spec);

    const auto full = p.text();
    p.token_estimate = estimate_tokens(full);
    if (p.token_estimate > max_context_tokens) {
        std::size_t chars = p.system_preamble.size();
        std::string culprit = "question";
        for (const auto& [label, body] : p.data_blocks) {
            chars += label.size() + body.size() + 6;
            if (estimate_tokens(std::string(chars, ' ')) > max_context_tokens) {
                culprit = label;
                break;
            }
        }
        throw ContextOverflowError("prompt for " + instance.spec.id + " needs ~" +
                                       std::to_string(p.token_estimate) + " tokens, budget " +
                                       std::to_string(max_context_tokens) + "; overflow in block '" + culprit + "'",
                                   culprit);
    }
    return p;
}

SampleOutcome sample_one(const std::string& prompt, const SamplingConfig& cfg, Transport& transport,
                         const RequestTag& tag, std::size_t index) {
    SampleOutcome o;
    while (true) {
        ++o.attempts;
        try {
            const auto r = transport.complete({prompt, cfg.temperature, index, tag});
            o.text = r.text;
            o.model_id = r.model_id;
            o.error.clear();
            return o;
        } catch (const TransportError& e) {
            if (!e.transient()) {
                throw;
            }
            o.error = e.what();
            if (o.attempts > cfg.max_retries) {
                return o;
            }
        }
    }
}

std::vector<SampleOutcome> sample(const std::string& prompt, const SamplingConfig& cfg, Transport& transport,
                                  const RequestTag& tag) {
    std::vector<SampleOutcome> out;
    out.reserve(cfg.samples);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        out.push_back(sample_one(prompt, cfg, transport, tag, i));
    }
    return out;
}

namespace {

struct NumberToken {
    double value = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t int_digits = 0;
    bool has_fraction = false;
};

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// "2,5": one or two digits after the comma, so not a thousands group.
bool decimal_comma(std::string_view s, std::size_t i) {
    std::size_t n = 0;
    while (i + 1 + n < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1 + n]))) {
        ++n;
    }
    return n == 1 || n == 2;
}

std::vector<NumberToken> scan_numbers(std::string_view s) {
    std::vector<NumberToken> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const bool digit = std::isdigit(static_cast<unsigned char>(s[i]));
        if (!digit || (i > 0 && (is_word(s[i - 1]) || s[i - 1] == '.'))) {
            ++i;
            continue;
        }
        NumberToken t;
        t.begin = i;
        if (i > 0 && s[i - 1] == '-' && (i < 2 || !is_word(s[i - 2]))) {
            t.begin = i - 1;
        }
        std::string digits;
        int commas = 0;
        while (i < s.size()) {
            if (std::isdigit(static_cast<unsigned char>(s[i]))) {
                digits.push_back(s[i++]);
            } else if (s[i] == ',' && !t.has_fraction && (commas > 0 || digits.size() <= 3) && i + 3 < s.size() &&
                       std::isdigit(static_cast<unsigned char>(s[i + 1])) &&
                       std::isdigit(static_cast<unsigned char>(s[i + 2])) &&
                       std::isdigit(static_cast<unsigned char>(s[i + 3])) &&
                       (i + 4 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 4])))) {
                ++commas;
                ++i; // thousands separator
            } else if ((s[i] == '.' || (s[i] == ',' && commas == 0 && decimal_comma(s, i))) && !t.has_fraction &&
                       i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
                t.int_digits = digits.size();
                t.has_fraction = true;
                digits.push_back('.');
                ++i;
            } else {
                break;
            }
        }
        if (!t.has_fraction) {
            t.int_digits = digits.size();
        }
        t.end = i;
        // times such as 15:30 are not quantities
        const bool time_like = (i < s.size() && s[i] == ':' && i + 1 < s.size() &&
                                std::isdigit(static_cast<unsigned char>(s[i + 1]))) ||
                               (t.begin > 0 && s[t.begin - 1] == ':');
        if (!time_like) {
            t.value = text::parse_double(digits).value_or(0.0);
            if (t.begin < t.end && s[t.begin] == '-') {
                t.value = -t.value;
            }
            out.push_back(t);
        }
    }
    return out;
}

struct UnitAlias {
    std::string_view token;
    double factor; ///< multiply to convert into the expected unit
};

std::vector<UnitAlias> unit_aliases(const std::string& unit) {
    if (unit == "km") {
        return {{"kilometres", 1}, {"kilometers", 1}, {"km", 1}, {"nautical miles", 1.852}, {"nm", 1.852},
                {"metres", 1e-3}, {"meters", 1e-3}, {"m", 1e-3}};
    }
    if (unit == "km/h") {
        return {{"km/h", 1}, {"kph", 1}, {"kmh", 1}, {"kilometres per hour", 1}, {"kilometers per hour", 1},
                {"knots", 1.852}, {"kn", 1.852}, {"kt", 1.852}, {"m/s", 3.6}};
    }
    if (unit == "kn") {
        return {{"knots", 1}, {"kn", 1}, {"kts", 1}, {"kt", 1}, {"km/h", 1 / 1.852}, {"kilometres per hour", 1 / 1.852},
                {"kilometers per hour", 1 / 1.852}};
    }
    if (unit == "min") {
        return {{"minutes", 1}, {"minute", 1}, {"mins", 1}, {"min", 1}, {"hours", 60}, {"hour", 60}, {"hrs", 60},
                {"h", 60}};
    }
    if (unit == "t") {
        return {{"tonnes", 1}, {"tons", 1}, {"tonne", 1}, {"ton", 1}, {"t", 1}, {"kilograms", 1e-3}, {"kg", 1e-3}};
    }
    if (unit == "kg") {
        return {{"kilograms", 1}, {"kg", 1}, {"tonnes", 1000}, {"tons", 1000}, {"tonne", 1000}, {"t", 1000}};
    }
    if (unit == "kg/nm") {
        return {{"kg/nm", 1}, {"kg per nautical mile", 1}, {"kg/nautical mile", 1}};
    }
    if (unit == "m3") {
        return {{"m3", 1}, {"m^3", 1}, {"m\xc2\xb3", 1}, {"cubic metres", 1}, {"cubic meters", 1}};
    }
    return {};
}

// Conversion factor when a known unit follows position `pos`.
std::optional<double> unit_after(std::string_view s, std::size_t pos, const std::vector<UnitAlias>& aliases) {
    while (pos < s.size() && s[pos] == ' ') {
        ++pos;
    }
    const auto rest = text::to_lower(s.substr(pos, 32));
    for (const auto& a : aliases) {
        if (rest.starts_with(a.token)) {
            const auto after = a.token.size();
            const bool bounded = after >= rest.size() || !std::isalpha(static_cast<unsigned char>(rest[after]));
            const bool compound = after < rest.size() && (rest[after] == '/' || rest[after] == '^');
            if (bounded && !compound) {
                return a.factor;
            }
        }
    }
    return std::nullopt;
}

bool contains_any(std::string_view lower, std::initializer_list<std::string_view> needles) {
    return std::any_of(needles.begin(), needles.end(),
                       [&](std::string_view n) { return lower.find(n) != std::string_view::npos; });
}

bool is_refusal(std::string_view lower) {
    return contains_any(lower, {"cannot", "can't", "can not", "unable", "not possible", "don't have",
                                "do not have", "insufficient", "not enough information"});
}

std::string strip_decoration(std::string_view s) {
    auto t = std::string{text::trim(s)};
    const auto strip = [&](char c) {
        while (!t.empty() && t.front() == c) {
            t.erase(0, 1);
        }
        while (!t.empty() && t.back() == c) {
            t.pop_back();
        }
    };
    for (int round = 0; round < 2; ++round) {
        strip('*');
        strip('`');
        t = std::string{text::trim(t)};
        while (!t.empty() && t.back() == '.') {
            t.pop_back();
        }
    }
    return t;
}

Answer parse_numeric(std::string_view region, const std::string& unit, double tolerance) {
    const auto aliases = unit_aliases(unit);
    std::optional<double> with_unit;
    std::optional<double> bare;
    for (const auto& t : scan_numbers(region)) {
        const bool looks_like_mmsi = !t.has_fraction && t.int_digits == 9;
        if (looks_like_mmsi && unit != "id") {
            continue;
        }
        if (const auto f = unit_after(region, t.end, aliases)) {
            with_unit = t.value * *f;
        }
        bare = t.value;
    }
    if (with_unit) {
        return Answer::number(*with_unit, unit, tolerance);
    }
    if (bare) {
        return Answer::number(*bare, unit, tolerance);
    }
    return Answer::unparseable(AnswerKind::numeric, unit);
}

Answer parse_location(std::string_view region) {
    struct Coord {
        double value;
        char hemisphere;
    };
    std::vector<Coord> coords;
    for (const auto& t : scan_numbers(region)) {
        std::size_t p = t.end;
        if (region.substr(p).starts_with("\xc2\xb0")) {
            p += 2;
        }
        while (p < region.size() && region[p] == ' ') {
            ++p;
        }
        char h = 0;
        if (p < region.size()) {
            const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(region[p])));
            const bool alone = p + 1 >= region.size() || !std::isalpha(static_cast<unsigned char>(region[p + 1]));
            if ((c == 'N' || c == 'S' || c == 'E' || c == 'W') && alone) {
                h = c;
            }
        }
        coords.push_back({t.value, h});
    }
    if (coords.size() < 2) {
        return Answer::unparseable(AnswerKind::location);
    }
    auto a = coords[coords.size() - 2];
    auto b = coords[coords.size() - 1];
    if (a.hemisphere == 'E' || a.hemisphere == 'W' || b.hemisphere == 'N' || b.hemisphere == 'S') {
        std::swap(a, b);
    }
    const double lat = a.hemisphere == 'S' ? -std::abs(a.value) : a.value;
    const double lon = b.hemisphere == 'W' ? -std::abs(b.value) : b.value;
    if (std::abs(lat) > 90.0 || std::abs(lon) > 180.0) {
        return Answer::unparseable(AnswerKind::location);
    }
    return Answer::location({lat, lon});
}

Answer parse_boolean(std::string_view region) {
    static const std::regex word(R"(\b(yes|no|true|false)\b)", std::regex::icase);
    const std::string s{region};
    std::optional<bool> last;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), word); it != std::sregex_iterator(); ++it) {
        const auto w = text::to_lower((*it)[1].str());
        last = w == "yes" || w == "true";
    }
    return last ? Answer::flag(*last) : Answer::unparseable(AnswerKind::boolean);
}

Answer parse_entities(std::string_view region, const std::string& element_kind) {
    const std::string s{region};
    EntitySet out;
    if (element_kind == "pair") {
        static const std::regex pair(R"((\d{9})\s*(?:-|&|/|\band\b|\xe2\x80\x93)\s*(\d{9}))", std::regex::icase);
        for (auto it = std::sregex_iterator(s.begin(), s.end(), pair); it != std::sregex_iterator(); ++it) {
            out.insert(pair_id((*it)[1].str(), (*it)[2].str()));
        }
    } else if (element_kind == "group") {
        static const std::regex plus(R"(\d{9}(?:\s*\+\s*\d{9})+)");
        static const std::regex bracket(R"([\[\(\{]([^\]\)\}]*)[\]\)\}])");
        static const std::regex id(R"(\b\d{9}\b)");
        for (const auto* re : {&plus, &bracket}) {
            for (auto it = std::sregex_iterator(s.begin(), s.end(), *re); it != std::sregex_iterator(); ++it) {
                const auto chunk = (*it)[0].str();
                std::set<std::string> members;
                for (auto m = std::sregex_iterator(chunk.begin(), chunk.end(), id); m != std::sregex_iterator();
                     ++m) {
                    members.insert(m->str());
                }
                if (members.size() >= 2) {
                    out.insert(group_id(members));
                }
            }
        }
    } else {
        for (const auto& t : scan_numbers(region)) {
            if (!t.has_fraction && t.int_digits == 9 && region[t.begin] != '-') {
                out.insert(std::string{region.substr(t.begin, t.end - t.begin)});
            }
        }
    }
    if (out.empty()) {
        const auto lower = text::to_lower(region);
        static const std::regex none(R"(\b(none|no ships?|no vessels?|no pairs?|no groups?|empty)\b)");
        if (!std::regex_search(lower, none)) {
            return Answer::unparseable(AnswerKind::entity_set, element_kind);
        }
    }
    return Answer::entities(std::move(out), element_kind);
}

Answer parse_text(std::string_view region, bool marked) {
    const std::string s{region};
    static const std::regex quoted(R"(["“]([^"”]+)["”])");
    std::string picked;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), quoted); it != std::sregex_iterator(); ++it) {
        picked = (*it)[1].str();
    }
    if (picked.empty()) {
        if (marked) {
            picked = s;
        } else if (const auto colon = s.rfind(':'); colon != std::string::npos) {
            picked = s.substr(colon + 1);
        } else {
            const auto nl = s.find_last_of('\n', s.find_last_not_of(" \n\r\t"));
            picked = nl == std::string::npos ? s : s.substr(nl + 1);
        }
    }
    // the first line only; models often append an explanation
    if (const auto nl = text::trim(picked).find('\n'); nl != std::string_view::npos) {
        picked = std::string{text::trim(picked).substr(0, nl)};
    }
    picked = strip_decoration(picked);
    if (picked.empty()) {
        return Answer::unparseable(AnswerKind::text);
    }
    return Answer::label(picked);
}

} // namespace

Answer parse_answer(std::string_view response, AnswerKind kind, const std::string& unit, double tolerance) {
    const auto lower = text::to_lower(response);
    const auto marker = lower.rfind("answer:");
    const bool marked = marker != std::string::npos;
    const auto region = marked ? response.substr(marker + 7) : response;
    if (!marked && is_refusal(lower)) {
        return Answer::unparseable(kind, unit);
    }
    if (text::starts_with_icase(strip_decoration(region), "unknown")) {
        return Answer::unknown_value(kind, unit);
    }
    switch (kind) {
    case AnswerKind::numeric: return parse_numeric(region, unit, tolerance);
    case AnswerKind::location: return parse_location(region);
    case AnswerKind::boolean: return parse_boolean(region);
    case AnswerKind::entity_set: return parse_entities(region, unit);
    case AnswerKind::text: return parse_text(region, marked);
    }
    return Answer::unparseable(kind, unit);
}

Answer parse_answer(std::string_view text, const QuerySpec& spec) {
    return parse_answer(text, spec.answer_kind, spec.unit, spec.numeric_tolerance());
}

Aggregate aggregate(const std::vector<Answer>& answers, AnswerKind kind, const std::string& unit, double tolerance) {
    Aggregate out;
    out.answer = Answer::unparseable(kind, unit);
    std::vector<const Answer*> usable;
    for (const auto& a : answers) {
        if (a.parseable() && a.kind == kind) {
            usable.push_back(&a);
        }
    }
    out.parseable = usable.size();
    if (usable.empty()) {
        return out;
    }
    if (kind == AnswerKind::numeric) {
        std::vector<double> values;
        for (const auto* a : usable) {
            if (const auto* v = std::get_if<double>(&a->value)) {
                values.push_back(*v);
            }
        }
        if (values.size() * 2 < usable.size()) {
            out.answer = Answer::unknown_value(kind, unit);
            return out;
        }
        std::sort(values.begin(), values.end());
        const auto n = values.size();
        const double median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
        out.answer = Answer::number(median, unit, tolerance);
        return out;
    }
    // mode, with the earliest-seen key first among equals
    std::vector<std::pair<std::string, std::size_t>> counts;
    std::vector<const Answer*> first;
    for (const auto* a : usable) {
        const auto key = canonical_key(*a);
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == key; });
        if (it == counts.end()) {
            counts.emplace_back(key, 1);
            first.push_back(a);
        } else {
            ++it->second;
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i].second > counts[best].second) {
            best = i;
        }
    }
    out.tie = std::count_if(counts.begin(), counts.end(),
                            [&](const auto& c) { return c.second == counts[best].second; }) > 1;
    out.answer = *first[best];
    return out;
}

} // namespace aisbench
