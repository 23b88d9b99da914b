#include "aisbench/nlidb.hpp"

#include "aisbench/text.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace aisbench {

SchemaCard SchemaCard::describe(const SqlBackend& backend, std::size_t sample_rows) {
    std::string t = "Database schema:\n";
    t += schema_ddl();
    t += "\nColumn notes:\n"
         "- static: one row per ship. length, breadth and draught in metres; annual_co2 in tonnes of CO2 per "
         "year; co2_per_nm in kg of CO2 per nautical mile; missing values are NULL.\n"
         "- dynamic: one AIS position per ship per 5-minute slot of the day; time is 'HH:MM'; sog is speed "
         "over ground in knots.\n"
         "- ports: port reference positions; a ship within 2000 m of a port position is in that port.\n";
    t += "Dialect: " + backend.dialect_notes() + "\n";
    const SqlLimits limits;
    for (const auto* table : {"static", "dynamic", "ports"}) {
        const auto r = backend.query(std::string("SELECT * FROM ") + table + " ORDER BY rowid LIMIT " +
                                         std::to_string(sample_rows),
                                     limits);
        t += "Sample rows from ";
        t += table;
        t += ":\n";
        t += r.ok ? render_rows(r) : "(unavailable: " + r.error + ")\n";
    }
    return {t};
}

std::optional<std::string> extract_sql(std::string_view response) {
    const std::string s{response};
    static const std::regex fence(R"(```[ \t]*([A-Za-z]*)[^\n]*\n([\s\S]*?)```)");
    std::optional<std::string> fenced_any;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), fence); it != std::sregex_iterator(); ++it) {
        const auto lang = text::to_lower((*it)[1].str());
        const auto body = std::string{text::trim((*it)[2].str())};
        if (lang == "sql" && !body.empty()) {
            return body;
        }
        const auto lower = text::to_lower(body);
        if (!fenced_any && (lower.starts_with("select") || lower.starts_with("with"))) {
            fenced_any = body;
        }
    }
    if (fenced_any) {
        return fenced_any;
    }
    static const std::regex start(R"(\b(select|with)\b)", std::regex::icase);
    std::string best;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), start); it != std::sregex_iterator(); ++it) {
        const auto from = static_cast<std::size_t>(it->position());
        auto to = s.find(';', from);
        const auto blank = s.find("\n\n", from);
        to = std::min(to, blank);
        auto span = std::string{text::trim(std::string_view{s}.substr(from, to == std::string::npos ? to : to - from))};
        if (span.size() > best.size()) {
            best = std::move(span);
        }
    }
    // without a fence, prose that merely says "select" is not a statement
    static const std::regex from(R"(\bfrom\b)", std::regex::icase);
    if (best.empty() || !std::regex_search(best, from)) {
        return std::nullopt;
    }
    return best;
}

std::string render_rows(const SqlResult& result) {
    std::vector<std::size_t> width(result.columns.size(), 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    };
    widen(result.columns);
    for (const auto& r : result.rows) {
        widen(r);
    }
    auto line = [&](const std::vector<std::string>& row) {
        std::string out;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out += " | ";
            }
            out += row[c];
            if (c + 1 < row.size()) {
                out.append(width[c] - row[c].size(), ' ');
            }
        }
        return out + "\n";
    };
    std::string out = line(result.columns);
    for (const auto& r : result.rows) {
        out += line(r);
    }
    return out;
}

SqlExchange execute_sql(std::string_view sql, const SqlBackend& backend, const SqlLimits& limits) {
    SqlExchange ex;
    ex.generated_sql = std::string{sql};
    const auto r = backend.query(sql, limits);
    ex.ok = r.ok;
    ex.error = r.error;
    ex.truncated = r.truncated;
    if (r.ok) {
        ex.result_rows = render_rows(r);
    }
    return ex;
}

std::string generation_prompt(const QueryInstance& instance, const SchemaCard& schema) {
    return "You translate questions about ship traffic into a single SQL query.\n\n" + schema.text +
           "\nQuestion: " + instance.question() +
           "\nReply with one SELECT statement inside a ```sql code block.\n";
}

std::string regeneration_prompt(const QueryInstance& instance, const SchemaCard& schema,
                                const SqlExchange& failed) {
    return generation_prompt(instance, schema) + "\nA previous attempt failed.\nSQL:\n" + failed.generated_sql +
           "\nError: " + failed.error + "\nWrite a corrected query.\n";
}

std::string interpretation_prompt(const QueryInstance& instance, const SqlExchange& exchange) {
    std::string p = "A SQL query was run to answer a question about ship traffic. Use its result to answer.\n\n";
    p += "Question: " + instance.question() + "\n";
    p += "SQL:\n" + exchange.generated_sql + "\n";
    if (exchange.ok) {
        const auto rows = std::count(exchange.result_rows.begin(), exchange.result_rows.end(), '\n') - 1;
        p += "Result (" + std::to_string(rows) + " rows" + (exchange.truncated ? ", truncated" : "") + "):\n";
        p += exchange.result_rows;
    } else {
        p += "Error: " + exchange.error + "\n";
    }
    p += answer_instruction(instance.spec);
    p += "\n";
    return p;
}

NlidbResult run_nlidb(const QueryInstance& instance, const SchemaCard& schema, const SqlBackend& backend,
                      Transport& transport, const SamplingConfig& cfg, const SqlLimits& limits, RequestTag tag) {
    NlidbResult out;
    const auto& spec = instance.spec;
    tag.phase = "sql";
    const auto generated = sample(generation_prompt(instance, schema), cfg, transport, tag);
    std::vector<Answer> answers;
    for (std::size_t i = 0; i < generated.size(); ++i) {
        NlidbCandidate c;
        c.answer = Answer::unparseable(spec.answer_kind, spec.unit);
        const auto& g = generated[i];
        auto sql = g.text ? extract_sql(*g.text) : std::nullopt;
        if (!sql) {
            c.failure = g.text ? "no SQL in response" : g.error;
            answers.push_back(c.answer);
            out.candidates.push_back(std::move(c));
            continue;
        }
        c.exchange = execute_sql(*sql, backend, limits);
        if (!c.exchange.ok) {
            tag.phase = "regenerate";
            const auto retry = sample_one(regeneration_prompt(instance, schema, c.exchange), cfg, transport, tag, i);
            c.regenerated = true;
            if (const auto sql2 = retry.text ? extract_sql(*retry.text) : std::nullopt) {
                c.exchange = execute_sql(*sql2, backend, limits);
            }
        }
        tag.phase = "interpret";
        const auto interp = sample_one(interpretation_prompt(instance, c.exchange), cfg, transport, tag, i);
        if (interp.text) {
            c.exchange.interpretation = *interp.text;
            c.answer = parse_answer(*interp.text, spec);
        } else {
            c.failure = interp.error;
        }
        answers.push_back(c.answer);
        out.candidates.push_back(std::move(c));
    }
    out.aggregate = aggregate(answers, spec.answer_kind, spec.unit, spec.numeric_tolerance());
    return out;
}

} // namespace aisbench
