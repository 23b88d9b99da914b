#include "aisbench/catalog.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/digest.hpp"
#include "aisbench/error.hpp"
#include "aisbench/random.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <sstream>

namespace aisbench {

std::string_view to_string(Category c) {
    switch (c) {
    case Category::attribute: return "attribute";
    case Category::individual_trajectory: return "individual_trajectory";
    case Category::interaction: return "interaction";
    case Category::data_fusion: return "data_fusion";
    }
    return "attribute";
}

std::optional<Category> parse_category(std::string_view s) {
    for (const auto c : {Category::attribute, Category::individual_trajectory, Category::interaction,
                         Category::data_fusion}) {
        if (to_string(c) == text::trim(s)) {
            return c;
        }
    }
    return std::nullopt;
}

int QuerySpec::number() const {
    return id.size() > 1 ? static_cast<int>(text::parse_int(std::string_view{id}.substr(1)).value_or(0)) : 0;
}

std::vector<std::string> QuerySpec::placeholders() const {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = template_text.find('[', pos)) != std::string::npos) {
        const auto end = template_text.find(']', pos);
        if (end == std::string::npos) {
            break;
        }
        const auto name = template_text.substr(pos + 1, end - pos - 1);
        const bool is_name = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
            return (c >= 'A' && c <= 'Z') || c == '_';
        });
        if (is_name && std::find(out.begin(), out.end(), name) == out.end()) {
            out.push_back(name);
        }
        pos = end + 1;
    }
    return out;
}

std::string bindings_key(const Bindings& b) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : b) {
        parts.push_back(k + "=" + v);
    }
    return text::join(parts, ";");
}

Bindings parse_bindings(std::string_view key) {
    Bindings b;
    if (text::trim(key).empty()) {
        return b;
    }
    for (const auto& part : text::split(key, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) {
            throw DataError("malformed bindings '" + std::string{key} + "'");
        }
        b.emplace(part.substr(0, eq), part.substr(eq + 1));
    }
    return b;
}

std::string QueryInstance::question() const {
    std::string out = spec.template_text;
    for (const auto& [name, value] : bindings) {
        const std::string token = "[" + name + "]";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::optional<Mmsi> QueryInstance::probe() const {
    const auto it = bindings.find(std::string{kMmsiPlaceholder});
    if (it == bindings.end()) {
        return std::nullopt;
    }
    return parse_mmsi(it->second);
}

QueryInstance instantiate(const QuerySpec& spec, Bindings bindings, std::size_t dataset_size) {
    for (const auto& name : spec.placeholders()) {
        if (!bindings.contains(name)) {
            throw ConfigError(spec.id + ": missing binding for placeholder [" + name + "]");
        }
    }
    return {spec, std::move(bindings), dataset_size};
}

Catalog Catalog::load(const std::filesystem::path& path) {
    return parse(text::read_file(path), path.string());
}

Catalog Catalog::parse(std::string_view csv_text, const std::string& source) {
    std::istringstream in{std::string{csv_text}};
    const auto table = csv::Table::parse(in, source);
    const auto c_id = table.require("id");
    const auto c_cat = table.require("category");
    const auto c_tpl = table.require("template");
    const auto c_kind = table.require("answer_kind");
    const auto c_unit = table.require("unit");
    const auto c_mode = table.require("oracle_mode");
    const auto c_app = table.require("applicability");
    const auto c_tol = table.find("tolerance");

    Catalog cat;
    for (const auto& row : table.rows()) {
        auto cell = [&row](std::optional<std::size_t> c) -> std::string {
            return c && *c < row.size() ? std::string{text::trim(row[*c])} : std::string{};
        };
        QuerySpec s;
        s.id = cell(c_id);
        const auto category = parse_category(cell(c_cat));
        const auto kind = parse_answer_kind(cell(c_kind));
        const auto mode = cell(c_mode);
        if (!category || !kind || (mode != "computed" && mode != "expert_fixture")) {
            throw DataError(source + ": malformed entry " + s.id);
        }
        s.category = *category;
        s.template_text = cell(c_tpl);
        s.answer_kind = *kind;
        s.unit = cell(c_unit);
        s.oracle_mode = mode == "computed" ? OracleMode::computed : OracleMode::expert_fixture;
        s.applicability = cell(c_app).empty() ? "any" : cell(c_app);
        if (const auto tol = cell(c_tol); !tol.empty()) {
            s.tolerance = text::parse_double(tol);
            if (!s.tolerance || *s.tolerance < 0.0 || *s.tolerance > 1.0) {
                throw DataError(source + ": tolerance of " + s.id + " must lie in [0, 1]");
            }
        }
        if (s.number() <= 0) {
            throw DataError(source + ": bad query id '" + s.id + "'");
        }
        cat.specs_.push_back(std::move(s));
    }
    std::sort(cat.specs_.begin(), cat.specs_.end(),
              [](const QuerySpec& a, const QuerySpec& b) { return a.number() < b.number(); });
    for (std::size_t i = 1; i < cat.specs_.size(); ++i) {
        if (cat.specs_[i].id == cat.specs_[i - 1].id) {
            throw DataError(source + ": duplicate query " + cat.specs_[i].id);
        }
    }
    return cat;
}

const QuerySpec& Catalog::at(std::string_view id) const {
    for (const auto& s : specs_) {
        if (s.id == id) {
            return s;
        }
    }
    throw DataError("unknown query " + std::string{id});
}

std::string Catalog::to_csv() const {
    csv::Writer w({"id", "category", "template", "answer_kind", "unit", "oracle_mode", "applicability",
                   "tolerance"});
    for (const auto& s : specs_) {
        w.add({s.id, std::string{to_string(s.category)}, s.template_text, std::string{to_string(s.answer_kind)},
               s.unit, s.oracle_mode == OracleMode::computed ? "computed" : "expert_fixture",
               s.applicability, s.tolerance ? text::shortest(*s.tolerance) : ""});
    }
    return w.str();
}

std::vector<QueryInstance> probe_plan(const std::vector<QuerySpec>& specs, const DatasetBundle& dataset,
                                      std::size_t k, std::uint64_t seed, const ApplicabilityFn& applicable,
                                      std::vector<std::string>* log) {
    if (dataset.size() == 0) {
        throw DataError("probe_plan: empty dataset");
    }
    std::vector<QueryInstance> plan;
    for (const auto& spec : specs) {
        if (!spec.parameterized()) {
            plan.push_back(instantiate(spec, {}, dataset.size()));
            continue;
        }
        std::vector<Mmsi> candidates;
        for (const auto& t : dataset.dynamic) {
            if (applicable(spec, t.mmsi)) {
                candidates.push_back(t.mmsi);
            }
        }
        Rng rng(seed ^ fnv1a(spec.id));
        rng.shuffle(candidates);
        if (candidates.size() < k && log) {
            log->push_back(spec.id + ": only " + std::to_string(candidates.size()) + " applicable vessel(s) for " +
                           std::to_string(k) + " probes (" + spec.applicability + ")");
        }
        candidates.resize(std::min(candidates.size(), k));
        for (const auto m : candidates) {
            plan.push_back(instantiate(spec, {{std::string{kMmsiPlaceholder}, m.str()}}, dataset.size()));
        }
    }
    return plan;
}

} // namespace aisbench
