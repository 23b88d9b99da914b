#include "aisbench/eval.hpp"

#include "aisbench/csv.hpp"
#include "aisbench/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace aisbench {

double absolute_floor(const std::string& unit) {
    static const std::map<std::string, double> floors = {
        {"km", 0.5}, {"km/h", 0.5}, {"kn", 0.2}, {"min", 5.0}, {"t", 1.0},
        {"kg", 10.0}, {"kg/nm", 1.0}, {"m3", 10.0},
    };
    const auto it = floors.find(unit);
    return it == floors.end() ? 1.0 : it->second;
}

int match(const Answer& predicted, const Answer& truth, const MatchConfig& cfg) {
    if (!predicted.parseable() || !truth.parseable() || predicted.kind != truth.kind) {
        return 0;
    }
    if (predicted.unknown() || truth.unknown()) {
        return predicted.unknown() && truth.unknown() ? 1 : 0;
    }
    switch (truth.kind) {
    case AnswerKind::numeric: {
        const double p = std::get<double>(predicted.value);
        const double t = std::get<double>(truth.value);
        const double allowed = truth.tolerance * std::max(std::abs(t), absolute_floor(truth.unit));
        return std::abs(p - t) <= allowed ? 1 : 0;
    }
    case AnswerKind::text:
        return canonical_text(std::get<std::string>(predicted.value)) ==
                       canonical_text(std::get<std::string>(truth.value))
                   ? 1
                   : 0;
    case AnswerKind::boolean:
        return std::get<bool>(predicted.value) == std::get<bool>(truth.value) ? 1 : 0;
    case AnswerKind::location:
        return great_circle_distance(std::get<GeoPoint>(predicted.value), std::get<GeoPoint>(truth.value)) <=
                       cfg.location_radius
                   ? 1
                   : 0;
    case AnswerKind::entity_set: {
        const auto& p = std::get<EntitySet>(predicted.value);
        const auto& t = std::get<EntitySet>(truth.value);
        if (p.empty() && t.empty()) {
            return 1;
        }
        std::size_t common = 0;
        for (const auto& e : p) {
            common += t.count(e);
        }
        const double jaccard = static_cast<double>(common) / static_cast<double>(p.size() + t.size() - common);
        return jaccard >= cfg.set_threshold ? 1 : 0;
    }
    }
    return 0;
}

double score_query(std::span<const int> outcomes) {
    if (outcomes.empty()) {
        return 0.0;
    }
    return static_cast<double>(std::accumulate(outcomes.begin(), outcomes.end(), 0)) /
           static_cast<double>(outcomes.size());
}

std::string_view report_name(Category c) {
    switch (c) {
    case Category::attribute: return "attribute";
    case Category::individual_trajectory: return "individual-trajectory";
    case Category::interaction: return "ship-interaction";
    case Category::data_fusion: return "fusion";
    }
    return "?";
}

Report build_report(const std::vector<ScoreRow>& rows, const std::vector<QuerySpec>& specs,
                    const std::vector<Method>& methods, const std::vector<std::size_t>& sizes,
                    const std::string& run_id) {
    std::map<std::tuple<Method, std::size_t, std::string>, double> cell;
    for (const auto& r : rows) {
        std::vector<int> outcomes;
        for (const auto& d : r.detail) {
            outcomes.push_back(d.outcome);
        }
        cell[{r.method, r.dataset_size, r.query_id}] = score_query(outcomes);
    }

    Report report;
    constexpr Category kCategories[] = {Category::attribute, Category::individual_trajectory,
                                        Category::interaction, Category::data_fusion};
    csv::Writer all({"dataset_size", "run_id", "score", "model"});
    std::map<Category, csv::Writer> per_category;
    for (const auto c : kCategories) {
        per_category.emplace(c, csv::Writer({"category", "dataset_size", "score", "model"}));
    }
    for (const auto m : methods) {
        const std::string label{model_label(m)};
        csv::Writer radar({"query_id", "dataset_size", "score"});
        for (const auto n : sizes) {
            std::vector<double> overall;
            std::map<Category, std::vector<double>> by_category;
            std::vector<std::string> missing;
            for (const auto& spec : specs) {
                const auto it = cell.find({m, n, spec.id});
                if (it == cell.end()) {
                    missing.push_back(spec.id);
                    continue;
                }
                overall.push_back(it->second);
                by_category[spec.category].push_back(it->second);
                radar.add({spec.id, std::to_string(n), text::fixed(it->second, 4)});
            }
            if (!missing.empty()) {
                report.gaps.push_back(std::string{to_string(m)} + " size " + std::to_string(n) + ": missing " +
                                      text::join(missing, " "));
            }
            auto mean = [](const std::vector<double>& v) {
                return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            };
            all.add({std::to_string(n), run_id, text::fixed(mean(overall), 4), label});
            for (const auto c : kCategories) {
                per_category.at(c).add(
                    {std::string{report_name(c)}, std::to_string(n), text::fixed(mean(by_category[c]), 4), label});
            }
        }
        report.files["radar_" + std::string{to_string(m)} + ".csv"] = radar.str();
    }
    report.files["all.csv"] = all.str();
    for (const auto c : kCategories) {
        report.files[std::string{report_name(c)} + ".csv"] = per_category.at(c).str();
    }
    return report;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : report.files) {
        text::write_file(dir / name, body);
    }
    const auto gaps = dir / "gaps.txt";
    if (report.gaps.empty()) {
        std::filesystem::remove(gaps);
    } else {
        text::write_file(gaps, text::join(report.gaps, "\n") + "\n");
    }
}

} // namespace aisbench
