#include "aisbench/compress.hpp"

#include "aisbench/error.hpp"

#include <utility>

namespace aisbench {

double synchronized_deviation(const DynamicRecord& p, const DynamicRecord& a, const DynamicRecord& b) {
    const double span = static_cast<double>(b.minute - a.minute);
    const double ratio = span > 0.0 ? static_cast<double>(p.minute - a.minute) / span : 0.0;
    const GeoPoint expected{a.latitude + (b.latitude - a.latitude) * ratio,
                            a.longitude + (b.longitude - a.longitude) * ratio};
    return great_circle_distance(p.position(), expected);
}

std::vector<DynamicRecord> tdtr_compress(std::span<const DynamicRecord> records,
                                         const CompressionConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) {
        throw ConfigError("compression epsilon must be positive");
    }
    if (records.size() < 3) {
        return {records.begin(), records.end()};
    }
    std::vector<bool> keep(records.size(), false);
    keep.front() = true;
    keep.back() = true;

    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, records.size() - 1}};
    while (!stack.empty()) {
        const auto [first, last] = stack.back();
        stack.pop_back();
        if (last - first < 2) {
            continue;
        }
        double worst = -1.0;
        std::size_t split = first;
        for (std::size_t i = first + 1; i < last; ++i) {
            const double d = synchronized_deviation(records[i], records[first], records[last]);
            if (d > worst) {
                worst = d;
                split = i;
            }
        }
        if (worst > cfg.epsilon) {
            keep[split] = true;
            stack.emplace_back(split, last);
            stack.emplace_back(first, split);
        }
    }

    std::vector<DynamicRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) {
            out.push_back(records[i]);
        }
    }
    return out;
}

Trajectory tdtr_compress(const Trajectory& t, const CompressionConfig& cfg) {
    return {t.mmsi, tdtr_compress(std::span<const DynamicRecord>{t.records}, cfg)};
}

} // namespace aisbench
