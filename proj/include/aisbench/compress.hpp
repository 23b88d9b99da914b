#pragma once

#include "aisbench/ingest.hpp"

#include <span>
#include <vector>

namespace aisbench {

struct CompressionConfig {
    double epsilon = 200.0; ///< m, maximum synchronized deviation of a dropped point
};

/// Distance between `p` and the position interpolated between `a` and `b` at
/// p's time ratio. Requires a.minute <= p.minute <= b.minute, a.minute < b.minute.
[[nodiscard]] double synchronized_deviation(const DynamicRecord& p, const DynamicRecord& a,
                                            const DynamicRecord& b);

/// Top-Down Time Ratio simplification: keep the endpoints, split at the
/// interior point of largest synchronized deviation while it exceeds epsilon.
/// Surviving records are copied unchanged (sog included). Inputs with fewer
/// than three records come back as they are.
[[nodiscard]] std::vector<DynamicRecord> tdtr_compress(std::span<const DynamicRecord> records,
                                                       const CompressionConfig& cfg);
[[nodiscard]] Trajectory tdtr_compress(const Trajectory& t, const CompressionConfig& cfg);

} // namespace aisbench
