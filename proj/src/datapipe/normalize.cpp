#include "elstm/datapipe/normalize.hpp"

#include <cmath>

#include "elstm/error.hpp"
#include "elstm/log.hpp"

namespace elstm::data {

namespace {

void require_width(const SensorFrame& frame, const NormalizationStats& stats) {
    if (stats.mean.size() != frame.values.cols() || stats.stddev.size() != frame.values.cols()) {
        throw DimensionError("normalizer: stats cover " + std::to_string(stats.mean.size()) +
                             " features, frame has " + std::to_string(frame.values.cols()));
    }
}

}  // namespace

NormalizationStats fit_normalizer(const SensorFrame& frame) {
    const std::size_t n = frame.samples();
    const std::size_t f = frame.values.cols();
    if (n == 0) throw DataQualityError("fit_normalizer: empty frame");
    NormalizationStats stats;
    stats.mean.assign(f, 0.0);
    stats.stddev.assign(f, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = frame.values.row(r);
        for (std::size_t c = 0; c < f; ++c) stats.mean[c] += row[c];
    }
    for (double& m : stats.mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = frame.values.row(r);
        for (std::size_t c = 0; c < f; ++c) {
            const double d = row[c] - stats.mean[c];
            stats.stddev[c] += d * d;
        }
    }
    for (std::size_t c = 0; c < f; ++c) {
        stats.stddev[c] = std::sqrt(stats.stddev[c] / static_cast<double>(n));
        if (!(stats.stddev[c] >= kStdFloor)) {
            stats.stddev[c] = kStdFloor;
            stats.floored.push_back(c);
            const std::string name = c < frame.feature_names.size() ? frame.feature_names[c] : std::to_string(c);
            log::warn("fit_normalizer: feature '" + name + "' is constant; standard deviation floored");
        }
    }
    return stats;
}

SensorFrame apply_normalizer(const SensorFrame& frame, const NormalizationStats& stats) {
    require_width(frame, stats);
    SensorFrame out = frame;
    for (std::size_t r = 0; r < out.samples(); ++r) {
        auto row = out.values.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - stats.mean[c]) / stats.stddev[c];
    }
    return out;
}

SensorFrame invert_normalizer(const SensorFrame& frame, const NormalizationStats& stats) {
    require_width(frame, stats);
    SensorFrame out = frame;
    for (std::size_t r = 0; r < out.samples(); ++r) {
        auto row = out.values.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * stats.stddev[c] + stats.mean[c];
    }
    return out;
}

}  // namespace elstm::data
