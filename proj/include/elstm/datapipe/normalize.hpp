#pragma once

#include <cstddef>
#include <vector>

#include "elstm/datapipe/sensor_frame.hpp"

namespace elstm::data {

inline constexpr double kStdFloor = 1e-8;

/// Per-feature z-score statistics.
struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;
    /// Features whose standard deviation was raised to kStdFloor.
    std::vector<std::size_t> floored;

    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

/// Population mean and standard deviation per feature. Callers fit on
/// training data only. Constant features are floored and logged as a warning.
NormalizationStats fit_normalizer(const SensorFrame& frame);
SensorFrame apply_normalizer(const SensorFrame& frame, const NormalizationStats& stats);
SensorFrame invert_normalizer(const SensorFrame& frame, const NormalizationStats& stats);

}  // namespace elstm::data
