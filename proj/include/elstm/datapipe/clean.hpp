#pragma once

#include <cstddef>
#include <vector>

#include "elstm/datapipe/sensor_frame.hpp"

namespace elstm::data {

struct CleanReport {
    /// Indices (into the input frame) of rows that were dropped.
    std::vector<std::size_t> removed_rows;
    /// Non-finite entries seen per feature.
    std::vector<std::size_t> bad_per_feature;
};

struct CleanResult {
    SensorFrame frame;
    CleanReport report;
};

/// Drops every row holding a NaN, Inf or missing value. Refuses with
/// DataQualityError when more than `max_removed_fraction` of rows would go.
CleanResult clean(const SensorFrame& frame, double max_removed_fraction = 0.5);

}  // namespace elstm::data
