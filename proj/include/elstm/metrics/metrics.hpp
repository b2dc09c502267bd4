#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "elstm/datapipe/sensor_frame.hpp"

namespace elstm::metrics {

/// Abnormal is the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const data::Label> predicted, std::span<const data::Label> truth);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

/// All values are percentages. PR, RC and F1 are support-weighted averages of
/// the per-class values; `flags` names every metric whose denominator was zero
/// (the metric is then 0).
struct MetricReport {
    double ac = 0.0;
    double pr = 0.0;
    double rc = 0.0;
    double f1 = 0.0;
    double far = 0.0;
    ClassMetrics normal;
    ClassMetrics abnormal;
    ConfusionCounts counts;
    std::vector<std::string> flags;
};

MetricReport compute_metrics(const ConfusionCounts& counts);
MetricReport compute_metrics(std::span<const data::Label> predicted, std::span<const data::Label> truth);

nlohmann::json to_json(const MetricReport& report);

}  // namespace elstm::metrics
