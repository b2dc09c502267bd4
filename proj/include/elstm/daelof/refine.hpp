#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "elstm/datapipe/sensor_frame.hpp"

namespace elstm::dae {

struct LofConfig {
    std::size_t k_neighbors = 20;
    /// Fraction of samples removed, in [0, 0.5].
    double contamination = 0.2;
};

/// Throws ConfigError unless 1 <= k < n and 0 <= contamination <= 0.5.
void validate(const LofConfig& cfg, std::size_t n);

/// round(contamination * n).
std::size_t removal_count(double contamination, std::size_t n);

struct RefinementReport {
    bool skipped = false;
    std::size_t k_neighbors = 0;
    double contamination = 0.0;
    std::vector<double> errors;
    std::vector<double> scores;
    /// Removed (h) and retained (q) sample indices, ascending.
    std::vector<std::size_t> removed;
    std::vector<std::size_t> retained;
};

struct RefineResult {
    data::SensorFrame frame;
    RefinementReport report;
};

/// Removes the round(C * n) samples with the highest LOF scores, ties going to
/// the larger reconstruction error and then the lower index. The remaining
/// rows keep their original order.
RefineResult select_refined(const data::SensorFrame& frame, std::span<const double> errors,
                            std::span<const double> scores, const LofConfig& cfg);

/// Scores `errors` with lof_scores, then select_refined. C = 0 returns the
/// frame unchanged without scoring.
RefineResult refine(const data::SensorFrame& frame, std::span<const double> errors, const LofConfig& cfg);

/// Report with every sample retained, for runs that skip selection.
RefinementReport skipped_report(std::size_t n);

nlohmann::json to_json(const RefinementReport& report);

}  // namespace elstm::dae
