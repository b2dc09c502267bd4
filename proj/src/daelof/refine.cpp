#include "elstm/daelof/refine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "elstm/daelof/lof.hpp"
#include "elstm/error.hpp"

namespace elstm::dae {

void validate(const LofConfig& cfg, std::size_t n) {
    if (!(cfg.contamination >= 0.0 && cfg.contamination <= 0.5)) {
        throw ConfigError("contamination must lie in [0, 0.5], got " + std::to_string(cfg.contamination));
    }
    if (cfg.k_neighbors == 0) throw ConfigError("LOF k_neighbors must be >= 1");
    if (cfg.contamination > 0.0 && cfg.k_neighbors >= n) {
        throw ConfigError("LOF k_neighbors = " + std::to_string(cfg.k_neighbors) + " must be below the sample count " +
                          std::to_string(n));
    }
}

std::size_t removal_count(double contamination, std::size_t n) {
    return static_cast<std::size_t>(std::llround(contamination * static_cast<double>(n)));
}

RefineResult select_refined(const data::SensorFrame& frame, std::span<const double> errors,
                            std::span<const double> scores, const LofConfig& cfg) {
    const std::size_t n = frame.samples();
    validate(cfg, n);
    if (errors.size() != n || scores.size() != n) {
        throw DimensionError("select_refined: " + std::to_string(n) + " samples but " + std::to_string(errors.size()) +
                             " errors and " + std::to_string(scores.size()) + " scores");
    }
    RefineResult out;
    RefinementReport& rep = out.report;
    rep.k_neighbors = cfg.k_neighbors;
    rep.contamination = cfg.contamination;
    rep.errors.assign(errors.begin(), errors.end());
    rep.scores.assign(scores.begin(), scores.end());

    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (errors[a] != errors[b]) return errors[a] > errors[b];
        return a < b;
    });
    const std::size_t h = removal_count(cfg.contamination, n);
    std::vector<bool> removed(n, false);
    for (std::size_t i = 0; i < h; ++i) removed[rank[i]] = true;
    for (std::size_t i = 0; i < n; ++i) (removed[i] ? rep.removed : rep.retained).push_back(i);
    out.frame = frame.select(rep.retained);
    return out;
}

RefineResult refine(const data::SensorFrame& frame, std::span<const double> errors, const LofConfig& cfg) {
    validate(cfg, frame.samples());
    if (cfg.contamination == 0.0) {
        if (errors.size() != frame.samples()) throw DimensionError("refine: error count does not match samples");
        RefineResult out{frame, skipped_report(frame.samples())};
        out.report.skipped = false;
        out.report.k_neighbors = cfg.k_neighbors;
        out.report.errors.assign(errors.begin(), errors.end());
        return out;
    }
    const std::vector<double> scores = lof_scores(errors, cfg.k_neighbors);
    return select_refined(frame, errors, scores, cfg);
}

RefinementReport skipped_report(std::size_t n) {
    RefinementReport rep;
    rep.skipped = true;
    rep.retained.resize(n);
    std::iota(rep.retained.begin(), rep.retained.end(), std::size_t{0});
    return rep;
}

nlohmann::json to_json(const RefinementReport& report) {
    return {{"skipped", report.skipped},
            {"k_neighbors", report.k_neighbors},
            {"contamination", report.contamination},
            {"samples", report.removed.size() + report.retained.size()},
            {"removed_count", report.removed.size()},
            {"removed", report.removed},
            {"errors", report.errors},
            {"scores", report.scores}};
}

}  // namespace elstm::dae
