#include "elstm/datapipe/clean.hpp"

#include <cmath>

#include "elstm/error.hpp"

namespace elstm::data {

CleanResult clean(const SensorFrame& frame, double max_removed_fraction) {
    const std::size_t n = frame.samples();
    const std::size_t f = frame.values.cols();
    CleanResult result;
    result.report.bad_per_feature.assign(frame.features(), 0);

    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = true;
        auto row = frame.values.row(r);
        for (std::size_t c = 0; c < f; ++c) {
            if (!std::isfinite(row[c])) {
                ++result.report.bad_per_feature[c];
                ok = false;
            }
        }
        if (ok) {
            keep.push_back(r);
        } else {
            result.report.removed_rows.push_back(r);
        }
    }
    const double removed = static_cast<double>(result.report.removed_rows.size());
    if (n > 0 && removed > max_removed_fraction * static_cast<double>(n)) {
        throw DataQualityError("clean: " + std::to_string(result.report.removed_rows.size()) + " of " +
                               std::to_string(n) + " rows contain bad values (limit " +
                               std::to_string(max_removed_fraction * 100.0) + "%)");
    }
    result.frame = result.report.removed_rows.empty() ? frame : frame.select(keep);
    return result;
}

}  // namespace elstm::data
