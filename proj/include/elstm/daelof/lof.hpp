#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elstm::dae {

/// Local Outlier Factor of every value in a 1-D set under |a - b|.
///
/// The k-neighbourhood of a point holds every other point within its
/// k-distance, so ties can make it larger than k. lrd(a) = 1 / (mean
/// reachability distance + 1e-10 * range(values)); the offset keeps duplicated
/// values finite and scales with the data, so scores are unchanged by shifting
/// or positively rescaling the input.
/// Runs in O(n log n + n k) by scanning outwards from each point in sorted order.
std::vector<double> lof_scores(std::span<const double> values, std::size_t k);

}  // namespace elstm::dae
