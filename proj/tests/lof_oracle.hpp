#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace elstm::test {

// Direct O(n^2) Local Outlier Factor over 1-D values. The k-neighbourhood of a
// point is every other point no farther than its k-th nearest neighbour, and
// lrd carries the same 1e-10 * range regularizer as the library.
inline std::vector<double> brute_force_lof(const std::vector<double>& x, std::size_t k) {
    const std::size_t n = x.size();
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double range = *hi - *lo;
    const double offset = 1e-10 * (range > 0.0 ? range : 1.0);

    std::vector<double> kdist(n);
    std::vector<std::vector<std::size_t>> hood(n);
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<double> d;
        for (std::size_t b = 0; b < n; ++b) {
            if (b != a) d.push_back(std::abs(x[a] - x[b]));
        }
        std::sort(d.begin(), d.end());
        kdist[a] = d[k - 1];
        for (std::size_t b = 0; b < n; ++b) {
            if (b != a && std::abs(x[a] - x[b]) <= kdist[a]) hood[a].push_back(b);
        }
    }
    std::vector<double> lrd(n);
    for (std::size_t a = 0; a < n; ++a) {
        double reach = 0.0;
        for (std::size_t b : hood[a]) reach += std::max(kdist[b], std::abs(x[a] - x[b]));
        lrd[a] = 1.0 / (reach / static_cast<double>(hood[a].size()) + offset);
    }
    std::vector<double> lof(n);
    for (std::size_t a = 0; a < n; ++a) {
        double sum = 0.0;
        for (std::size_t b : hood[a]) sum += lrd[b];
        lof[a] = sum / static_cast<double>(hood[a].size()) / lrd[a];
    }
    return lof;
}

}  // namespace elstm::test
