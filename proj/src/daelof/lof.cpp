#include "elstm/daelof/lof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "elstm/error.hpp"

namespace elstm::dae {

namespace {

constexpr double kDensityOffset = 1e-10;

struct Neighbourhood {
    std::size_t lo = 0;  // first sorted position in the neighbourhood
    std::size_t hi = 0;  // last sorted position in the neighbourhood
};

}  // namespace

std::vector<double> lof_scores(std::span<const double> values, std::size_t k) {
    const std::size_t n = values.size();
    if (k == 0) throw ConfigError("LOF: k must be >= 1");
    if (n <= k) {
        throw ConfigError("LOF: need more than k = " + std::to_string(k) + " points, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(values[i])) throw DomainError("LOF: value " + std::to_string(i) + " is not finite");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> x(n);
    for (std::size_t s = 0; s < n; ++s) x[s] = values[order[s]];

    // k-distance: grow a window around s one nearest point at a time.
    std::vector<double> kdist(n);
    std::vector<Neighbourhood> hood(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::size_t lo = s;
        std::size_t hi = s;
        for (std::size_t taken = 0; taken < k; ++taken) {
            const bool can_left = lo > 0;
            const bool can_right = hi + 1 < n;
            if (can_left && (!can_right || x[s] - x[lo - 1] <= x[hi + 1] - x[s])) {
                --lo;
            } else {
                ++hi;
            }
        }
        const double d = std::max(x[s] - x[lo], x[hi] - x[s]);
        while (lo > 0 && x[s] - x[lo - 1] <= d) --lo;
        while (hi + 1 < n && x[hi + 1] - x[s] <= d) ++hi;
        kdist[s] = d;
        hood[s] = {lo, hi};
    }

    const double spread = x.back() - x.front();
    const double offset = kDensityOffset * (spread > 0.0 ? spread : 1.0);
    std::vector<double> lrd(n);
    for (std::size_t s = 0; s < n; ++s) {
        double reach = 0.0;
        for (std::size_t t = hood[s].lo; t <= hood[s].hi; ++t) {
            if (t == s) continue;
            reach += std::max(kdist[t], std::abs(x[s] - x[t]));
        }
        const double count = static_cast<double>(hood[s].hi - hood[s].lo);
        lrd[s] = 1.0 / (reach / count + offset);
    }

    std::vector<double> scores(n);
    for (std::size_t s = 0; s < n; ++s) {
        double ratio = 0.0;
        for (std::size_t t = hood[s].lo; t <= hood[s].hi; ++t) {
            if (t != s) ratio += lrd[t];
        }
        const double count = static_cast<double>(hood[s].hi - hood[s].lo);
        scores[order[s]] = ratio / count / lrd[s];
    }
    return scores;
}

}  // namespace elstm::dae
