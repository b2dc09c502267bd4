#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace elstm::num {

/// Seedable 64-bit generator. Named child streams are derived from the parent
/// seed and the stream name alone, so adding a consumer never perturbs the
/// draws of another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    Rng stream(std::string_view name) const;
    Rng stream(std::string_view name, std::uint64_t index) const;

    std::uint64_t next() { return engine_(); }
    double uniform(double lo = 0.0, double hi = 1.0);
    double normal(double mean = 0.0, double stddev = 1.0);
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        // Fisher-Yates with our own index draws keeps the permutation
        // independent of the standard library's shuffle algorithm.
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

    static std::uint64_t mix(std::uint64_t x) noexcept;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace elstm::num
