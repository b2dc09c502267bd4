#include "elstm/numkernel/rng.hpp"

#include <cmath>
#include <numbers>

namespace elstm::num {

namespace {

std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Rng::mix(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::stream(std::string_view name) const { return Rng(mix(seed_ ^ fnv1a(name))); }

Rng Rng::stream(std::string_view name, std::uint64_t index) const {
    return Rng(mix(mix(seed_ ^ fnv1a(name)) + index));
}

double Rng::uniform(double lo, double hi) {
    // 53 random mantissa bits -> [0, 1)
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double Rng::normal(double mean, double stddev) {
    // Box-Muller; one draw per call keeps the stream position easy to reason about.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
    if (n <= 1) return 0;
    // Lemire-style rejection to avoid modulo bias.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
}

}  // namespace elstm::num
