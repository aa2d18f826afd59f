#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ovplan/geometry.hpp"

namespace ovplan {

/// Deterministic random source. All variate transforms are hand-rolled so runs
/// are reproducible independent of the standard library's distribution
/// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (both variates computed, one kept).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double exponential(double rate) {
        return -std::log(1.0 - uniform()) / rate;
    }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    /// Uniform point in the disc of the given radius about a center.
    LocalPoint in_disc(LocalPoint center, double radius) {
        const double r = radius * std::sqrt(uniform());
        const double t = uniform(0.0, 2.0 * kPi);
        return {center.x + r * std::cos(t), center.y + r * std::sin(t)};
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer, used to derive independent per-task seed streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace ovplan
