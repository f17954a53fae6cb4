// random.hpp
// Seeded random streams. One stream per trajectory, never shared.

#pragma once

#include <cstdint>
#include <random>

namespace qmon {

// Fixed default so that runs are reproducible unless a seed is given.
inline constexpr std::uint64_t default_seed = 20090615;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream identifier of trajectory `index` in an ensemble: seed xor index is
// injective in the index for a fixed master seed.
inline constexpr std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    return master ^ index;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = default_seed) : seed_(seed), engine_(splitmix64(seed)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace qmon
