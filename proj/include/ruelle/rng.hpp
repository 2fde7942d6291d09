#pragma once

#include <cstdint>

#include "ruelle/core.hpp"

namespace ruelle {

inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based stream: draw k of stream s depends only on (seed, s, k), so
// samples can be generated in any order or on any thread.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix64(seed ^ splitmix64(stream))) {}

    std::uint64_t bits(std::uint64_t k) const { return splitmix64(key_ + k * 0xD1B54A32D192ED03ull); }
    // Uniform in [0,1) with 64 random mantissa bits.
    Real uniform(std::uint64_t k) const { return std::ldexp(static_cast<Real>(bits(k)), -64); }

private:
    std::uint64_t key_;
};

}  // namespace ruelle
