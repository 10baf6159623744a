#pragma once

#include <cstdint>
#include <span>

#include "cddr/common.hpp"

namespace cddr {

/// SplitMix64 generator. Chosen over std::mt19937 because the algorithm is
/// short enough to restate in any language, which makes seeded scenario
/// sets reproducible across reimplementations:
///   state += 0x9E3779B97F4A7C15
///   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
///   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
/// Doubles are (z >> 11) * 2^-53 in [0, 1).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        require(lo <= hi, "uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Draws a 0-based category from a probability vector by inverse CDF,
    /// scanning categories in index order.
    int categorical(std::span<const double> probs) {
        require(!probs.empty(), "categorical: empty distribution");
        const double r = next_double();
        double acc = 0.0;
        for (size_t k = 0; k + 1 < probs.size(); ++k) {
            acc += probs[k];
            if (r < acc) return static_cast<int>(k);
        }
        return static_cast<int>(probs.size()) - 1;
    }

private:
    std::uint64_t state_;
};

} // namespace cddr
