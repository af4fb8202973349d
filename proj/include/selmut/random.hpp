#pragma once

#include <cstdint>

namespace selmut {

/// SplitMix64: a counter-based generator whose output depends only on the
/// seed and the draw index, so seeded suites replay identically everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi].
    int between(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    /// Independent stream derived from this seed.
    SplitMix64 split(std::uint64_t stream) const {
        SplitMix64 g(state_ ^ (stream * 0xD1B54A32D192ED03ULL));
        g.next();
        return g;
    }

private:
    std::uint64_t state_;
};

}  // namespace selmut
