#pragma once

#include <cstdint>
#include <random>

namespace vlfbec {

/// Deterministic random stream addressed by (seed, stream index). The same
/// pair replays the same draw sequence on every platform; distinct stream
/// indices give statistically independent sequences, so concurrent trials can
/// each own stream index == trial index and the merged result does not depend
/// on execution order.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    int bit() { return static_cast<int>(next_u64() & 1u); }

    /// Unbiased uniform integer in [0, n). Requires n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    // splitmix64 finalizer; spreads nearby (seed, stream) pairs apart.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace vlfbec
