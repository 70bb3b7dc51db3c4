#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace glauber {

/// Reproducible random stream keyed by (seed, stream id). Distinct stream ids
/// seed the engine through std::seed_seq, whose mixing is fixed by the standard,
/// so a given pair yields the same draws on every conforming platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                          std::uint32_t(stream >> 32), 0x9e3779b9u};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate (> 0).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // Lemire's multiply-shift with rejection; exact and deterministic.
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

// Stream-id namespaces so auxiliary draws never collide with replica streams.
inline constexpr std::uint64_t kReferenceStreamBase = std::uint64_t{1} << 48;
inline constexpr std::uint64_t kAuxStreamBase = std::uint64_t{2} << 48;
inline constexpr std::uint64_t kSecondArmStreamBase = std::uint64_t{3} << 48;

}  // namespace glauber
