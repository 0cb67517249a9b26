#pragma once

#include <cstdint>
#include <utility>

namespace fno {

/// Splittable counter-style RNG built on the splitmix64 finalizer. Streams are
/// cheap value types: derive(salt) yields an independent stream whose output
/// depends only on (root seed, derivation path), never on draw order elsewhere.
/// This is what makes dataset generation schedule-independent and GRF draws
/// addressable per Fourier mode.
class RngStream {
public:
    RngStream() : state_(0) {}
    explicit RngStream(uint64_t seed) : state_(mix(seed ^ kInit)) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Independent child stream; salts along the path are order-sensitive.
    RngStream derive(uint64_t salt) const {
        RngStream child;
        child.state_ = mix(state_ ^ mix(salt + kDerive));
        return child;
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log() argument.
    double next_uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Box-Muller pair of independent standard normals.
    std::pair<double, double> next_gauss2();

    double next_gauss() { return next_gauss2().first; }

    uint64_t state() const { return state_; }

private:
    static constexpr uint64_t kInit = 0x8c7f0aac97c4aa2fULL;
    static constexpr uint64_t kDerive = 0xd1b54a32d192ed03ULL;
    uint64_t state_;
};

} // namespace fno
