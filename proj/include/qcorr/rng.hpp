#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace qcorr::rng {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic sub-seed for a numbered stream. Chunked consumers draw from
/// derive_seed(seed, chunk) so results do not depend on how work is split.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream * golden_gamma + 0x632BE59BD9B4E019ULL));
}

/// splitmix64: tiny, fast, and identical on every platform.
class SplitMix {
  public:
    explicit constexpr SplitMix(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next_u64() {
        state_ += golden_gamma;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_angle() { return next_unit() * 2.0 * std::numbers::pi; }

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform point on the unit sphere: uniform azimuth, uniform cos(polar).
    std::array<double, 3> next_sphere_point() {
        const double z = 2.0 * next_unit() - 1.0;
        const double az = next_angle();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(az), r * std::sin(az), z};
    }

  private:
    std::uint64_t state_;
};

}  // namespace qcorr::rng
