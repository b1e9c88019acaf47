#pragma once

#include <cmath>
#include <numbers>

namespace qcorr {

/// Physical device orientation in radians. Storage is never normalized;
/// operations that care about periodicity wrap on use.
struct Angle {
    double radians = 0.0;

    constexpr Angle() = default;
    constexpr explicit Angle(double r) : radians(r) {}

    [[nodiscard]] double degrees() const { return radians * 180.0 / std::numbers::pi; }
};

constexpr Angle from_radians(double r) { return Angle{r}; }

inline Angle from_degrees(double d) { return Angle{d * std::numbers::pi / 180.0}; }

constexpr Angle operator+(Angle a, Angle b) { return Angle{a.radians + b.radians}; }
constexpr Angle operator-(Angle a, Angle b) { return Angle{a.radians - b.radians}; }

/// Wrap to (-pi, pi].
inline double wrap_pi(double r) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(r, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

/// Angular separation of two axes, in [0, pi].
inline double separation(Angle a, Angle b) { return std::abs(wrap_pi(a.radians - b.radians)); }

}  // namespace qcorr
