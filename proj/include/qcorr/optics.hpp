#pragma once

#include <cmath>
#include <stdexcept>

#include "qcorr/angle.hpp"

// Classical intensity optics. Note the angle convention: polarizer analysis
// uses full angles (cos^2 of the difference), not the spin half-angles.
namespace qcorr::optics {

/// Branch intensities of a two-stage polarizing beam splitter cascade.
struct IntensitySet {
    double i0 = 0.0;
    double i_pp = 0.0;
    double i_pm = 0.0;
    double i_mp = 0.0;
    double i_mm = 0.0;

    [[nodiscard]] double total() const { return i_pp + i_pm + i_mp + i_mm; }
};

/// Transmitted intensity through an analyzer at `delta` to the polarization.
inline double malus(double i_in, Angle delta) {
    if (i_in < 0.0) throw std::invalid_argument("malus: negative intensity");
    const double c = std::cos(delta.radians);
    return i_in * c * c;
}

/// Unpolarized input split at theta1, both branches analyzed at theta2.
inline IntensitySet pbs_cascade(double i0, Angle theta1, Angle theta2) {
    if (!(i0 > 0.0)) throw std::invalid_argument("pbs_cascade: input intensity must be positive");
    const double half = 0.5 * i0;
    const Angle delta = theta2 - theta1;
    const double pass = malus(half, delta);
    const double cross = half - pass;
    return {i0, pass, cross, cross, pass};
}

/// Normalized branch correlation (I++ + I-- - I+- - I-+)/I0, computed from
/// the intensities rather than its closed form cos(2(theta2 - theta1)).
inline double pbs_correlation(double i0, Angle theta1, Angle theta2) {
    const IntensitySet s = pbs_cascade(i0, theta1, theta2);
    return (s.i_pp + s.i_mm - s.i_pm - s.i_mp) / s.i0;
}

/// Transmission of polarized light through two further filters. Depends only
/// on consecutive angle differences, which is what separates it from the
/// three-operator spin correlator and its alternating-sum angle dependence.
inline double three_filter_chain(double i0, Angle t1, Angle t2, Angle t3) {
    if (i0 < 0.0) throw std::invalid_argument("three_filter_chain: negative intensity");
    return malus(malus(i0, t2 - t1), t3 - t2);
}

}  // namespace qcorr::optics
