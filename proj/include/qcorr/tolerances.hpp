#pragma once

namespace qcorr {

/// Library-wide numeric tolerances. One instance acts as the global default;
/// constructors and checks that need different slack accept an explicit set.
struct Tolerances {
    double equality = 1e-12;     ///< entrywise / scalar equality
    double psd = 1e-10;          ///< allowed eigenvalue dip below zero
    double feasibility = 1e-10;  ///< constraint slack treated as satisfied
    double impossible = 1e-14;   ///< below this a branch probability is "cannot happen"
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

}  // namespace qcorr
