#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcorr/angle.hpp"
#include "qcorr/parallel.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/scenarios.hpp"

namespace qcorr::lhv {

using scenarios::CorrelationRecord;
using spinalg::Outcome;

enum class Geometry { planar, spherical };
enum class Pairing { same_spin, anti_pair };

/// Deterministic sign(n . lambda) outcome model. Both lambda geometries give
/// the same exact pair correlation, so either serves as "the" model.
struct LhvModel {
    Geometry geometry = Geometry::planar;
    Pairing pairing = Pairing::anti_pair;
};

/// The shared hidden state lambda: a direction, planar or on the sphere.
struct HiddenState {
    Geometry geometry = Geometry::planar;
    double planar_angle = 0.0;
    std::array<double, 3> direction{0.0, 0.0, 1.0};

    static HiddenState planar(double lambda) { return {Geometry::planar, lambda, {}}; }
    static HiddenState spherical(const std::array<double, 3>& dir) {
        const double n2 = dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2];
        if (std::abs(n2 - 1.0) > 1e-12)
            throw std::invalid_argument("HiddenState: direction must be unit length");
        return {Geometry::spherical, 0.0, dir};
    }
};

/// Measurement axis at angle theta from z, in the x-z plane.
inline std::array<double, 3> axis_vector(Angle theta) {
    return {std::sin(theta.radians), 0.0, std::cos(theta.radians)};
}

/// sign(n . lambda); an exactly perpendicular lambda resolves to +1 (a
/// measure-zero tie, fixed for determinism).
inline Outcome lhv_outcome(const HiddenState& state, Angle axis) {
    double ip = 0.0;
    if (state.geometry == Geometry::planar) {
        ip = std::cos(axis.radians - state.planar_angle);
    } else {
        const auto n = axis_vector(axis);
        ip = n[0] * state.direction[0] + n[1] * state.direction[1] + n[2] * state.direction[2];
    }
    return ip >= 0.0 ? Outcome::plus : Outcome::minus;
}

inline Outcome lhv_outcome(const HiddenState& state, const std::array<double, 3>& axis) {
    if (state.geometry != Geometry::spherical)
        throw std::invalid_argument("lhv_outcome: vector axis needs a spherical hidden state");
    const double ip =
        axis[0] * state.direction[0] + axis[1] * state.direction[1] + axis[2] * state.direction[2];
    return ip >= 0.0 ? Outcome::plus : Outcome::minus;
}

/// Exact pair correlation under uniform lambda: 1 - 2*sep/pi for the
/// same-spin pairing (sep the angular separation in [0, pi]), negated when
/// the second outcome is the anti-paired one. Identical for both geometries.
inline double lhv_correlation_exact(const LhvModel& model, Angle theta, Angle phi) {
    const double sep = separation(theta, phi);
    const double same = 1.0 - 2.0 * sep / std::numbers::pi;
    return model.pairing == Pairing::same_spin ? same : -same;
}

/// Monte Carlo estimate of the model correlation from `count` seeded draws
/// of lambda. Chunked sub-seeds make the result a pure function of
/// (model, angles, seed, count) for any thread count.
inline CorrelationRecord lhv_correlation_mc(const LhvModel& model, Angle theta, Angle phi,
                                            std::uint64_t count, std::uint64_t seed,
                                            unsigned threads = 1) {
    if (count < 1) throw std::invalid_argument("lhv_correlation_mc: count must be at least 1");
    constexpr std::uint64_t chunk = 8192;
    const std::uint64_t chunks = (count + chunk - 1) / chunk;
    std::vector<double> partial(chunks, 0.0);

    const int flip = model.pairing == Pairing::anti_pair ? -1 : +1;
    for_each_chunk(chunks, threads, [&](std::uint64_t c) {
        rng::SplitMix gen(rng::derive_seed(seed, c));
        const std::uint64_t begin = c * chunk;
        const std::uint64_t end = std::min(count, begin + chunk);
        long long sum = 0;
        if (model.geometry == Geometry::planar) {
            for (std::uint64_t k = begin; k < end; ++k) {
                const HiddenState s = HiddenState::planar(gen.next_angle());
                sum += spinalg::sign_of(lhv_outcome(s, theta)) *
                       spinalg::sign_of(lhv_outcome(s, phi));
            }
        } else {
            for (std::uint64_t k = begin; k < end; ++k) {
                const HiddenState s{Geometry::spherical, 0.0, gen.next_sphere_point()};
                sum += spinalg::sign_of(lhv_outcome(s, theta)) *
                       spinalg::sign_of(lhv_outcome(s, phi));
            }
        }
        partial[c] = static_cast<double>(flip * sum);
    });

    double total = 0.0;
    for (double v : partial) total += v;

    CorrelationRecord rec{scenarios::Scenario::lhv_pair,
                          {theta, phi},
                          spinalg::cplx{total / static_cast<double>(count)},
                          scenarios::Method::sampled,
                          count,
                          seed};
    rec.validate();
    return rec;
}

}  // namespace qcorr::lhv
