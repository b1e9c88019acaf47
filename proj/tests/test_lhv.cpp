#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qcorr/inequalities.hpp"
#include "qcorr/lhv.hpp"
#include "qcorr/rng.hpp"

using namespace qcorr;
using namespace qcorr::lhv;

namespace {
constexpr double pi = std::numbers::pi;

/// Numerical-integration oracle for the planar model: midpoint rule over
/// lambda in [0, 2pi). The integrand is piecewise constant with four jumps,
/// so the error is O(1/n).
double planar_integral(double theta, double phi, Pairing pairing, int n = 2000000) {
    long long sum = 0;
    for (int k = 0; k < n; ++k) {
        const double lambda = (k + 0.5) * (2.0 * pi / n);
        const HiddenState s = HiddenState::planar(lambda);
        sum += spinalg::sign_of(lhv_outcome(s, Angle{theta})) *
               spinalg::sign_of(lhv_outcome(s, Angle{phi}));
    }
    const double same = static_cast<double>(sum) / n;
    return pairing == Pairing::same_spin ? same : -same;
}

/// Sphere oracle: product quadrature over (cos polar, azimuth).
double sphere_integral(double theta, double phi, int n = 1500) {
    const auto a = axis_vector(Angle{theta});
    const auto b = axis_vector(Angle{phi});
    long long sum = 0;
    for (int i = 0; i < n; ++i) {
        const double z = -1.0 + (i + 0.5) * (2.0 / n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < n; ++j) {
            const double az = (j + 0.5) * (2.0 * pi / n);
            const std::array<double, 3> lam = {r * std::cos(az), r * std::sin(az), z};
            const double ipa = a[0] * lam[0] + a[1] * lam[1] + a[2] * lam[2];
            const double ipb = b[0] * lam[0] + b[1] * lam[1] + b[2] * lam[2];
            sum += (ipa >= 0 ? 1 : -1) * (ipb >= 0 ? 1 : -1);
        }
    }
    return static_cast<double>(sum) / (static_cast<double>(n) * n);
}

}  // namespace

TEST_CASE("outcome sign and tie-break", "[lhv]") {
    REQUIRE(lhv_outcome(HiddenState::planar(0.0), Angle{0.0}) == spinalg::Outcome::plus);
    REQUIRE(lhv_outcome(HiddenState::planar(0.0), Angle{pi}) == spinalg::Outcome::minus);
    // perpendicular: the tie resolves to +1
    REQUIRE(lhv_outcome(HiddenState::planar(pi / 2), Angle{0.0}) == spinalg::Outcome::plus);

    const auto north = HiddenState::spherical({0.0, 0.0, 1.0});
    REQUIRE(lhv_outcome(north, Angle{0.0}) == spinalg::Outcome::plus);
    REQUIRE(lhv_outcome(north, Angle{pi}) == spinalg::Outcome::minus);
    REQUIRE_THROWS_AS(HiddenState::spherical({0.0, 0.0, 2.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(lhv_outcome(HiddenState::planar(0.3), std::array<double, 3>{0, 0, 1}),
                      std::invalid_argument);
}

TEST_CASE("exact correlation of the linear model", "[lhv]") {
    const LhvModel same{Geometry::planar, Pairing::same_spin};
    const LhvModel anti{Geometry::planar, Pairing::anti_pair};

    REQUIRE(lhv_correlation_exact(same, Angle{0.4}, Angle{0.4}) == Catch::Approx(1.0));
    REQUIRE(lhv_correlation_exact(same, Angle{0.0}, Angle{pi / 2}) ==
            Catch::Approx(0.0).margin(1e-12));
    REQUIRE(lhv_correlation_exact(anti, Angle{0.0}, Angle{pi / 3}) ==
            Catch::Approx(-1.0 / 3.0).margin(1e-12));

    // periodicity and evenness in the separation
    rng::SplitMix gen(71);
    for (int i = 0; i < 200; ++i) {
        const double t = gen.next_in(-7.0, 7.0), p = gen.next_in(-7.0, 7.0);
        const double v = lhv_correlation_exact(same, Angle{t}, Angle{p});
        REQUIRE(v == Catch::Approx(lhv_correlation_exact(same, Angle{p}, Angle{t})).margin(1e-12));
        REQUIRE(v ==
                Catch::Approx(lhv_correlation_exact(same, Angle{t + 2 * pi}, Angle{p})).margin(
                    1e-12));
        REQUIRE(std::abs(v) <= 1.0);
    }
}

TEST_CASE("exact correlation matches independent numerical integration", "[lhv][oracle]") {
    for (double delta : {0.3, pi / 3, 1.9, 2.9}) {
        const double exact = lhv_correlation_exact({Geometry::planar, Pairing::anti_pair},
                                                   Angle{0.2}, Angle{0.2 + delta});
        REQUIRE(planar_integral(0.2, 0.2 + delta, Pairing::anti_pair) ==
                Catch::Approx(exact).margin(5e-6));
    }
    // the sphere-uniform model integrates to the same line
    for (double delta : {0.5, 2.2}) {
        const double exact = lhv_correlation_exact({Geometry::spherical, Pairing::same_spin},
                                                   Angle{0.0}, Angle{delta});
        REQUIRE(sphere_integral(0.0, delta) == Catch::Approx(exact).margin(2e-3));
    }
}

TEST_CASE("Monte Carlo estimates are deterministic and converge", "[lhv]") {
    const LhvModel anti{Geometry::planar, Pairing::anti_pair};
    const auto a = lhv_correlation_mc(anti, Angle{0.0}, Angle{pi / 3}, 100000, 3);
    const auto b = lhv_correlation_mc(anti, Angle{0.0}, Angle{pi / 3}, 100000, 3);
    REQUIRE(a.value.real() == b.value.real());

    // thread count cannot change the estimate
    const auto c = lhv_correlation_mc(anti, Angle{0.0}, Angle{pi / 3}, 100000, 3, 4);
    REQUIRE(a.value.real() == c.value.real());

    // matched axes: every draw agrees
    const auto matched = lhv_correlation_mc({Geometry::planar, Pairing::same_spin}, Angle{1.0},
                                            Angle{1.0}, 5000, 9);
    REQUIRE(matched.value.real() == 1.0);

    const auto sphere = lhv_correlation_mc({Geometry::spherical, Pairing::anti_pair}, Angle{0.0},
                                           Angle{pi / 3}, 1000000, 11);
    REQUIRE(sphere.value.real() == Catch::Approx(-1.0 / 3.0).margin(0.005));
}

TEST_CASE("Monte Carlo matches the exact line within five standard errors",
          "[lhv][property]") {
    const std::uint64_t count = 100000;
    rng::SplitMix gen(72);
    for (int block = 0; block < 10; ++block) {
        const double delta = gen.next_in(0.05, pi - 0.05);
        const LhvModel model{block % 2 == 0 ? Geometry::planar : Geometry::spherical,
                             Pairing::anti_pair};
        const double exact = lhv_correlation_exact(model, Angle{0.0}, Angle{delta});
        const double se = std::sqrt((1.0 - exact * exact) / static_cast<double>(count));
        int ok = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto rec = lhv_correlation_mc(model, Angle{0.0}, Angle{delta}, count, seed);
            if (std::abs(rec.value.real() - exact) < 5.0 * se) ++ok;
        }
        REQUIRE(ok >= 99);
    }
}

TEST_CASE("the exact model respects the canonical three-angle bound on a grid",
          "[lhv][property]") {
    const auto corr = [](Angle a, Angle b) {
        return lhv_correlation_exact({Geometry::planar, Pairing::anti_pair}, a, b);
    };
    double min_slack = 1e300;
    ineq::scan_bell(corr, 2.0 * pi / 180.0, 0.0, pi, [&](const ineq::BellReport& r) {
        REQUIRE_FALSE(r.violated_canonical);
        min_slack = std::min(min_slack, r.canonical_rhs - r.canonical_lhs);
    });
    // the boundary is attained (60-degree spacing gives lhs = rhs = 2/3)
    REQUIRE(min_slack >= -1e-12);
    REQUIRE(min_slack <= 1e-12);
}

TEST_CASE("the exact model respects the four-setting bound on a grid", "[lhv][property]") {
    for (Pairing pairing : {Pairing::anti_pair, Pairing::same_spin}) {
        const auto corr = [pairing](Angle a, Angle b) {
            return lhv_correlation_exact({Geometry::planar, pairing}, a, b);
        };
        double max_abs = 0.0;
        ineq::scan_chsh(corr, 5.0 * pi / 180.0, 0.0, pi, [&](const ineq::ChshReport& r) {
            REQUIRE_FALSE(r.violated);
            max_abs = std::max(max_abs, std::abs(r.s_value));
        });
        REQUIRE(max_abs <= 2.0 + 1e-12);
        REQUIRE(max_abs >= 2.0 - 1e-9);  // the classical boundary is reached
    }
}
