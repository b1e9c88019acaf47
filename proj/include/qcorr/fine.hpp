#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qcorr/angle.hpp"
#include "qcorr/inequalities.hpp"
#include "qcorr/prob.hpp"
#include "qcorr/scenarios.hpp"
#include "qcorr/simplex.hpp"
#include "qcorr/tolerances.hpp"

namespace qcorr::fine {

/// Measured moments a joint distribution must reproduce.
///
/// For n = 3: singles b = (B1, B2, B3), pairs c = (C12, C13, C23), optional
/// triple moment d. For n = 4 (the four-setting case): c holds the measured
/// setting pairs (C_ab, C_ab', C_a'b, C_a'b') and singles are all zero.
struct MarginalSet {
    int n = 3;
    std::vector<double> b;
    std::vector<double> c;
    std::optional<double> d;

    void validate() const {
        if (n != 3 && n != 4) throw std::invalid_argument("MarginalSet: n must be 3 or 4");
        const std::size_t want_b = n == 3 ? 3 : 4;
        const std::size_t want_c = n == 3 ? 3 : 4;
        if (b.size() != want_b || c.size() != want_c)
            throw std::invalid_argument("MarginalSet: wrong moment count");
        for (double v : b)
            if (!(std::abs(v) <= 1.0 + 1e-9)) throw std::invalid_argument("MarginalSet: |B| > 1");
        for (double v : c)
            if (!(std::abs(v) <= 1.0 + 1e-9)) throw std::invalid_argument("MarginalSet: |C| > 1");
        if (d && !(std::abs(*d) <= 1.0 + 1e-9))
            throw std::invalid_argument("MarginalSet: |D| > 1");
    }
};

/// The admissible range of the triple moment.
struct DInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// The 8-entry vector p(s) = (1/8)(1 + sum B_i s_i + sum C_ij s_i s_j
/// + D s1 s2 s3). Its moments reproduce (B, C, D) exactly, by linearity;
/// entries may be negative, which is precisely what feasibility is about.
inline prob::JointDistribution joint_from_marginals(const MarginalSet& m, double d) {
    m.validate();
    if (m.n != 3) throw std::invalid_argument("joint_from_marginals: needs a 3-spin marginal set");
    std::vector<double> p(8);
    for (std::size_t i = 0; i < 8; ++i) {
        const int s1 = (i & 4) ? -1 : +1;
        const int s2 = (i & 2) ? -1 : +1;
        const int s3 = (i & 1) ? -1 : +1;
        p[i] = (1.0 + m.b[0] * s1 + m.b[1] * s2 + m.b[2] * s3 + m.c[0] * s1 * s2 +
                m.c[1] * s1 * s3 + m.c[2] * s2 * s3 + d * s1 * s2 * s3) /
               8.0;
    }
    return prob::JointDistribution::quasi(3, std::move(p));
}

namespace detail {

struct DBounds {
    double lo, hi;
    std::size_t lo_pattern, hi_pattern;  ///< canonical indices of the binding patterns
};

inline DBounds d_bounds(const MarginalSet& m) {
    DBounds r{-1e300, 1e300, 0, 0};
    for (std::size_t i = 0; i < 8; ++i) {
        const int s1 = (i & 4) ? -1 : +1;
        const int s2 = (i & 2) ? -1 : +1;
        const int s3 = (i & 1) ? -1 : +1;
        const double base = 1.0 + m.b[0] * s1 + m.b[1] * s2 + m.b[2] * s3 + m.c[0] * s1 * s2 +
                            m.c[1] * s1 * s3 + m.c[2] * s2 * s3;
        if (s1 * s2 * s3 > 0) {
            if (-base > r.lo) {
                r.lo = -base;
                r.lo_pattern = i;
            }
        } else if (base < r.hi) {
            r.hi = base;
            r.hi_pattern = i;
        }
    }
    return r;
}

}  // namespace detail

/// Intersect the eight non-negativity constraints of joint_from_marginals
/// over D. Returns the closed admissible interval, or nothing when it is
/// empty beyond the feasibility slack. A violation smaller than the slack
/// collapses to the single boundary point.
inline std::optional<DInterval> d_interval(const MarginalSet& m) {
    m.validate();
    if (m.n != 3) throw std::invalid_argument("d_interval: needs a 3-spin marginal set");
    const auto b = detail::d_bounds(m);
    if (b.lo <= b.hi) return DInterval{b.lo, b.hi};
    if (b.lo - b.hi <= tolerances().feasibility) {
        const double mid = 0.5 * (b.lo + b.hi);
        return DInterval{mid, mid};
    }
    return std::nullopt;
}

/// One party's same-spin moments reconstructed from the entangled pair:
/// B = 0 and C_ij = -C_AB(theta_i, theta_j) = +cos(theta_i - theta_j),
/// the sign flip being exactly the anti-correlation bookkeeping.
inline MarginalSet counterfactual_marginals(Angle t1, Angle t2, Angle t3) {
    MarginalSet m;
    m.n = 3;
    m.b = {0.0, 0.0, 0.0};
    m.c = {-scenarios::bell_correlation(t1, t2), -scenarios::bell_correlation(t1, t3),
           -scenarios::bell_correlation(t2, t3)};
    m.d = std::nullopt;
    return m;
}

struct FeasibilityReport {
    bool feasible = false;
    MarginalSet marginals;
    std::optional<DInterval> interval;                ///< n = 3 only
    std::optional<prob::JointDistribution> witness;   ///< present when feasible
    std::optional<std::size_t> certificate_index;     ///< n = 3 infeasible: failing sign pattern
    std::optional<std::string> certificate;           ///< same, rendered "(-,+,-)"
    std::optional<ineq::BellReport> bell;             ///< pivot-1 canonical report (angle input)
    bool bell_violated_any_pivot = false;             ///< canonical check over all three pivots
    bool fine_equivalence_holds = false;              ///< infeasible <=> violated(any pivot)
    std::optional<double> chsh_max_abs = std::nullopt;///< n = 4: largest |S| over sign variants
};

/// Existence of a non-negative 3-spin joint for the counterfactual moments of
/// a measurement-angle triple, decided by the closed-form D interval. The
/// report carries the canonical Bell verdict on the same angles for the
/// necessary-and-sufficient cross-check; the verdict is taken over all three
/// pivot assignments because an ordered triple can hide its violation in a
/// permuted pivot.
inline FeasibilityReport fine_check(Angle t1, Angle t2, Angle t3) {
    FeasibilityReport r;
    r.marginals = counterfactual_marginals(t1, t2, t3);
    r.interval = d_interval(r.marginals);
    r.feasible = r.interval.has_value();

    if (r.feasible) {
        const double mid = 0.5 * (r.interval->lo + r.interval->hi);
        r.witness = joint_from_marginals(r.marginals, mid);
    } else {
        // with every upper-bound constraint satisfied (D at the least upper
        // bound), the most violated lower-bound pattern is the certificate
        const auto b = detail::d_bounds(r.marginals);
        r.certificate_index = b.lo_pattern;
        r.certificate = prob::pattern_string(3, b.lo_pattern);
    }

    const auto corr = [](Angle x, Angle y) { return scenarios::bell_correlation(x, y); };
    r.bell = ineq::bell_check(corr, t1, t2, t3);
    const bool v1 = r.bell->violated_canonical;
    const bool v2 = ineq::bell_check(corr, t2, t1, t3).violated_canonical;
    const bool v3 = ineq::bell_check(corr, t3, t1, t2).violated_canonical;
    r.bell_violated_any_pivot = v1 || v2 || v3;
    r.fine_equivalence_holds = (!r.feasible) == r.bell_violated_any_pivot;
    return r;
}

/// Existence of a non-negative 16-entry joint over (s_a, s_a', s_b, s_b')
/// with zero singles and the four measured pair moments, by LP feasibility.
inline FeasibilityReport chsh_joint_feasible(double c_ab, double c_ab_prime, double c_a_prime_b,
                                             double c_a_prime_b_prime) {
    MarginalSet m;
    m.n = 4;
    m.b = {0.0, 0.0, 0.0, 0.0};
    m.c = {c_ab, c_ab_prime, c_a_prime_b, c_a_prime_b_prime};
    m.validate();

    // variables: p(s_a, s_a', s_b, s_b') in canonical order
    const auto sign = [](std::size_t i, int var) { return (i >> (3 - var)) & 1 ? -1.0 : 1.0; };
    std::vector<lp::Equality> eqs;
    eqs.push_back({std::vector<double>(16, 1.0), 1.0});
    for (int v = 0; v < 4; ++v) {
        lp::Equality e{std::vector<double>(16), 0.0};
        for (std::size_t i = 0; i < 16; ++i) e.coefficients[i] = sign(i, v);
        eqs.push_back(std::move(e));
    }
    const std::array<std::pair<int, int>, 4> pairs = {{{0, 2}, {0, 3}, {1, 2}, {1, 3}}};
    for (std::size_t k = 0; k < 4; ++k) {
        lp::Equality e{std::vector<double>(16), m.c[k]};
        for (std::size_t i = 0; i < 16; ++i)
            e.coefficients[i] = sign(i, pairs[k].first) * sign(i, pairs[k].second);
        eqs.push_back(std::move(e));
    }

    FeasibilityReport r;
    r.marginals = m;
    const auto point = lp::feasible_point(16, eqs, tolerances().feasibility);
    r.feasible = point.has_value();
    if (point) {
        std::vector<double> p = *point;
        // scrub solver noise so the witness passes distribution validation
        double sum = 0.0;
        for (double& v : p) {
            if (v < 0.0) v = 0.0;
            sum += v;
        }
        for (double& v : p) v /= sum;
        r.witness = prob::JointDistribution(4, std::move(p));
    }
    double worst = 0.0;
    for (int signs = 0; signs < 8; ++signs) {
        // the four-term expressions with an odd number of minus signs
        const double e0 = (signs & 1) ? -1.0 : 1.0;
        const double e1 = (signs & 2) ? -1.0 : 1.0;
        const double e2 = (signs & 4) ? -1.0 : 1.0;
        const double e3 = e0 * e1 * e2 * -1.0;
        worst = std::max(worst,
                         std::abs(e0 * m.c[0] + e1 * m.c[1] + e2 * m.c[2] + e3 * m.c[3]));
    }
    r.chsh_max_abs = worst;
    return r;
}

}  // namespace qcorr::fine
