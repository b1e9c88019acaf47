#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/angle.hpp"
#include "qcorr/tolerances.hpp"

namespace qcorr::ineq {

/// Correlation functions handed to the checks must be two-angle, real valued
/// and bounded by 1 in magnitude (small numerical overshoot allowed).
inline double checked_corr_value(double v) {
    if (!(std::abs(v) <= 1.0 + 1e-9))
        throw std::domain_error("correlation function returned a value outside [-1, 1]");
    return v;
}

/// Three-angle report. Two expressions are evaluated side by side:
///  - sum_expression = C12 + C13 - C23 against the bounds [-1, 1];
///  - the 1964 form |C12 - C13| <= 1 + C23, whose verdict is the one that
///    actually separates local models from the singlet.
struct BellReport {
    std::array<Angle, 3> angles{};
    double sum_expression = 0.0;
    double canonical_lhs = 0.0;
    double canonical_rhs = 0.0;
    bool violated_canonical = false;
    bool within_sum_bounds = true;
};

template <class Corr>
BellReport bell_check(Corr&& corr, Angle t1, Angle t2, Angle t3) {
    const double c12 = checked_corr_value(corr(t1, t2));
    const double c13 = checked_corr_value(corr(t1, t3));
    const double c23 = checked_corr_value(corr(t2, t3));
    BellReport r;
    r.angles = {t1, t2, t3};
    r.sum_expression = c12 + c13 - c23;
    r.canonical_lhs = std::abs(c12 - c13);
    r.canonical_rhs = 1.0 + c23;
    r.violated_canonical = r.canonical_lhs > r.canonical_rhs + tolerances().equality;
    r.within_sum_bounds = std::abs(r.sum_expression) <= 1.0 + tolerances().equality;
    return r;
}

/// Four-setting report with the fixed sign layout
/// S = C(a,b) + C(a,b') + C(a',b) - C(a',b').
struct ChshReport {
    std::array<Angle, 4> settings{};
    double s_value = 0.0;
    bool violated = false;
};

template <class Corr>
ChshReport chsh_check(Corr&& corr, Angle a, Angle a_prime, Angle b, Angle b_prime) {
    const double s = checked_corr_value(corr(a, b)) + checked_corr_value(corr(a, b_prime)) +
                     checked_corr_value(corr(a_prime, b)) -
                     checked_corr_value(corr(a_prime, b_prime));
    return {{a, a_prime, b, b_prime}, s, std::abs(s) > 2.0 + tolerances().equality};
}

enum class Family { bell_sum, bell_canonical, chsh };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::bell_sum: return "bell_sum";
        case Family::bell_canonical: return "bell_canonical";
        case Family::chsh: return "chsh";
    }
    throw std::invalid_argument("unknown inequality family");
}

inline int family_arity(Family f) { return f == Family::chsh ? 4 : 3; }

/// The LHV boundary the family's objective is measured against.
inline double family_threshold(Family f) {
    switch (f) {
        case Family::bell_sum: return 1.0;
        case Family::bell_canonical: return 0.0;
        case Family::chsh: return 2.0;
    }
    throw std::invalid_argument("unknown inequality family");
}

struct SearchResult {
    Family family = Family::chsh;
    std::vector<Angle> angles;
    double objective = 0.0;  ///< |S|, canonical lhs - rhs, or |sum expression|
    double violation = 0.0;  ///< objective minus the family's local bound
};

namespace detail {

template <class Corr>
double family_objective(Family family, Corr&& corr, const std::vector<double>& x) {
    switch (family) {
        case Family::bell_sum: {
            const auto r = bell_check(corr, Angle{x[0]}, Angle{x[1]}, Angle{x[2]});
            return std::abs(r.sum_expression);
        }
        case Family::bell_canonical: {
            const auto r = bell_check(corr, Angle{x[0]}, Angle{x[1]}, Angle{x[2]});
            return r.canonical_lhs - r.canonical_rhs;
        }
        case Family::chsh:
            return std::abs(
                chsh_check(corr, Angle{x[0]}, Angle{x[1]}, Angle{x[2]}, Angle{x[3]}).s_value);
    }
    throw std::invalid_argument("unknown inequality family");
}

/// Golden-section maximization of a unimodal-enough 1-D slice.
template <class F>
double golden_max(F&& f, double lo, double hi, int iters) {
    constexpr double ratio = 0.6180339887498949;
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Coarse scan of the angle torus followed by round-robin golden-section
/// refinement of each coordinate in a shrinking window. Deterministic for
/// fixed inputs; the refined value never falls below the grid maximum.
template <class Corr>
SearchResult maximize_violation(Family family, Corr&& corr, Angle grid_step, int refine_iters) {
    const double step = grid_step.radians;
    if (!(step > 0.0) || step > std::numbers::pi / 8.0 + 1e-12)
        throw std::invalid_argument("maximize_violation: grid step must be in (0, pi/8]");
    if (refine_iters < 0) throw std::invalid_argument("maximize_violation: negative refine count");

    const int arity = family_arity(family);
    const int points = static_cast<int>(std::ceil(2.0 * std::numbers::pi / step));

    std::vector<double> best(arity, 0.0);
    std::vector<double> x(arity, 0.0);
    double best_value = -1e300;
    // odometer over the full grid
    std::vector<int> idx(arity, 0);
    for (;;) {
        for (int k = 0; k < arity; ++k) x[k] = idx[k] * step;
        const double v = detail::family_objective(family, corr, x);
        if (v > best_value) {
            best_value = v;
            best = x;
        }
        int k = arity - 1;
        while (k >= 0 && ++idx[k] == points) idx[k--] = 0;
        if (k < 0) break;
    }

    double window = step;
    for (int pass = 0; pass < refine_iters; ++pass) {
        for (int k = 0; k < arity; ++k) {
            const double center = best[k];
            const double refined = detail::golden_max(
                [&](double v) {
                    std::vector<double> y = best;
                    y[k] = v;
                    return detail::family_objective(family, corr, y);
                },
                center - window, center + window, 40);
            std::vector<double> y = best;
            y[k] = refined;
            const double v = detail::family_objective(family, corr, y);
            if (v >= best_value) {
                best_value = v;
                best = y;
            }
        }
        window *= 0.7;
    }

    SearchResult r;
    r.family = family;
    for (double v : best) r.angles.push_back(Angle{v});
    r.objective = best_value;
    r.violation = best_value - family_threshold(family);
    return r;
}

/// Exhaustive ordered scan over [lo, hi) triples at the given step,
/// invoking row_fn with each report in grid order.
template <class Corr, class RowFn>
void scan_bell(Corr&& corr, double step_rad, double lo_rad, double hi_rad, RowFn&& row_fn) {
    if (!(step_rad > 0.0)) throw std::invalid_argument("scan_bell: step must be positive");
    const int points = static_cast<int>(std::floor((hi_rad - lo_rad) / step_rad + 1e-9));
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < points; ++j)
            for (int k = 0; k < points; ++k)
                row_fn(bell_check(corr, Angle{lo_rad + i * step_rad}, Angle{lo_rad + j * step_rad},
                                  Angle{lo_rad + k * step_rad}));
}

template <class Corr, class RowFn>
void scan_chsh(Corr&& corr, double step_rad, double lo_rad, double hi_rad, RowFn&& row_fn) {
    if (!(step_rad > 0.0)) throw std::invalid_argument("scan_chsh: step must be positive");
    const int points = static_cast<int>(std::floor((hi_rad - lo_rad) / step_rad + 1e-9));
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < points; ++j)
            for (int k = 0; k < points; ++k)
                for (int l = 0; l < points; ++l)
                    row_fn(chsh_check(corr, Angle{lo_rad + i * step_rad},
                                      Angle{lo_rad + j * step_rad}, Angle{lo_rad + k * step_rad},
                                      Angle{lo_rad + l * step_rad}));
}

}  // namespace qcorr::ineq
