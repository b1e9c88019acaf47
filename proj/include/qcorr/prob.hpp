#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/spin.hpp"
#include "qcorr/tolerances.hpp"

namespace qcorr::prob {

using spinalg::Outcome;
using spinalg::both_outcomes;
using spinalg::sign_of;

/// Thrown when conditioning on an event of probability zero.
struct zero_probability_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Joint distribution over n in {2,3,4} sign variables.
///
/// Canonical index order, shared library-wide: +1 sorts before -1 and
/// variable 1 is the most significant position. So for n = 2 the entries
/// are p(+,+), p(+,-), p(-,+), p(-,-).
///
/// The checked constructor enforces non-negativity (up to construction
/// noise) and unit total mass. `quasi` skips the positivity check for
/// moment-built vectors whose negativity is itself the object of study.
class JointDistribution {
  public:
    JointDistribution(int n, std::vector<double> p) : JointDistribution(n, std::move(p), true) {}

    static JointDistribution quasi(int n, std::vector<double> p) {
        return JointDistribution(n, std::move(p), false);
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] std::size_t size() const { return p_.size(); }

    /// Probability at a canonical index; construction noise in [-1e-12, 0)
    /// reads as 0.
    [[nodiscard]] double prob(std::size_t index) const {
        const double v = p_[index];
        return v < 0.0 ? 0.0 : v;
    }

    /// Raw signed entry (negativity witness access).
    [[nodiscard]] double entry(std::size_t index) const { return p_[index]; }

    [[nodiscard]] bool nonnegative(double tol = 1e-12) const {
        for (double v : p_)
            if (v < -tol) return false;
        return true;
    }

    /// Sign of variable `var` (0-based) in the pattern at `index`.
    [[nodiscard]] int sign_at(std::size_t index, int var) const {
        return (index >> (n_ - 1 - var)) & 1 ? -1 : +1;
    }

    [[nodiscard]] std::size_t index_of(std::span<const int> signs) const {
        std::size_t idx = 0;
        for (int v = 0; v < n_; ++v) idx = (idx << 1) | (signs[v] < 0 ? 1u : 0u);
        return idx;
    }


  private:
    JointDistribution(int n, std::vector<double> p, bool checked) : n_(n), p_(std::move(p)) {
        if (n_ < 2 || n_ > 4) throw std::invalid_argument("JointDistribution: n must be 2..4");
        if (p_.size() != (std::size_t{1} << n_))
            throw std::invalid_argument("JointDistribution: wrong entry count");
        double sum = 0.0;
        for (double v : p_) {
            if (!std::isfinite(v)) throw std::invalid_argument("JointDistribution: non-finite entry");
            if (checked && v < -1e-12)
                throw std::invalid_argument("JointDistribution: negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tolerances().feasibility)
            throw std::invalid_argument("JointDistribution: total mass is not 1");
    }

    int n_;
    std::vector<double> p_;
};

/// Pattern at a canonical index rendered as e.g. "(+,-,+)".
inline std::string pattern_string(int n, std::size_t index) {
    std::string s = "(";
    for (int v = 0; v < n; ++v) {
        s += ((index >> (n - 1 - v)) & 1) ? '-' : '+';
        if (v + 1 < n) s += ',';
    }
    s += ')';
    return s;
}

/// An elementary event: one variable taking one sign.
struct Event {
    int var = 0;
    Outcome value = Outcome::plus;
};

inline double event_probability(const JointDistribution& joint, Event e) {
    double p = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i)
        if (joint.sign_at(i, e.var) == sign_of(e.value)) p += joint.prob(i);
    return p;
}

inline double event_probability(const JointDistribution& joint, Event a, Event b) {
    double p = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i)
        if (joint.sign_at(i, a.var) == sign_of(a.value) &&
            joint.sign_at(i, b.var) == sign_of(b.value))
            p += joint.prob(i);
    return p;
}

/// P(target | given) = P(target, given) / P(given).
inline double conditional(const JointDistribution& joint, int target_var, Outcome target_val,
                          int given_var, Outcome given_val) {
    const double pg = event_probability(joint, {given_var, given_val});
    if (pg <= 0.0) throw zero_probability_error("conditional: conditioning event has probability 0");
    return event_probability(joint, {target_var, target_val}, {given_var, given_val}) / pg;
}

struct CompletenessReport {
    double lhs = 0.0;  ///< marginal P(y)
    double rhs = 0.0;  ///< sum over the partition of P(x) P(y|x)
    bool holds = false;
};

/// Law of total probability for y = (y_var == +1), partitioning over the
/// joint assignments of every other variable. Zero-probability cells of the
/// partition contribute 0. Holds identically for any valid joint; this is a
/// demonstrator, not a theorem prover.
inline CompletenessReport completeness_check(const JointDistribution& joint, int y_var) {
    const Event y{y_var, Outcome::plus};
    const double lhs = event_probability(joint, y);

    const int n = joint.n();
    double rhs = 0.0;
    const std::size_t cells = std::size_t{1} << (n - 1);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        // P(x) and P(x, y) for the partition cell: fixed signs on all vars != y_var
        double px = 0.0, pxy = 0.0;
        for (std::size_t i = 0; i < joint.size(); ++i) {
            bool in_cell = true;
            std::size_t bit = 0;
            for (int v = 0; v < n && in_cell; ++v) {
                if (v == y_var) continue;
                const int want = (cell >> (n - 2 - bit)) & 1 ? -1 : +1;
                ++bit;
                if (joint.sign_at(i, v) != want) in_cell = false;
            }
            if (!in_cell) continue;
            px += joint.prob(i);
            if (joint.sign_at(i, y_var) == +1) pxy += joint.prob(i);
        }
        if (px > 0.0) rhs += px * (pxy / px);
    }
    return {lhs, rhs, std::abs(lhs - rhs) < tolerances().feasibility};
}

struct FactorisationReport {
    double p_ab = 0.0;
    double p_a_p_b = 0.0;
    bool factorises = false;
};

/// Does P(A,B) = P(A) P(B)? The failure mode is what screens for a common cause.
inline FactorisationReport factorisation_check(const JointDistribution& joint, Event a, Event b) {
    const double pab = event_probability(joint, a, b);
    const double papb = event_probability(joint, a) * event_probability(joint, b);
    return {pab, papb, std::abs(pab - papb) < tolerances().feasibility};
}

/// A machine dealing two coins that always show opposite faces:
/// P(+,-) = P(-,+) = 1/2.
inline JointDistribution coin_machine() { return JointDistribution(2, {0.0, 0.5, 0.5, 0.0}); }

// Moments read raw entries so that quasi-distributions round-trip their
// construction values by linearity.
inline double single_average(const JointDistribution& joint, int var) {
    double e = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) e += joint.entry(i) * joint.sign_at(i, var);
    return e;
}

inline double pairwise_correlation(const JointDistribution& joint, int var_i, int var_j) {
    double e = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i)
        e += joint.entry(i) * joint.sign_at(i, var_i) * joint.sign_at(i, var_j);
    return e;
}

inline double triple_correlation(const JointDistribution& joint) {
    if (joint.n() != 3)
        throw std::invalid_argument("triple_correlation: joint must have exactly 3 variables");
    double e = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i)
        e += joint.entry(i) * joint.sign_at(i, 0) * joint.sign_at(i, 1) * joint.sign_at(i, 2);
    return e;
}

/// Marginalize onto a subset of variables (canonical order preserved).
inline JointDistribution marginal(const JointDistribution& joint, std::span<const int> vars) {
    const int m = static_cast<int>(vars.size());
    if (m < 2 || m > joint.n()) throw std::invalid_argument("marginal: bad variable subset");
    std::vector<double> p(std::size_t{1} << m, 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
        std::size_t idx = 0;
        for (int k = 0; k < m; ++k) idx = (idx << 1) | (joint.sign_at(i, vars[k]) < 0 ? 1u : 0u);
        p[idx] += joint.prob(i);
    }
    return JointDistribution(m, std::move(p));
}

}  // namespace qcorr::prob
