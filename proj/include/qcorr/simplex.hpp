#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qcorr::lp {

/// One linear equality: coefficients . x = rhs.
struct Equality {
    std::vector<double> coefficients;
    double rhs = 0.0;
};

/// Find x >= 0 with A x = b, or decide that none exists, via phase-1 simplex
/// with Bland's rule (smallest-index pivots). Bland makes the pivot sequence
/// finite and fully deterministic, so infeasibility certificates are
/// reproducible across platforms. Instances are capped at 64 variables and
/// 32 equalities.
inline std::optional<std::vector<double>> feasible_point(std::size_t num_vars,
                                                         const std::vector<Equality>& equalities,
                                                         double tol = 1e-9) {
    const std::size_t m = equalities.size();
    const std::size_t n = num_vars;
    if (n == 0 || n > 64) throw std::invalid_argument("feasible_point: variable count out of range");
    if (m == 0 || m > 32) throw std::invalid_argument("feasible_point: equality count out of range");

    // tableau: m rows of [A | I | b], artificial basis, minimize sum of artificials
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        if (equalities[i].coefficients.size() != n)
            throw std::invalid_argument("feasible_point: coefficient row has wrong length");
        const double flip = equalities[i].rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = flip * equalities[i].coefficients[j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = flip * equalities[i].rhs;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    // reduced-cost row for min sum(artificials): d_j = -sum_i a_ij for original
    // columns, 0 for artificials
    std::vector<double> d(cols - 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) d[j] -= t[i][j];

    constexpr double pivot_eps = 1e-11;
    for (;;) {
        // Bland: entering column = smallest index with negative reduced cost
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols - 1; ++j)
            if (d[j] < -pivot_eps) {
                enter = j;
                break;
            }
        if (enter == cols) break;  // optimal

        // ratio test, ties broken by smallest basis variable index
        std::size_t leave = m;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= pivot_eps) continue;
            const double ratio = t[i][cols - 1] / t[i][enter];
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) break;  // phase 1 is bounded below; nothing to pivot on

        // pivot on (leave, enter)
        const double inv = 1.0 / t[leave][enter];
        for (std::size_t j = 0; j < cols; ++j) t[leave][j] *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = t[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        const double fd = d[enter];
        if (fd != 0.0)
            for (std::size_t j = 0; j < cols - 1; ++j) d[j] -= fd * t[leave][j];
        basis[leave] = enter;
    }

    // phase-1 objective at termination: total mass still sitting on artificials
    double w = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] >= n) w += t[i][cols - 1];
    if (w > tol) return std::nullopt;

    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = std::max(0.0, t[i][cols - 1]);
    return x;
}

}  // namespace qcorr::lp
