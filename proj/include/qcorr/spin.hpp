#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "qcorr/angle.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/tolerances.hpp"

namespace qcorr::spinalg {

/// Measurement outcome of a projective +-1 observable.
enum class Outcome : int { plus = +1, minus = -1 };

constexpr int sign_of(Outcome o) { return static_cast<int>(o); }

inline Outcome outcome_from_sign(int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("outcome sign must be +1 or -1");
    return static_cast<Outcome>(s);
}

inline constexpr Outcome both_outcomes[2] = {Outcome::plus, Outcome::minus};

inline Matrix<2> sigma_z() { return Matrix<2>{1.0, 0.0, 0.0, -1.0}; }
inline Matrix<2> sigma_x() { return Matrix<2>{0.0, 1.0, 1.0, 0.0}; }

/// y-axis Pauli, [[0, i], [-i, 0]]. The handedness is fixed so that
/// rotation(a) = exp(i a sigma_y) carries the z axis toward x; with it,
/// Tr(sigma_phi sigma_theta rho) = cos(phi-theta) + i <sigma_y> sin(phi-theta).
inline Matrix<2> sigma_y() { return Matrix<2>{0.0, cplx{0.0, 1.0}, cplx{0.0, -1.0}, 0.0}; }

/// Rotation in the measurement plane: [[cos a, -sin a], [sin a, cos a]].
/// Conjugating sigma_z by rotation(theta/2) gives pauli_axis(theta).
inline Matrix<2> rotation(Angle half_angle) {
    const double c = std::cos(half_angle.radians);
    const double s = std::sin(half_angle.radians);
    return Matrix<2>{c, -s, s, c};
}

/// Spin observable along the axis at angle theta in the x-z plane:
/// cos(theta) sigma_z + sin(theta) sigma_x. Hermitian, squares to I.
inline Matrix<2> pauli_axis(Angle theta) {
    const double c = std::cos(theta.radians);
    const double s = std::sin(theta.radians);
    return Matrix<2>{c, s, s, -c};
}

struct EigenPair {
    Vector<2> up;    ///< +1 eigenvector of pauli_axis(theta)
    Vector<2> down;  ///< -1 eigenvector
};

/// Real eigenbasis of pauli_axis(theta): up = (cos t/2, sin t/2),
/// down = (-sin t/2, cos t/2).
inline EigenPair axis_eigenstates(Angle theta) {
    const double c = std::cos(theta.radians / 2.0);
    const double s = std::sin(theta.radians / 2.0);
    return {Vector<2>{c, s}, Vector<2>{-s, c}};
}

/// +1 eigenvector of sigma_y in this library's convention: (1, -i)/sqrt(2).
inline Vector<2> up_y() {
    const double r = 1.0 / std::sqrt(2.0);
    return Vector<2>{r, cplx{0.0, -r}};
}

inline Vector<2> up_z() { return Vector<2>{1.0, 0.0}; }

/// Two-spin singlet (|ud> - |du>)/sqrt(2) in the product basis (uu, ud, du, dd).
inline Vector<4> singlet() {
    const double r = 1.0 / std::sqrt(2.0);
    return Vector<4>{0.0, r, -r, 0.0};
}

/// Validated density matrix: hermitian, unit trace, eigenvalues above -psd slack.
template <std::size_t N>
class DensityMatrix {
  public:
    static DensityMatrix from_matrix(const Matrix<N>& m, const Tolerances& tol = tolerances()) {
        if (!m.is_hermitian(tol.equality))
            throw std::invalid_argument("DensityMatrix: not hermitian");
        if (std::abs(m.trace() - cplx{1.0}) > tol.equality)
            throw std::invalid_argument("DensityMatrix: trace is not 1");
        if (min_eigenvalue(m) < -tol.psd)
            throw std::invalid_argument("DensityMatrix: not positive semidefinite");
        return DensityMatrix(m);
    }

    static DensityMatrix pure(const Vector<N>& state) {
        if (std::abs(state.norm() - 1.0) > 1e-10)
            throw std::invalid_argument("DensityMatrix: state is not normalized");
        return DensityMatrix(state.outer());
    }

    static DensityMatrix maximally_mixed() {
        return DensityMatrix(cplx{1.0 / static_cast<double>(N)} * Matrix<N>::identity());
    }

    /// rho = (I + px sx + py sy + pz sz)/2, |p| <= 1. Dimension 2 only.
    static DensityMatrix from_bloch(double px, double py, double pz)
        requires(N == 2)
    {
        if (px * px + py * py + pz * pz > 1.0 + 1e-12)
            throw std::invalid_argument("DensityMatrix: Bloch vector outside unit ball");
        Matrix<2> m = Matrix<2>::identity() + cplx{px} * sigma_x() + cplx{py} * sigma_y() +
                      cplx{pz} * sigma_z();
        return DensityMatrix(cplx{0.5} * m);
    }

    /// For matrices already known valid by construction (projected branches,
    /// outer products of unit states). Skips the eigenvalue check.
    static DensityMatrix unchecked(const Matrix<N>& m) { return DensityMatrix(m); }

    const Matrix<N>& matrix() const { return m_; }

  private:
    explicit DensityMatrix(const Matrix<N>& m) : m_(m) {}
    Matrix<N> m_;
};

/// Tr(op rho). Real up to tolerance when op is hermitian.
template <std::size_t N>
cplx expectation(const Matrix<N>& op, const DensityMatrix<N>& rho) {
    return (op * rho.matrix()).trace();
}

/// Projector onto the outcome eigenspace of pauli_axis(theta).
inline Matrix<2> axis_projector(Angle theta, Outcome outcome) {
    const cplx half{0.5};
    if (outcome == Outcome::plus) return half * (Matrix<2>::identity() + pauli_axis(theta));
    return half * (Matrix<2>::identity() - pauli_axis(theta));
}

/// Result of a projective measurement branch. An outcome whose probability
/// falls below the impossible threshold carries no post state.
template <std::size_t N>
struct CollapseResult {
    double probability = 0.0;
    std::optional<DensityMatrix<N>> post_state;

    [[nodiscard]] bool impossible() const { return !post_state.has_value(); }
};

/// Project rho onto an eigenprojector and renormalize the branch.
template <std::size_t N>
CollapseResult<N> collapse(const DensityMatrix<N>& rho, const Matrix<N>& projector,
                           const Tolerances& tol = tolerances()) {
    const double p = (projector * rho.matrix()).trace().real();
    if (p < tol.impossible) return {std::max(p, 0.0), std::nullopt};
    Matrix<N> post = projector * rho.matrix() * projector;
    post = cplx{1.0 / p} * post;
    // P rho P / p is hermitian, PSD and unit-trace by construction
    return {p, DensityMatrix<N>::unchecked(post)};
}

/// Measure pauli_axis(theta) on a one-spin state: Born probability of the
/// outcome plus the collapsed state. Probabilities over both outcomes sum to 1.
inline CollapseResult<2> project_and_collapse(const DensityMatrix<2>& rho, Angle theta,
                                              Outcome outcome,
                                              const Tolerances& tol = tolerances()) {
    return collapse(rho, axis_projector(theta, outcome), tol);
}

}  // namespace qcorr::spinalg
