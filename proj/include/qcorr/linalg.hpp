#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

#include "qcorr/tolerances.hpp"

namespace qcorr::spinalg {

using cplx = std::complex<double>;

/// Dense complex square matrix of fixed dimension 2 or 4, row-major.
/// Deliberately minimal: just the arithmetic the spin algebra needs.
template <std::size_t N>
class Matrix {
    static_assert(N == 2 || N == 4, "only dimensions 2 and 4 are supported");

  public:
    static constexpr std::size_t dim = N;

    constexpr Matrix() = default;

    Matrix(std::initializer_list<cplx> entries) {
        if (entries.size() != N * N) throw std::invalid_argument("Matrix: wrong entry count");
        std::size_t k = 0;
        for (const cplx& e : entries) e_[k++] = e;
    }

    static Matrix identity() {
        Matrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(std::size_t r, std::size_t c) { return e_[r * N + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return e_[r * N + c]; }

    Matrix operator+(const Matrix& o) const {
        Matrix r;
        for (std::size_t k = 0; k < N * N; ++k) r.e_[k] = e_[k] + o.e_[k];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        Matrix r;
        for (std::size_t k = 0; k < N * N; ++k) r.e_[k] = e_[k] - o.e_[k];
        return r;
    }

    Matrix operator*(const Matrix& o) const {
        Matrix r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const cplx a = (*this)(i, k);
                if (a == cplx{}) continue;
                for (std::size_t j = 0; j < N; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    friend Matrix operator*(cplx s, const Matrix& m) {
        Matrix r;
        for (std::size_t k = 0; k < N * N; ++k) r.e_[k] = s * m.e_[k];
        return r;
    }

    Matrix adjoint() const {
        Matrix r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    cplx trace() const {
        cplx t{};
        for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }

    [[nodiscard]] bool is_hermitian(double tol = tolerances().equality) const {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
        return true;
    }

    [[nodiscard]] double max_abs_diff(const Matrix& o) const {
        double d = 0.0;
        for (std::size_t k = 0; k < N * N; ++k) d = std::max(d, std::abs(e_[k] - o.e_[k]));
        return d;
    }

  private:
    std::array<cplx, N * N> e_{};
};

/// Complex column vector of dimension 2 or 4.
template <std::size_t N>
class Vector {
    static_assert(N == 2 || N == 4, "only dimensions 2 and 4 are supported");

  public:
    static constexpr std::size_t dim = N;

    constexpr Vector() = default;

    Vector(std::initializer_list<cplx> amps) {
        if (amps.size() != N) throw std::invalid_argument("Vector: wrong amplitude count");
        std::size_t k = 0;
        for (const cplx& a : amps) e_[k++] = a;
    }

    cplx& operator[](std::size_t i) { return e_[i]; }
    const cplx& operator[](std::size_t i) const { return e_[i]; }

    /// Inner product, conjugate-linear in this (the left) argument.
    cplx dot(const Vector& o) const {
        cplx s{};
        for (std::size_t i = 0; i < N; ++i) s += std::conj(e_[i]) * o.e_[i];
        return s;
    }

    [[nodiscard]] double norm() const { return std::sqrt(dot(*this).real()); }

    [[nodiscard]] Vector normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("Vector: cannot normalize zero vector");
        Vector r;
        for (std::size_t i = 0; i < N; ++i) r.e_[i] = e_[i] / n;
        return r;
    }

    Vector operator+(const Vector& o) const {
        Vector r;
        for (std::size_t i = 0; i < N; ++i) r.e_[i] = e_[i] + o.e_[i];
        return r;
    }

    friend Vector operator*(cplx s, const Vector& v) {
        Vector r;
        for (std::size_t i = 0; i < N; ++i) r.e_[i] = s * v.e_[i];
        return r;
    }

    /// |v><v| as a matrix.
    [[nodiscard]] Matrix<N> outer() const {
        Matrix<N> m;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = e_[i] * std::conj(e_[j]);
        return m;
    }

  private:
    std::array<cplx, N> e_{};
};

template <std::size_t N>
Vector<N> operator*(const Matrix<N>& m, const Vector<N>& v) {
    Vector<N> r;
    for (std::size_t i = 0; i < N; ++i) {
        cplx s{};
        for (std::size_t j = 0; j < N; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

/// Kronecker product; index order is (left, right), i.e. row i = 2*i1 + i2.
inline Matrix<4> tensor(const Matrix<2>& a, const Matrix<2>& b) {
    Matrix<4> r;
    for (std::size_t i1 = 0; i1 < 2; ++i1)
        for (std::size_t j1 = 0; j1 < 2; ++j1)
            for (std::size_t i2 = 0; i2 < 2; ++i2)
                for (std::size_t j2 = 0; j2 < 2; ++j2)
                    r(2 * i1 + i2, 2 * j1 + j2) = a(i1, j1) * b(i2, j2);
    return r;
}

inline Vector<4> tensor(const Vector<2>& a, const Vector<2>& b) {
    Vector<4> r;
    for (std::size_t i1 = 0; i1 < 2; ++i1)
        for (std::size_t i2 = 0; i2 < 2; ++i2) r[2 * i1 + i2] = a[i1] * b[i2];
    return r;
}

namespace detail {

/// Cyclic Jacobi sweeps on a small real symmetric matrix; returns the
/// eigenvalues sorted ascending. Plenty for 8x8.
template <std::size_t M>
std::array<double, M> jacobi_eigenvalues(std::array<std::array<double, M>, M> a) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < M; ++p)
            for (std::size_t q = p + 1; q < M; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < M; ++p)
            for (std::size_t q = p + 1; q < M; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < M; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < M; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::array<double, M> ev{};
    for (std::size_t i = 0; i < M; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace detail

/// Eigenvalues of a hermitian matrix, ascending. Uses the real symmetric
/// embedding [[X, -Y], [Y, X]] of H = X + iY, whose spectrum is that of H
/// doubled; every second sorted value is returned.
template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const Matrix<N>& h) {
    std::array<std::array<double, 2 * N>, 2 * N> b{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const double x = h(i, j).real();
            const double y = h(i, j).imag();
            b[i][j] = x;
            b[N + i][N + j] = x;
            b[i][N + j] = -y;
            b[N + i][j] = y;
        }
    const auto doubled = detail::jacobi_eigenvalues<2 * N>(b);
    std::array<double, N> ev{};
    for (std::size_t i = 0; i < N; ++i) ev[i] = doubled[2 * i];
    return ev;
}

template <std::size_t N>
double min_eigenvalue(const Matrix<N>& h) {
    return hermitian_eigenvalues(h)[0];
}

}  // namespace qcorr::spinalg
