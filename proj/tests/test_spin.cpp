#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qcorr/rng.hpp"
#include "qcorr/spin.hpp"

using namespace qcorr;
using namespace qcorr::spinalg;

namespace {

constexpr double pi = std::numbers::pi;

bool matrix_close(const Matrix<2>& a, const Matrix<2>& b, double tol = 1e-12) {
    return a.max_abs_diff(b) <= tol;
}

DensityMatrix<2> random_pure(rng::SplitMix& gen) {
    // Haar-ish pure qubit state from two angles
    const double t = gen.next_in(0.0, pi);
    const double p = gen.next_angle();
    const Vector<2> psi{std::cos(t / 2), cplx{std::cos(p), std::sin(p)} * std::sin(t / 2)};
    return DensityMatrix<2>::pure(psi);
}

}  // namespace

TEST_CASE("pauli_axis at the reference angles", "[spinalg]") {
    REQUIRE(matrix_close(pauli_axis(Angle{0.0}), sigma_z()));
    REQUIRE(matrix_close(pauli_axis(Angle{pi / 2}), sigma_x()));

    const Matrix<2> third = pauli_axis(Angle{pi / 3});
    const Matrix<2> expected{0.5, 0.8660254037844386, 0.8660254037844386, -0.5};
    REQUIRE(matrix_close(third, expected));
}

TEST_CASE("pauli_axis squares to identity and is hermitian", "[spinalg][property]") {
    rng::SplitMix gen(11);
    for (int i = 0; i < 100; ++i) {
        const Angle theta{gen.next_in(-10.0, 10.0)};
        const Matrix<2> s = pauli_axis(theta);
        REQUIRE(s.is_hermitian());
        REQUIRE(matrix_close(s * s, Matrix<2>::identity()));
    }
}

TEST_CASE("rotation at the reference angles", "[spinalg]") {
    REQUIRE(matrix_close(rotation(Angle{0.0}), Matrix<2>::identity()));
    const Matrix<2> quarter{0.0, -1.0, 1.0, 0.0};
    REQUIRE(matrix_close(rotation(Angle{pi / 2}), quarter));
}

TEST_CASE("rotation is unitary", "[spinalg][property]") {
    rng::SplitMix gen(12);
    for (int i = 0; i < 100; ++i) {
        const Matrix<2> r = rotation(Angle{gen.next_in(-10.0, 10.0)});
        REQUIRE(matrix_close(r * r.adjoint(), Matrix<2>::identity()));
    }
}

TEST_CASE("conjugating sigma_z by the half-angle rotation gives pauli_axis", "[spinalg][property]") {
    const Matrix<2> conj = rotation(Angle{pi / 4}) * sigma_z() * rotation(Angle{pi / 4}).adjoint();
    REQUIRE(matrix_close(conj, pauli_axis(Angle{pi / 2})));

    rng::SplitMix gen(13);
    for (int i = 0; i < 100; ++i) {
        const double theta = gen.next_in(-10.0, 10.0);
        const Matrix<2> lhs =
            rotation(Angle{theta / 2}) * sigma_z() * rotation(Angle{theta / 2}).adjoint();
        REQUIRE(matrix_close(lhs, pauli_axis(Angle{theta})));
    }
}

TEST_CASE("axis eigenstates", "[spinalg]") {
    const auto z = axis_eigenstates(Angle{0.0});
    REQUIRE(std::abs(z.up[0] - 1.0) < 1e-12);
    REQUIRE(std::abs(z.up[1]) < 1e-12);
    REQUIRE(std::abs(z.down[1] - 1.0) < 1e-12);

    // flipped axis: up is |down_z> up to global phase
    const auto flipped = axis_eigenstates(Angle{pi});
    REQUIRE(std::abs(std::abs(flipped.up.dot(Vector<2>{0.0, 1.0})) - 1.0) < 1e-10);

    const auto x = axis_eigenstates(Angle{pi / 2});
    const double r = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(x.up[0] - r) < 1e-12);
    REQUIRE(std::abs(x.up[1] - r) < 1e-12);
}

TEST_CASE("axis eigenstates satisfy the eigen-equations and are orthonormal",
          "[spinalg][property]") {
    rng::SplitMix gen(14);
    for (int i = 0; i < 100; ++i) {
        const Angle theta{gen.next_in(-10.0, 10.0)};
        const auto basis = axis_eigenstates(theta);
        const Matrix<2> s = pauli_axis(theta);
        const Vector<2> su = s * basis.up;
        const Vector<2> sd = s * basis.down;
        for (std::size_t k = 0; k < 2; ++k) {
            REQUIRE(std::abs(su[k] - basis.up[k]) < 1e-12);
            REQUIRE(std::abs(sd[k] + basis.down[k]) < 1e-12);
        }
        REQUIRE(std::abs(basis.up.dot(basis.down)) < 1e-12);
        REQUIRE(std::abs(basis.up.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("singlet amplitudes and norm", "[spinalg]") {
    const Vector<4> psi = singlet();
    REQUIRE(std::abs(psi[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
    REQUIRE(std::abs(psi[2] + 1.0 / std::sqrt(2.0)) < 1e-15);
    REQUIRE(std::abs(psi[0]) == 0.0);
    REQUIRE(std::abs(psi[3]) == 0.0);
    REQUIRE(std::abs(psi.norm() - 1.0) < 1e-15);
}

TEST_CASE("singlet is perfectly anti-correlated on every matched axis", "[spinalg][property]") {
    const Vector<4> psi = singlet();
    rng::SplitMix gen(15);
    for (int i = 0; i < 100; ++i) {
        const Angle theta{i == 0 ? 0.3 : gen.next_in(-10.0, 10.0)};
        const Matrix<4> both = tensor(pauli_axis(theta), pauli_axis(theta));
        REQUIRE(std::abs(psi.dot(both * psi) - cplx{-1.0}) < 1e-12);
    }
}

TEST_CASE("tensor products", "[spinalg]") {
    REQUIRE(tensor(Matrix<2>::identity(), Matrix<2>::identity())
                .max_abs_diff(Matrix<4>::identity()) < 1e-15);

    const Matrix<4> zz = tensor(sigma_z(), sigma_z());
    REQUIRE(zz(0, 0) == cplx{1.0});
    REQUIRE(zz(1, 1) == cplx{-1.0});
    REQUIRE(zz(2, 2) == cplx{-1.0});
    REQUIRE(zz(3, 3) == cplx{1.0});

    const Vector<4> basis00 = tensor(Vector<2>{1.0, 0.0}, Vector<2>{1.0, 0.0});
    const Vector<4> moved = tensor(sigma_x(), sigma_z()) * basis00;
    REQUIRE(std::abs(moved[2] - 1.0) < 1e-15);
    REQUIRE(std::abs(moved[0]) + std::abs(moved[1]) + std::abs(moved[3]) < 1e-15);
}

TEST_CASE("tensor respects factor-wise action", "[spinalg][property]") {
    rng::SplitMix gen(16);
    for (int i = 0; i < 50; ++i) {
        const Matrix<2> a = pauli_axis(Angle{gen.next_in(-5.0, 5.0)});
        const Matrix<2> b = rotation(Angle{gen.next_in(-5.0, 5.0)});
        const Vector<2> u = axis_eigenstates(Angle{gen.next_in(-5.0, 5.0)}).up;
        const Vector<2> v = axis_eigenstates(Angle{gen.next_in(-5.0, 5.0)}).down;
        const Vector<4> lhs = tensor(a, b) * tensor(u, v);
        const Vector<4> rhs = tensor(a * u, b * v);
        for (std::size_t k = 0; k < 4; ++k) REQUIRE(std::abs(lhs[k] - rhs[k]) < 1e-12);
    }
}

TEST_CASE("expectation values", "[spinalg]") {
    const auto up = DensityMatrix<2>::pure(up_z());
    REQUIRE(std::abs(expectation(Matrix<2>::identity(), up) - cplx{1.0}) < 1e-15);
    REQUIRE(std::abs(expectation(sigma_z(), up) - cplx{1.0}) < 1e-15);
    REQUIRE(std::abs(expectation(pauli_axis(Angle{pi / 5}), up) - cplx{0.8090169943749475}) <
            1e-12);

    const auto mixed = DensityMatrix<2>::maximally_mixed();
    REQUIRE(std::abs(expectation(Matrix<2>::identity(), mixed) - cplx{1.0}) < 1e-15);

    // expectation of a hermitian operator is real
    rng::SplitMix gen(17);
    for (int i = 0; i < 50; ++i) {
        const auto rho = random_pure(gen);
        REQUIRE(std::abs(expectation(pauli_axis(Angle{gen.next_in(-5.0, 5.0)}), rho).imag()) <
                1e-12);
    }
}

TEST_CASE("projective collapse at the reference cases", "[spinalg]") {
    const auto up = DensityMatrix<2>::pure(up_z());

    const auto same = project_and_collapse(up, Angle{0.0}, Outcome::plus);
    REQUIRE(same.probability == Catch::Approx(1.0).margin(1e-12));
    REQUIRE_FALSE(same.impossible());
    REQUIRE(same.post_state->matrix().max_abs_diff(up.matrix()) < 1e-12);

    const auto orthogonal = project_and_collapse(up, Angle{pi}, Outcome::plus);
    REQUIRE(orthogonal.probability < 1e-14);
    REQUIRE(orthogonal.impossible());

    const auto tilted = project_and_collapse(up, Angle{pi / 3}, Outcome::plus);
    REQUIRE(tilted.probability == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("collapse probabilities over both outcomes sum to 1", "[spinalg][property]") {
    rng::SplitMix gen(18);
    for (int i = 0; i < 200; ++i) {
        const auto rho = random_pure(gen);
        const Angle theta{gen.next_in(-10.0, 10.0)};
        const double total = project_and_collapse(rho, theta, Outcome::plus).probability +
                             project_and_collapse(rho, theta, Outcome::minus).probability;
        REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("density matrix validation rejects bad inputs", "[spinalg]") {
    // not hermitian
    REQUIRE_THROWS_AS(DensityMatrix<2>::from_matrix(Matrix<2>{1.0, 1.0, 0.0, 0.0}),
                      std::invalid_argument);
    // wrong trace
    REQUIRE_THROWS_AS(DensityMatrix<2>::from_matrix(Matrix<2>{0.9, 0.0, 0.0, 0.9}),
                      std::invalid_argument);
    // hermitian, trace 1, but indefinite
    REQUIRE_THROWS_AS(DensityMatrix<2>::from_matrix(Matrix<2>{1.5, 0.0, 0.0, -0.5}),
                      std::invalid_argument);
    // Bloch vector outside the ball
    REQUIRE_THROWS_AS(DensityMatrix<2>::from_bloch(0.9, 0.9, 0.9), std::invalid_argument);
    // valid mixed state passes
    REQUIRE_NOTHROW(DensityMatrix<2>::from_bloch(0.3, 0.2, -0.4));
}

TEST_CASE("hermitian eigenvalues", "[spinalg]") {
    const auto ev2 = hermitian_eigenvalues(sigma_z());
    REQUIRE(ev2[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(ev2[1] == Catch::Approx(1.0).margin(1e-12));

    const auto evy = hermitian_eigenvalues(sigma_y());
    REQUIRE(evy[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(evy[1] == Catch::Approx(1.0).margin(1e-12));

    const Matrix<4> zz = tensor(sigma_z(), sigma_z());
    const auto ev4 = hermitian_eigenvalues(zz);
    REQUIRE(ev4[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(ev4[3] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("sigma_y convention", "[spinalg]") {
    // up_y is the +1 eigenvector of sigma_y
    const Vector<2> moved = sigma_y() * up_y();
    REQUIRE(std::abs(moved[0] - up_y()[0]) < 1e-15);
    REQUIRE(std::abs(moved[1] - up_y()[1]) < 1e-15);
    // and rotation(a) = cos a I + i sin a sigma_y entrywise
    const double a = 0.7;
    const Matrix<2> built =
        cplx{std::cos(a)} * Matrix<2>::identity() + cplx{0.0, std::sin(a)} * sigma_y();
    REQUIRE(built.max_abs_diff(rotation(Angle{a})) < 1e-15);
}
