#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ladder/core.hpp"
#include "ladder/propagator.hpp"

using namespace ladder;

namespace {

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
    return (a + a.adjoint()) * 0.5;
}

StateVector random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(n(rng), n(rng));
    return StateVector(v / v.norm());
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Diagonalize, DiagonalMatrix) {
    Matrix h = Matrix::Zero(3, 3);
    h.diagonal() << 3, 1, 2;
    const auto dec = diagonalize(h);
    EXPECT_NEAR(dec.eigenvalues(0), 1, 1e-15);
    EXPECT_NEAR(dec.eigenvalues(1), 2, 1e-15);
    EXPECT_NEAR(dec.eigenvalues(2), 3, 1e-15);
    // Permutation eigenvectors up to phase.
    EXPECT_NEAR(std::abs(dec.eigenvectors(1, 0)), 1, 1e-15);
    EXPECT_NEAR(std::abs(dec.eigenvectors(2, 1)), 1, 1e-15);
    EXPECT_NEAR(std::abs(dec.eigenvectors(0, 2)), 1, 1e-15);
}

TEST(Diagonalize, SingleRungBlocks) {
    LadderParams p;
    p.n_rungs = 1;
    const auto dec = diagonalize(build_hamiltonian(p));
    const double expected[] = {-1.5, -0.5, 0.5, 1.5};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(dec.eigenvalues(i), expected[i], 1e-12);
}

TEST(Diagonalize, ReconstructionAndUnitarity) {
    std::mt19937_64 rng(11);
    for (int dim : {16, 64}) {
        const Matrix h = random_hermitian(dim, rng);
        const auto dec = diagonalize(h);
        const Matrix v = dec.eigenvectors;
        EXPECT_LE(max_abs(v * dec.eigenvalues.asDiagonal() * v.adjoint() - h), 1e-9 * max_abs(h));
        EXPECT_LE(max_abs(v.adjoint() * v - Matrix::Identity(dim, dim)), 1e-10);
        for (int i = 1; i < dim; ++i) EXPECT_LE(dec.eigenvalues(i - 1), dec.eigenvalues(i));
    }
    const auto ref = diagonalize(build_hamiltonian(LadderParams::reference()));
    const Matrix h = build_hamiltonian(LadderParams::reference()).matrix();
    EXPECT_LE(max_abs(ref.eigenvectors * ref.eigenvalues.asDiagonal() * ref.eigenvectors.adjoint() - h),
              1e-9 * max_abs(h));
}

TEST(Diagonalize, RejectsNonHermitian) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1;
    EXPECT_THROW(diagonalize(m), std::invalid_argument);
}

TEST(TimeGridType, Validation) {
    EXPECT_THROW(TimeGrid(-1, 1, 3), std::invalid_argument);
    EXPECT_THROW(TimeGrid(1, 1, 3), std::invalid_argument);
    EXPECT_THROW(TimeGrid(0, 1, 1), std::invalid_argument);
    const TimeGrid g(0, 10, 4001);
    EXPECT_DOUBLE_EQ(g.step(), 0.0025);
    EXPECT_EQ(g.at(4000), 10.0);
    const auto t = g.times();
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LT(t[k - 1], t[k]);
    const auto w = TimeGrid::with_max_step(0, 1, 0.3);
    EXPECT_EQ(w.size(), 5u);
    EXPECT_LE(w.step(), 0.3);
}

TEST(Evolve, IdentityAtZeroAndEigenPhase) {
    std::mt19937_64 rng(5);
    const Matrix h = random_hermitian(16, rng);
    const auto dec = diagonalize(h);
    const auto psi0 = random_state(16, rng);
    EXPECT_LE((evolve_state(dec, psi0, 0.0).amplitudes() - psi0.amplitudes()).cwiseAbs().maxCoeff(), 1e-13);

    const Vector v = dec.eigenvectors.col(4);
    const double e = dec.eigenvalues(4);
    const double t = 2.7;
    const Vector out = evolve_state(dec, StateVector(v), t).amplitudes();
    EXPECT_LE((out - std::polar(1.0, -e * t) * v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Evolve, TwoLevelRabiOracle) {
    // Single rung, g = 1, d = 0: H = XX acts on {|00>, |11>} as sigma_x, so
    // |<11|psi(t)>|^2 = sin^2(J t).
    LadderParams p;
    p.n_rungs = 1;
    p.d = 0.0;
    const auto dec = diagonalize(build_hamiltonian(p));
    const auto psi0 = build_initial_state(InitialState::separable_00, 2);
    for (double t : {0.1, std::numbers::pi / 4, 1.0, std::numbers::pi / 2, 3.3}) {
        const Vector psi = evolve_state(dec, psi0, t).amplitudes();
        EXPECT_NEAR(std::norm(psi(3)), std::pow(std::sin(t), 2), 1e-12) << t;
        EXPECT_NEAR(std::norm(psi(0)), std::pow(std::cos(t), 2), 1e-12) << t;
    }
    EXPECT_NEAR(std::norm(evolve_state(dec, psi0, std::numbers::pi / 4).amplitudes()(3)), 0.5, 1e-12);
}

TEST(Evolve, DimensionMismatch) {
    std::mt19937_64 rng(1);
    const auto dec = diagonalize(random_hermitian(8, rng));
    EXPECT_THROW(evolve_state(dec, random_state(4, rng), 1.0), std::invalid_argument);
}

TEST(Evolve, Composition) {
    std::mt19937_64 rng(9);
    const auto dec = diagonalize(random_hermitian(32, rng));
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi0 = random_state(32, rng);
        const double t1 = 0.37 * trial, t2 = 1.9;
        const auto direct = evolve_state(dec, psi0, t1 + t2);
        const auto stepped = evolve_state(dec, evolve_state(dec, psi0, t1), t2);
        EXPECT_LE((direct.amplitudes() - stepped.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(EvolveSeries, MatchesPointwiseEvolution) {
    std::mt19937_64 rng(2);
    const auto dec = diagonalize(random_hermitian(16, rng));
    const auto psi0 = random_state(16, rng);
    const TimeGrid two(0.0, 1.5, 2);
    const auto pair = evolve_series(dec, psi0, two);
    ASSERT_EQ(pair.size(), 2u);
    EXPECT_LE((pair[0].amplitudes() - psi0.amplitudes()).cwiseAbs().maxCoeff(), 1e-13);

    const TimeGrid grid(0.5, 7.0, 301);  // crosses block boundaries
    const auto series = evolve_series(dec, psi0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto single = evolve_state(dec, psi0, grid.at(k));
        EXPECT_LE((series[k].amplitudes() - single.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(EvolveSeries, ReferenceNormsAndEnergy) {
    const auto p = LadderParams::reference();
    const auto h = build_hamiltonian(p);
    const auto dec = diagonalize(h);
    const auto psi0 = build_initial_state(InitialState::phi_plus, p);
    const double e0 = expectation(h, psi0.amplitudes());
    double worst_norm = 0.0, worst_energy = 0.0;
    for_each_state(dec, psi0, TimeGrid(0.0, 10.0, 4001), [&](std::size_t, const Vector& psi) {
        worst_norm = std::max(worst_norm, std::abs(psi.norm() - 1.0));
        worst_energy = std::max(worst_energy, std::abs(expectation(h, psi) - e0));
    });
    EXPECT_LE(worst_norm, 1e-12);
    EXPECT_LE(worst_energy, 1e-9 * std::max(1.0, std::abs(e0)));
}
