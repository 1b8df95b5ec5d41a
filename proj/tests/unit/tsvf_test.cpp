#include <cmath>

#include <gtest/gtest.h>

#include <tsvsim/random_stream.hpp>
#include <tsvsim/tsvf.hpp>

#include "../support/oracles.hpp"

using namespace tsvsim;

namespace {

PureState in_plane(double theta) {
    Amplitudes v(2);
    v << std::cos(theta / 2), std::sin(theta / 2);
    return PureState(v);
}

Matrix rotation_y(double theta) {
    Matrix u(2, 2);
    u << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
    return u;
}

}  // namespace

TEST(Abl, PrePostZAndX) {
    const TwoStateVector zx(in_plane(0.0), in_plane(oracle::kPi / 2));
    EXPECT_NEAR(abl_probability(zx, sigma_z(), Spin::Up), 1.0, 1e-12);
    EXPECT_NEAR(abl_probability(zx, sigma_x(), Spin::Up), 1.0, 1e-12);
    const TwoStateVector xx(in_plane(oracle::kPi / 2), in_plane(oracle::kPi / 2));
    EXPECT_NEAR(abl_probability(xx, sigma_z(), Spin::Up), 0.5, 1e-12);
}

TEST(Abl, ProbabilitiesSumToOne) {
    for (double a : {0.1, 1.0, 2.5}) {
        for (double b : {0.4, 3.0, 5.0}) {
            const TwoStateVector tsv(in_plane(a), in_plane(b));
            const auto op = spin_operator(Orientation(0.7));
            EXPECT_NEAR(abl_probability(tsv, op, Spin::Up) + abl_probability(tsv, op, Spin::Down), 1.0, 1e-12);
        }
    }
}

TEST(Abl, DegenerateThrows) {
    // Pre-selected up along z, post-selected down along z, measuring z: every
    // branch vanishes.
    const TwoStateVector tsv(in_plane(0.0), in_plane(oracle::kPi));
    EXPECT_THROW(abl_probability(tsv, sigma_z(), Spin::Up), DegenerateSelectionError);
}

TEST(WeakValue, HalfAngleFormula) {
    // <b|sigma_z|a>/<b|a> = cos((a+b)/2) / cos((a-b)/2) for in-plane states.
    for (double a : {0.0, 0.5, 1.2}) {
        for (double b : {0.3, 2.0, 2.9}) {
            const TwoStateVector tsv(in_plane(a), in_plane(b));
            const Complex w = weak_value(tsv, sigma_z());
            EXPECT_NEAR(w.real(), std::cos((a + b) / 2) / std::cos((a - b) / 2), 1e-10);
            EXPECT_NEAR(w.imag(), 0.0, 1e-12);
        }
    }
}

TEST(WeakValue, AnomalousBeyondSpectrum) {
    const TwoStateVector tsv(in_plane(oracle::rad(10.0)), in_plane(oracle::rad(170.0)));
    EXPECT_GT(std::abs(weak_value(tsv, sigma_x()).real()), 1.0);
}

TEST(WeakValue, OrthogonalSelectionThrows) {
    const TwoStateVector tsv(in_plane(0.0), in_plane(oracle::kPi));
    EXPECT_TRUE(tsv.degenerate());
    EXPECT_THROW(weak_value(tsv, sigma_x()), DegenerateSelectionError);
}

TEST(WeakValue, EigenstateSelectionGivesEigenvalue) {
    const auto op = spin_operator(Orientation::from_degrees(40.0));
    const TwoStateVector tsv(eigenpair(op, Spin::Down), in_plane(1.1));
    EXPECT_NEAR(weak_value(tsv, op).real(), -1.0, 1e-12);
}

TEST(Evolve, ForwardAndBackwardGiveSameAmplitude) {
    const UnitaryEvolution u(rotation_y(0.8));
    const TwoStateVector tsv(in_plane(0.3), in_plane(1.9));
    const auto f = evolve(tsv, u, Direction::Forward);
    const auto b = evolve(tsv, u, Direction::Backward);
    // <phi|U|psi> either way.
    EXPECT_NEAR(std::abs(f.overlap() - b.overlap()), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(f.overlap()), std::abs(std::cos((1.9 - 1.1) / 2)), 1e-12);
}

TEST(Evolve, RejectsNonUnitary) {
    Matrix m(2, 2);
    m << 1.0, 1.0, 0.0, 1.0;
    EXPECT_THROW(UnitaryEvolution{m}, std::invalid_argument);
    EXPECT_NO_THROW(UnitaryEvolution::identity(4));
}

TEST(EnsembleWeakAverage, ConvergesToExpectation) {
    const auto state = in_plane(oracle::rad(70.0));
    const auto op = spin_operator(Orientation::from_degrees(10.0));
    const PointerConfig cfg(1.0, 1.0, 1000);
    RandomStream rng(77);
    const long long trials = 200000;
    const double avg = ensemble_weak_average(state, op, cfg, trials, rng);
    const double se = cfg.delta() / cfg.coupling() / std::sqrt(double(trials));
    EXPECT_NEAR(avg, std::cos(oracle::rad(60.0)), 5.0 * se);
}
