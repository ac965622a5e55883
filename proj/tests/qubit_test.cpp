#include "qtomo/measurement.hpp"
#include "qtomo/qubit.hpp"
#include "qtomo/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "support/matrix_oracle.hpp"

using namespace qtomo;

namespace {

QubitState random_state(Rng& rng) {
    // Uniform direction, radius biased toward the surface; purity coverage
    // matters more than any particular measure here.
    const auto dir = rng.unit_vector3();
    const double r = std::sqrt(rng.uniform());
    return QubitState(dir[0] * r, dir[1] * r, dir[2] * r);
}

}  // namespace

TEST(QubitState, RejectsVectorsOutsideBall) {
    EXPECT_NO_THROW(QubitState(0.0, 0.0, 1.0));
    EXPECT_NO_THROW(QubitState(0.6, 0.0, 0.8));
    EXPECT_THROW(QubitState(0.8, 0.8, 0.8), std::invalid_argument);
    EXPECT_THROW(QubitState(1.0 + 1e-6, 0.0, 0.0), std::invalid_argument);
    const double nan = std::nan("");
    EXPECT_THROW(QubitState(nan, 0.0, 0.0), std::invalid_argument);
}

TEST(BornProbs, EigenstateOfMeasuredAxis) {
    const auto p = born_probs(QubitState(0, 0, 1),
                              Povm::projective({0.0, 0.0, 1.0}));
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[1], 0.0);
}

TEST(BornProbs, MutuallyUnbiasedDirections) {
    const auto p = born_probs(QubitState(0, 0, 1),
                              Povm::projective({1.0, 0.0, 0.0}));
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(BornProbs, GeneralStateAgainstMatrixOracle) {
    const QubitState state(0.3, 0.4, 0.5);
    const Vec3 axis{0.0, 1.0, 0.0};
    const auto p = born_probs(state, Povm::projective(axis));
    EXPECT_NEAR(p[0], 0.7, 1e-15);
    EXPECT_NEAR(p[1], 0.3, 1e-15);
    EXPECT_NEAR(p[0], oracle::born_probability({0.3, 0.4, 0.5}, {0, 1, 0}, 0),
                1e-12);
    EXPECT_NEAR(p[1], oracle::born_probability({0.3, 0.4, 0.5}, {0, 1, 0}, 1),
                1e-12);
}

TEST(BornProbs, SumToOneOnRandomPairs) {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const auto state = random_state(rng);
        const auto axis = rng.unit_vector3();
        const auto p = born_probs(state, Povm::projective(axis));
        EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
        EXPECT_GE(p[0], 0.0);
        EXPECT_LE(p[0], 1.0);
    }
}

TEST(Povm, RejectsIncompleteSets) {
    EXPECT_THROW(Povm({{1.0, {0, 0, 1}}, {0.5, {0, 0, -1}}}),
                 std::invalid_argument);
    EXPECT_THROW(Povm({{1.0, {0, 0, 1}}, {1.0, {0, 0, -0.5}}}),
                 std::invalid_argument);
    // Element with |a| > w is not PSD.
    EXPECT_THROW(Povm({{0.5, {0, 0, 1}}, {1.5, {0, 0, -1}}}),
                 std::invalid_argument);
}

TEST(Fidelity, IdenticalStates) {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_state(rng);
        EXPECT_NEAR(fidelity(s, s), 1.0, 1e-12);
    }
}

TEST(Fidelity, OrthogonalPureStates) {
    EXPECT_DOUBLE_EQ(fidelity(QubitState(0, 0, 1), QubitState(0, 0, -1)), 0.0);
}

TEST(Fidelity, PureVsMaximallyMixed) {
    EXPECT_DOUBLE_EQ(fidelity(QubitState(0, 0, 1), QubitState(0, 0, 0)), 0.5);
}

TEST(Fidelity, FrozenGeneralValue) {
    // Independent eigendecomposition oracle gives 0.82 for these two states.
    const QubitState a(0.6, 0.0, 0.0);
    const QubitState b(0.0, 0.6, 0.0);
    EXPECT_NEAR(fidelity(a, b), 0.82, 1e-12);
    EXPECT_NEAR(oracle::fidelity({0.6, 0, 0}, {0, 0.6, 0}), 0.82, 1e-10);
}

TEST(Fidelity, ClosedFormMatchesMatrixSquareRootDefinition) {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_state(rng);
        const auto b = random_state(rng);
        const double closed = fidelity(a, b);
        const double general = oracle::fidelity(a.stokes(), b.stokes());
        EXPECT_NEAR(closed, general, 1e-10)
            << "a=(" << a.s1() << ',' << a.s2() << ',' << a.s3() << ") b=("
            << b.s1() << ',' << b.s2() << ',' << b.s3() << ')';
        EXPECT_NEAR(closed, fidelity(b, a), 1e-15);
    }
}

TEST(BuresDistance, KnownValues) {
    const QubitState up(0, 0, 1);
    EXPECT_DOUBLE_EQ(bures_distance(up, up), 0.0);
    EXPECT_NEAR(bures_distance(up, QubitState(0, 0, -1)), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(bures_distance(up, QubitState(0, 0, 0)),
                0.76536686473017945, 1e-12);
}

TEST(BuresDistance, SquaredBracketsInfidelity) {
    // d^2 = 2(1 - sqrt(F)) implies d^2 <= 2(1-F) <= 2 d^2.
    Rng rng(5);
    for (int i = 0; i < 5000; ++i) {
        const auto a = random_state(rng);
        const auto b = random_state(rng);
        const double f = fidelity(a, b);
        const double d2 = bures_distance(a, b) * bures_distance(a, b);
        EXPECT_LE(d2, 2.0 * (1.0 - f) + 1e-12);
        EXPECT_LE(2.0 * (1.0 - f), 2.0 * d2 + 1e-12);
        EXPECT_LE(bures_distance(a, b), std::sqrt(2.0) + 1e-12);
    }
}

TEST(Embedding, PolesAndEquator) {
    const auto mixed = embed(QubitState(0, 0, 0));
    EXPECT_DOUBLE_EQ(mixed.x4(), 0.5);
    EXPECT_DOUBLE_EQ(mixed.x1(), 0.0);
    const auto pure = embed(QubitState(1, 0, 0));
    EXPECT_DOUBLE_EQ(pure.x1(), 0.5);
    EXPECT_DOUBLE_EQ(pure.x4(), 0.0);
}

TEST(Embedding, RoundTripIsExact) {
    Rng rng(17);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_state(rng);
        const auto coord = embed(s);
        const auto back = project(coord);
        worst = std::max(worst, bloch_distance(s, back));
        const auto& x = coord.coords();
        EXPECT_NEAR(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3], 0.25,
                    1e-15);
        EXPECT_GE(x[3], 0.0);
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(SphereCoord, RejectsOffSpherePoints) {
    EXPECT_THROW(SphereCoord(Vec4{0.5, 0.5, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(SphereCoord(Vec4{0.0, 0.0, 0.0, -0.5}), std::invalid_argument);
    EXPECT_NO_THROW(SphereCoord(Vec4{0.0, 0.0, 0.0, 0.5}));
}

TEST(MubAxes, UnbiasednessHoldsForAllCrossPairs) {
    const auto axes = mub_axes();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int sign : {1, -1}) {
                const auto eig = QubitState(scaled(axes[i].axis(), sign));
                const auto p = born_probs(eig, axes[j].povm());
                if (i == j) {
                    EXPECT_DOUBLE_EQ(p[sign > 0 ? 0 : 1], 1.0);
                } else {
                    EXPECT_DOUBLE_EQ(p[0], 0.5);
                    EXPECT_DOUBLE_EQ(p[1], 0.5);
                }
            }
        }
    }
}

TEST(Waveplates, ZeroAnglesMeasureHV) {
    const auto axis = waveplate_axis(0.0, 0.0);
    EXPECT_NEAR(axis[0], 0.0, 1e-15);
    EXPECT_NEAR(axis[1], 0.0, 1e-15);
    EXPECT_NEAR(axis[2], 1.0, 1e-15);
}

TEST(Waveplates, HalfWaveAt22p5MeasuresDiagonal) {
    const auto axis = waveplate_axis(0.0, 22.5);
    EXPECT_NEAR(axis[0], 1.0, 1e-12);
    EXPECT_NEAR(axis[1], 0.0, 1e-12);
    EXPECT_NEAR(axis[2], 0.0, 1e-12);
}

TEST(Waveplates, MatchesJonesOracleOnAngleGrid) {
    for (double q = -90.0; q < 90.0; q += 7.5) {
        for (double h = -90.0; h < 90.0; h += 7.5) {
            const auto axis = waveplate_axis(q, h);
            const auto expect = oracle::bloch_of(oracle::analyzed_state(q, h));
            EXPECT_NEAR(axis[0], expect[0], 1e-10) << "q=" << q << " h=" << h;
            EXPECT_NEAR(axis[1], expect[1], 1e-10) << "q=" << q << " h=" << h;
            EXPECT_NEAR(axis[2], expect[2], 1e-10) << "q=" << q << " h=" << h;
        }
    }
}

TEST(Waveplates, OneDegreeSweepCoversTheSphereOfAxes) {
    std::vector<Vec3> swept;
    for (double q = -45.0; q < 45.0; q += 1.0)
        for (double h = -45.0; h < 45.0; h += 1.0)
            swept.push_back(waveplate_axis(q, h));

    Rng rng(23);
    double worst_gap = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const auto probe = rng.unit_vector3();
        double best = -1.0;
        for (const auto& b : swept)
            best = std::max(best, std::abs(dot(b, probe)));
        // Angle to the nearest swept axis (sign-insensitive).
        worst_gap = std::max(worst_gap, std::acos(std::min(1.0, best)));
    }
    EXPECT_LT(worst_gap, 0.1);
}

TEST(Waveplates, InversionRoundTrip) {
    Rng rng(29);
    for (int i = 0; i < 500; ++i) {
        const auto target = rng.unit_vector3();
        const auto angles = waveplate_angles_for_axis(target);
        const auto realized = waveplate_axis(angles.quarter_deg, angles.half_deg);
        EXPECT_NEAR(std::abs(dot(realized, target)), 1.0, 1e-9);
        EXPECT_NEAR(dot(realized, target), 1.0, 1e-9);
    }
}

TEST(Waveplates, QuantizedConfigStaysCloseAndSnapsAngles) {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const auto target = rng.unit_vector3();
        const auto cfg = waveplate_config_for_axis(target);
        ASSERT_TRUE(cfg.waveplate_angles().has_value());
        const auto wp = *cfg.waveplate_angles();
        EXPECT_NEAR(std::remainder(wp.quarter_deg, 0.1), 0.0, 1e-9);
        EXPECT_NEAR(std::remainder(wp.half_deg, 0.1), 0.0, 1e-9);
        // 0.1 degree steps on both plates move the axis by < 0.02 rad.
        EXPECT_GT(dot(cfg.axis(), target), std::cos(0.02));
    }
}

TEST(CanonicalAxis, HemisphereRepresentative) {
    const Vec3 a{0.1, -0.2, -0.5};
    const auto c = canonical_axis(a);
    EXPECT_GT(c[2], 0.0);
    EXPECT_EQ(canonical_axis(c)[2], c[2]);
    const auto e = canonical_axis({-1.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(e[0], 1.0);
}
