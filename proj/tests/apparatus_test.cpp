#include "qtomo/apparatus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace qtomo;

namespace {

const NoiseModel kIdeal = NoiseModel::ideal();

NoiseModel pilot_noise(double source, double d0, double d1, double e0,
                       double e1) {
    NoiseModel n;
    n.dark_enabled = true;
    n.efficiency_enabled = true;
    n.source_rate = source;
    n.dark_rates = {d0, d1};
    n.efficiencies = {e0, e1};
    return n;
}

}  // namespace

TEST(DrawBlock, DeterministicOutcomeOnEigenstate) {
    Apparatus app(QubitState(0, 0, 1), kIdeal, 1);
    const auto counts =
        app.draw_block(MeasurementConfig({0.0, 0.0, 1.0}), 100);
    EXPECT_EQ(counts.counts[0], 100);
    EXPECT_EQ(counts.counts[1], 0);
}

TEST(DrawBlock, UnbiasedAxisIsAFairCoin) {
    Apparatus app(QubitState(0, 0, 1), kIdeal, 2);
    const std::int64_t k = 100000;
    const auto counts = app.draw_block(MeasurementConfig({1.0, 0.0, 0.0}), k);
    const double frac = static_cast<double>(counts.counts[0]) / k;
    EXPECT_NEAR(frac, 0.5, 5.0 * std::sqrt(0.25 / k));
}

TEST(DrawBlock, DarkCountModelFrequencies) {
    // Born terms (0.9, 0.1) with lambda_s = 1000, lambda_d = (5, 15):
    // outcome-0 probability 905/1020.
    NoiseModel noise;
    noise.dark_enabled = true;
    noise.source_rate = 1000.0;
    noise.dark_rates = {5.0, 15.0};
    Apparatus app(QubitState(0, 0, 0.8), noise, 3);
    const std::int64_t k = 100000;
    const auto counts = app.draw_block(MeasurementConfig({0.0, 0.0, 1.0}), k);
    const double expect = 905.0 / 1020.0;
    const double frac = static_cast<double>(counts.counts[0]) / k;
    EXPECT_NEAR(frac, expect, 5.0 * std::sqrt(expect * (1 - expect) / k));
}

TEST(DrawBlock, SeededDeterminism) {
    Apparatus a(QubitState(0.3, 0.2, 0.5), kIdeal, 99);
    Apparatus b(QubitState(0.3, 0.2, 0.5), kIdeal, 99);
    Rng axes(1);
    for (int i = 0; i < 50; ++i) {
        const MeasurementConfig cfg(axes.unit_vector3());
        EXPECT_EQ(a.draw_block(cfg, 7).counts, b.draw_block(cfg, 7).counts);
    }
}

TEST(DrawBlock, RejectsEmptyBlocks) {
    Apparatus app(QubitState(0, 0, 1), kIdeal, 1);
    EXPECT_THROW(app.draw_block(MeasurementConfig({0.0, 0.0, 1.0}), 0),
                 std::invalid_argument);
}

TEST(EventLog, RoundTripIncludingWaveplateConfigs) {
    Apparatus app(QubitState(0.1, -0.2, 0.6), kIdeal, 5);
    app.draw_block(MeasurementConfig(normalized({0.3, 0.4, 0.5})), 3);
    app.draw_block(waveplate_config_for_axis({0.0, 1.0, 0.0}), 4);
    app.draw_block(MeasurementConfig({0.0, 0.0, 1.0}), 2);

    std::ostringstream os;
    app.write_event_log(os);
    std::istringstream is(os.str());
    const auto events = Apparatus::read_event_log(is);
    ASSERT_EQ(events.size(), 3u);
    for (std::size_t i = 0; i < events.size(); ++i) {
        EXPECT_EQ(events[i].n, app.events()[i].n);
        EXPECT_EQ(events[i].k, app.events()[i].k);
        EXPECT_EQ(events[i].counts, app.events()[i].counts);
        EXPECT_NEAR(dot(events[i].config.axis(), app.events()[i].config.axis()),
                    1.0, 1e-12);
    }
    EXPECT_TRUE(events[1].config.waveplate_angles().has_value());
    EXPECT_EQ(events[0].n, 0);
    EXPECT_EQ(events[1].n, 3);
    EXPECT_EQ(events[2].n, 7);
}

TEST(EventLog, RejectsCorruptLines) {
    EXPECT_THROW(Apparatus::parse_event("1,axis,0,0"), std::invalid_argument);
    EXPECT_THROW(Apparatus::parse_event("1,what,0,0,1,1,1,0"),
                 std::invalid_argument);
    EXPECT_THROW(Apparatus::parse_event("1,axis,0,0,1,5,3,3"),
                 std::invalid_argument);
}

TEST(PilotEstimate, RecoversKnownRatios) {
    // lambda_d / lambda_s = 0.01 on both detectors, eta_1/eta_2 = 0.8.
    Apparatus app(QubitState(0, 0, 0),
                  pilot_noise(1000.0, 10.0, 10.0, 0.8, 1.0), 7);
    const auto est = app.pilot_estimate(200000, 200000);
    EXPECT_GT(est.efficiency_ratio_se, 0.0);
    EXPECT_NEAR(est.efficiency_ratio, 0.8, 3.0 * est.efficiency_ratio_se);
    for (int g = 0; g < 2; ++g) {
        EXPECT_GT(est.dark_ratio_se[g], 0.0);
        EXPECT_NEAR(est.dark_ratio[g], 0.01, 3.0 * est.dark_ratio_se[g]);
    }
    // The closed loop should be tight at this sample size.
    EXPECT_NEAR(est.efficiency_ratio, 0.8, 0.02);
    EXPECT_NEAR(est.dark_ratio[0], 0.01, 0.001);
}

TEST(PilotEstimate, ZeroDarkRatesEstimateAsZero) {
    NoiseModel noise;
    noise.efficiency_enabled = true;
    noise.efficiencies = {0.9, 0.9};
    Apparatus app(QubitState(0, 0, 0), noise, 8);
    const auto est = app.pilot_estimate(10000, 10000);
    for (int g = 0; g < 2; ++g) {
        EXPECT_LE(std::abs(est.dark_ratio[g]), 3.0 * est.dark_ratio_se[g]);
        EXPECT_EQ(est.dark_ratio[g], 0.0);
    }
}

TEST(PilotEstimate, EqualEfficienciesGiveUnitRatio) {
    Apparatus app(QubitState(0, 0, 0),
                  pilot_noise(500.0, 1.0, 1.0, 0.7, 0.7), 9);
    const auto est = app.pilot_estimate(100000, 100000);
    EXPECT_NEAR(est.efficiency_ratio, 1.0, 3.0 * est.efficiency_ratio_se);
}

TEST(PilotEstimate, SignalsFailureWithoutSourceEvents) {
    NoiseModel noise;
    noise.efficiency_enabled = true;
    noise.efficiencies = {1e-9, 1.0};
    Apparatus app(QubitState(0, 0, 0), noise, 10);
    EXPECT_THROW(app.pilot_estimate(10, 10), PilotEstimationError);
}

TEST(PilotEstimate, RejectsBadArguments) {
    Apparatus app(QubitState(0, 0, 0), kIdeal, 1);
    EXPECT_THROW(app.pilot_estimate(0, 10), std::invalid_argument);
}
