/*
   Copyright 2026 The lambdaflow Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lambdaflow/flow.hpp"

namespace lf = lambdaflow;

namespace {

struct ScanRun {
    double t_first, t_last;
    int direction;
};

// plain grid scan: maximal runs of samples with opposite, clearly nonzero signs
std::vector<ScanRun> scan_oracle(const std::vector<double>& t, const std::vector<double>& a,
                                 const std::vector<double>& b, double eps)
{
    std::vector<ScanRun> runs;
    int current = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        int dir = 0;
        if (std::abs(a[k]) > eps && std::abs(b[k]) > eps && a[k] * b[k] < 0.0)
            dir = a[k] < 0.0 ? 1 : -1;
        if (dir != 0 && dir == current)
            runs.back().t_last = t[k];
        else if (dir != 0)
            runs.push_back({t[k], t[k], dir});
        current = dir;
    }
    return runs;
}

void expect_matches_scan(const std::vector<double>& t, const std::vector<double>& a, const std::vector<double>& b,
                         double dt)
{
    const auto report = lf::detect_intervals(t, a, b, 1e-6, 0.0);
    const auto runs = scan_oracle(t, a, b, 1e-6);
    ASSERT_EQ(report.intervals.size(), runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& iv = report.intervals[i];
        EXPECT_EQ(static_cast<int>(iv.direction), runs[i].direction);
        EXPECT_LE(iv.t_start, runs[i].t_first);
        EXPECT_GE(iv.t_start, runs[i].t_first - dt - 1e-12);
        EXPECT_GE(iv.t_end, runs[i].t_last);
        EXPECT_LE(iv.t_end, runs[i].t_last + dt + 1e-12);
    }
}

lf::IntegratorConfig horizon(double t_max)
{
    lf::IntegratorConfig cfg;
    cfg.t_max = t_max;
    cfg.rho33_floor = 0.0;
    return cfg;
}

} // namespace

TEST(Classify, Regimes)
{
    EXPECT_EQ(lf::classify(0.3, 0.2, 1e-6), lf::FlowRegime::release_both);
    EXPECT_EQ(lf::classify(-0.1, 0.2, 1e-6), lf::FlowRegime::rightward);
    EXPECT_EQ(lf::classify(0.1, -0.2, 1e-6), lf::FlowRegime::leftward);
    EXPECT_EQ(lf::classify(-0.1, -0.2, 1e-6), lf::FlowRegime::absorb_both);
    EXPECT_EQ(lf::classify(0.0, 0.5, 1e-6), lf::FlowRegime::indeterminate);
    EXPECT_EQ(lf::classify(0.5, -1e-6, 1e-6), lf::FlowRegime::indeterminate);
    EXPECT_EQ(lf::classify(NAN, 0.5, 1e-6), lf::FlowRegime::indeterminate);
}

TEST(Classify, Codes)
{
    EXPECT_EQ(lf::regime_code(lf::FlowRegime::release_both), 'A');
    EXPECT_EQ(lf::regime_code(lf::FlowRegime::leftward), 'B');
    EXPECT_EQ(lf::regime_code(lf::FlowRegime::rightward), 'C');
    EXPECT_EQ(lf::regime_code(lf::FlowRegime::absorb_both), 'D');
    EXPECT_EQ(lf::regime_code(lf::FlowRegime::indeterminate), 'I');
    EXPECT_TRUE(lf::is_unidirectional(lf::FlowRegime::leftward));
    EXPECT_FALSE(lf::is_unidirectional(lf::FlowRegime::absorb_both));
}

TEST(Classify, ScaleInvariant)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0), scale(0.01, 100.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng), y = u(rng), eps = 0.1 * std::abs(u(rng)), a = scale(rng);
        ASSERT_EQ(lf::classify(a * x, a * y, a * eps), lf::classify(x, y, eps));
    }
}

TEST(DetectIntervals, ConstantSignsGiveNothing)
{
    std::vector<double> t{0, 1, 2, 3}, a{0.1, 0.2, 0.3, 0.4}, b{1, 1, 1, 1};
    const auto r = lf::detect_intervals(t, a, b, 1e-6, 0.01);
    EXPECT_TRUE(r.intervals.empty());
    EXPECT_EQ(r.first_duration(), 0.0);
    EXPECT_EQ(r.first_direction(), lf::Direction::none);
}

TEST(DetectIntervals, SquareWaveMatchesScan)
{
    const double dt = 0.01;
    std::vector<double> t, a, b;
    for (int k = 0; k <= 1000; ++k) {
        t.push_back(k * dt);
        a.push_back(std::fmod(k * dt, 2.0) < 0.75 ? 0.3 : -0.3);
        b.push_back(0.2);
    }
    expect_matches_scan(t, a, b, dt);
    const auto r = lf::detect_intervals(t, a, b, 1e-6, 0.01);
    ASSERT_EQ(r.intervals.size(), 5u);
    EXPECT_EQ(r.first_direction(), lf::Direction::left_to_right);
    EXPECT_NEAR(r.first_duration(), 1.25, dt);
}

TEST(DetectIntervals, BoundaryRefinedByInterpolation)
{
    std::vector<double> t{0, 1, 2, 3}, a{0.5, -0.5, -0.5, 0.5}, b{1, 1, 1, 1};
    const auto r = lf::detect_intervals(t, a, b, 0.0, 0.0);
    ASSERT_EQ(r.intervals.size(), 1u);
    EXPECT_DOUBLE_EQ(r.intervals[0].t_start, 0.5);
    EXPECT_DOUBLE_EQ(r.intervals[0].t_end, 2.5);
    EXPECT_EQ(r.intervals[0].first_index, 1u);
    EXPECT_EQ(r.intervals[0].last_index, 2u);
    EXPECT_DOUBLE_EQ(r.intervals[0].peak_magnitude, 0.5);
}

TEST(DetectIntervals, MergesAcrossShortIndeterminateGap)
{
    const double dt = 0.004;
    std::vector<double> t, a, b;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(k * dt);
        a.push_back(k == 50 ? 0.0 : -0.2);
        b.push_back(0.3);
    }
    a[0] = 0.0;
    EXPECT_EQ(lf::detect_intervals(t, a, b, 1e-6, 0.01).intervals.size(), 1u);
    EXPECT_EQ(lf::detect_intervals(t, a, b, 1e-6, 0.0).intervals.size(), 2u);
}

TEST(DetectIntervals, DropsShortRuns)
{
    std::vector<double> t, a, b;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(k * 0.001);
        a.push_back(k >= 40 && k <= 42 ? -0.1 : 0.1);
        b.push_back(0.1);
    }
    EXPECT_TRUE(lf::detect_intervals(t, a, b, 1e-6, 0.01).intervals.empty());
    EXPECT_EQ(lf::detect_intervals(t, a, b, 1e-6, 0.001).intervals.size(), 1u);
}

TEST(DetectIntervals, RejectsBadInput)
{
    std::vector<double> t{0, 1}, a{0, 1}, b{0};
    EXPECT_THROW(lf::detect_intervals(t, a, b, 1e-6, 0.01), lf::GridMismatch);
    EXPECT_THROW(lf::detect_intervals(t, a, a, -1.0, 0.01), lf::ValidationError);
}

TEST(DetectIntervals, RandomModelsMatchScan)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> log_gamma(std::log(0.05), std::log(10.0)), coupling(0.2, 2.0);
    int with_intervals = 0;
    for (int i = 0; i < 100; ++i) {
        const auto m = lf::make_model(std::exp(log_gamma(rng)), std::exp(log_gamma(rng)), coupling(rng), coupling(rng));
        const auto c = lf::evolve_coefficients(m, horizon(30.0));
        std::vector<double> a(c.size()), b(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            a[k] = c.F1[k].real();
            b[k] = c.F2[k].real();
        }
        SCOPED_TRACE(i);
        expect_matches_scan(c.times, a, b, c.dt());
        with_intervals += lf::detect_intervals(c).intervals.empty() ? 0 : 1;
    }
    EXPECT_GT(with_intervals, 10);
}

TEST(DetectIntervals, ReportInvariants)
{
    const auto c = lf::evolve_coefficients(lf::make_model(0.2, 1.0, 1.0, 1.0), horizon(40.0));
    const auto r = lf::detect_intervals(c);
    ASSERT_GE(r.intervals.size(), 3u);
    double prev_end = 0.0;
    for (const auto& iv : r.intervals) {
        EXPECT_GE(iv.t_start, prev_end);
        EXPECT_GT(iv.t_end, iv.t_start);
        for (std::size_t k = iv.first_index; k <= iv.last_index; ++k) {
            ASSERT_LT(c.F1[k].real(), 0.0);
            ASSERT_GT(c.F2[k].real(), 0.0);
        }
        EXPECT_EQ(iv.direction, lf::Direction::left_to_right);
        prev_end = iv.t_end;
    }
}

TEST(DetectIntervals, ShrinkingRevivals)
{
    const auto c = lf::evolve_coefficients(lf::make_model(0.2, 1.0, 1.0, 1.0), {});
    const auto r = lf::detect_intervals(c);
    std::vector<lf::FlowInterval> visible;
    for (const auto& iv : r.intervals)
        if (c.survival(iv.first_index) >= 1e-2)
            visible.push_back(iv);
    ASSERT_EQ(visible.size(), 3u);
    for (std::size_t i = 0; i < visible.size(); ++i) {
        EXPECT_EQ(visible[i].direction, lf::Direction::left_to_right);
        if (i > 0) {
            EXPECT_LT(visible[i].peak_magnitude, visible[i - 1].peak_magnitude);
        }
    }
}

TEST(DurationMapPoint, EqualRatesGiveZero)
{
    for (double g : {0.1, 0.5, 2.0})
        for (auto cs : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
            const auto p = lf::duration_map_point(lf::make_model(g, g, cs.first, cs.second), {});
            EXPECT_EQ(p.duration, 0.0);
            EXPECT_EQ(p.direction, lf::Direction::none);
        }
}

TEST(DurationMapPoint, ChannelExchangeFlipsDirection)
{
    const auto fwd = lf::duration_map_point(lf::make_model(0.2, 1.0, 1.0, 1.0), {});
    const auto rev = lf::duration_map_point(lf::make_model(1.0, 0.2, 1.0, 1.0), {});
    EXPECT_GT(fwd.duration, 0.0);
    EXPECT_EQ(fwd.direction, lf::Direction::left_to_right);
    EXPECT_EQ(rev.direction, lf::Direction::right_to_left);
    EXPECT_NEAR(fwd.duration, rev.duration, 1e-6);
}

TEST(DurationMapPoint, MirrorWithUnequalCouplings)
{
    const auto m = lf::make_model(0.2, 3.0, 0.7, 1.4);
    const auto a = lf::detect_intervals(lf::evolve_coefficients(m, {}));
    const auto b = lf::detect_intervals(lf::evolve_coefficients(lf::mirror_channels(m), {}));
    ASSERT_EQ(a.intervals.size(), b.intervals.size());
    ASSERT_FALSE(a.intervals.empty());
    for (std::size_t i = 0; i < a.intervals.size(); ++i) {
        EXPECT_EQ(static_cast<int>(a.intervals[i].direction), -static_cast<int>(b.intervals[i].direction));
        EXPECT_NEAR(a.intervals[i].duration(), b.intervals[i].duration(), 1e-6);
    }
}

TEST(DurationMapPoint, FlowsFromLongToShortMemory)
{
    const double gs[] = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
    int nonzero = 0;
    for (double g1 : gs)
        for (double g2 : gs) {
            const auto p = lf::duration_map_point(lf::make_model(g1, g2, 1.0, 1.0), {});
            if (p.duration == 0.0)
                continue;
            ++nonzero;
            EXPECT_EQ(p.direction, g1 < g2 ? lf::Direction::left_to_right : lf::Direction::right_to_left)
                << g1 << " " << g2;
        }
    EXPECT_GT(nonzero, 0);
}

TEST(Onset, AbsorptionFromLongMemoryBath)
{
    const auto c = lf::evolve_coefficients(lf::make_model(0.2, 10.0, 1.0, 1.0), {});
    const double onset = lf::absorption_onset(c, 1);
    EXPECT_GT(onset, 1.5);
    EXPECT_LT(onset, 3.0);
    EXPECT_TRUE(std::isnan(lf::absorption_onset(lf::evolve_coefficients(lf::make_model(200, 200, 1, 1), horizon(2.0)), 1)));
    EXPECT_LT(lf::relaxation_time(c, 1e-3), c.times.back() + 1e-12);
}

TEST(Diode, ForwardGeometryWindow)
{
    const auto d = lf::diode_compare(lf::make_model(5.0, 0.2, 0.5, 1.0), {});
    ASSERT_FALSE(d.forward.report.intervals.empty());
    const auto& iv = d.forward.report.intervals.front();
    EXPECT_EQ(iv.direction, lf::Direction::right_to_left);
    EXPECT_LT(iv.t_start, 3.75);
    EXPECT_GT(iv.t_end, 3.75);
    EXPECT_NEAR(iv.t_start, 2.5, 0.5);
    EXPECT_NEAR(iv.t_end, 5.0, 0.5);
    EXPECT_EQ(d.reverse.report.first_direction(), lf::Direction::left_to_right);
    EXPECT_GT(d.asymmetry_ratio, 1.0);
}

TEST(Diode, EqualCouplingsAreSymmetric)
{
    for (auto gs : {std::pair{5.0, 0.2}, std::pair{0.3, 2.0}}) {
        const auto d = lf::diode_compare(lf::make_model(gs.first, gs.second, 0.8, 0.8), {});
        EXPECT_NEAR(d.asymmetry_ratio, 1.0, 1e-6);
        EXPECT_NEAR(d.current_ratio, 1.0, 1e-6);
    }
}

TEST(Diode, NoIntervalGivesNan)
{
    const auto d = lf::diode_compare(lf::make_model(1.0, 1.0, 0.5, 1.0), {});
    EXPECT_TRUE(std::isnan(d.forward.peak_flow));
    EXPECT_TRUE(std::isnan(d.asymmetry_ratio));
}
