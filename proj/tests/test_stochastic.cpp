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
#include <thread>

#include <gtest/gtest.h>

#include "lambdaflow/dynamics.hpp"
#include "lambdaflow/stochastic.hpp"

namespace lf = lambdaflow;

namespace {

lf::IntegratorConfig horizon(double t_max)
{
    lf::IntegratorConfig cfg;
    cfg.t_max = t_max;
    cfg.rho33_floor = 0.0;
    return cfg;
}

std::vector<double> grid(double t_max, double dt)
{
    std::vector<double> t(lf::grid_points(t_max, dt));
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = static_cast<double>(k) * dt;
    return t;
}

struct Stat {
    double mean_re = 0, mean_im = 0, se_re = 0, se_im = 0;
};

Stat sample_stat(const std::vector<lf::complex>& x)
{
    const double n = static_cast<double>(x.size());
    Stat s;
    for (const auto& v : x) {
        s.mean_re += v.real() / n;
        s.mean_im += v.imag() / n;
    }
    double vr = 0, vi = 0;
    for (const auto& v : x) {
        vr += std::pow(v.real() - s.mean_re, 2) / (n - 1);
        vi += std::pow(v.imag() - s.mean_im, 2) / (n - 1);
    }
    s.se_re = std::sqrt(vr / n);
    s.se_im = std::sqrt(vi / n);
    return s;
}

bool all_equal(const lf::EnsembleEstimate& a, const lf::EnsembleEstimate& b)
{
    if (a.times != b.times || a.rho_hat.size() != b.rho_hat.size())
        return false;
    for (std::size_t k = 0; k < a.rho_hat.size(); ++k)
        if (a.rho_hat[k].a != b.rho_hat[k].a || a.stderr[k].a != b.stderr[k].a)
            return false;
    return true;
}

} // namespace

TEST(Noise, CovarianceAtLagsOfTheMemoryTime)
{
    for (double g : {0.5, 2.0}) {
        const lf::BathSpec bath(g, 1.5);
        const double dt = 0.01;
        const auto t = grid(2.0 / g + 0.5, dt);
        const std::size_t base = 17;
        const auto lag = [&](double tau) { return base + static_cast<std::size_t>(std::lround(tau / dt)); };
        std::vector<lf::complex> c0, c1, c2, pseudo, mean;
        for (std::uint64_t i = 0; i < 10000; ++i) {
            auto rng = lf::detail::stream_engine(99, i);
            const auto z = lf::sample_noise(bath, t, rng);
            c0.push_back(z[base] * std::conj(z[base]));
            c1.push_back(z[lag(1.0 / g)] * std::conj(z[base]));
            c2.push_back(z[lag(2.0 / g)] * std::conj(z[base]));
            pseudo.push_back(z[lag(1.0 / g)] * z[base]);
            mean.push_back(z[base]);
        }
        const double var = 0.5 * 1.5 * g;
        const double targets[] = {var, var * std::exp(-1.0), var * std::exp(-2.0)};
        int i = 0;
        for (const auto* c : {&c0, &c1, &c2}) {
            const Stat s = sample_stat(*c);
            EXPECT_LT(std::abs(s.mean_re - targets[i]), 5.0 * s.se_re) << "gamma " << g << " lag " << i;
            EXPECT_LE(std::abs(s.mean_im), 5.0 * s.se_im);
            ++i;
        }
        const Stat p = sample_stat(pseudo);
        EXPECT_LT(std::abs(p.mean_re), 5.0 * p.se_re);
        EXPECT_LT(std::abs(p.mean_im), 5.0 * p.se_im);
        const Stat m = sample_stat(mean);
        EXPECT_LT(std::abs(m.mean_re), 5.0 * m.se_re);
        EXPECT_LT(std::abs(m.mean_im), 5.0 * m.se_im);
    }
}

TEST(Noise, RejectsNonUniformGrid)
{
    const lf::BathSpec bath(1.0, 1.0);
    EXPECT_THROW(lf::sample_noise(bath, std::vector<double>{0.0, 0.1, 0.3}, 1), lf::BadGrid);
    EXPECT_THROW(lf::sample_noise(bath, std::vector<double>{}, 1), lf::BadGrid);
    EXPECT_THROW(lf::sample_noise(bath, std::vector<double>{0.0, 0.0}, 1), lf::BadGrid);
}

TEST(Noise, SeedDeterminesPath)
{
    const lf::BathSpec bath(1.0, 1.0);
    const auto t = grid(1.0, 0.01);
    EXPECT_EQ(lf::sample_noise(bath, t, 5), lf::sample_noise(bath, t, 5));
    EXPECT_NE(lf::sample_noise(bath, t, 5), lf::sample_noise(bath, t, 6));
}

TEST(Trajectory, ZeroNoiseFollowsDeterministicDecay)
{
    const auto m = lf::make_model(0.2, 10.0, 1.0, 1.0);
    const auto c = lf::evolve_coefficients(m, horizon(10.0));
    const auto d = lf::populations(c, m);
    const lf::NoisePath quiet{c.times, std::vector<lf::complex>(c.size()), std::vector<lf::complex>(c.size())};
    const auto traj = lf::propagate_trajectory(m, c, quiet);
    ASSERT_EQ(traj.size(), c.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        ASSERT_EQ(traj[k].c1, lf::complex{});
        ASSERT_EQ(traj[k].c2, lf::complex{});
        ASSERT_NEAR(std::norm(traj[k].c3), d.rho33[k], 1e-8) << c.times[k];
    }
}

TEST(Trajectory, ClosedSystemRotates)
{
    const lf::ModelSpec m(lf::BathSpec(1.0, 0.0), lf::BathSpec(2.0, 0.0));
    const auto c = lf::evolve_coefficients(m, horizon(20.0));
    auto rng = lf::detail::stream_engine(1, 0);
    const lf::NoisePath z{c.times, lf::sample_noise(m.bath_left(), c.times, rng),
                          lf::sample_noise(m.bath_right(), c.times, rng)};
    const auto traj = lf::propagate_trajectory(m, c, z);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        ASSERT_LT(std::abs(traj[k].c3 - std::exp(lf::complex{0.0, -c.times[k]})), 1e-10);
        ASSERT_EQ(traj[k].c1, lf::complex{});
    }
}

TEST(Trajectory, StartsInExcitedState)
{
    const auto m = lf::make_model(1.0, 1.0, 1.0, 1.0);
    const auto c = lf::evolve_coefficients(m, horizon(1.0));
    auto rng = lf::detail::stream_engine(4, 2);
    const lf::NoisePath z{c.times, lf::sample_noise(m.bath_left(), c.times, rng),
                          lf::sample_noise(m.bath_right(), c.times, rng)};
    const auto s = lf::propagate_trajectory(m, c, z).front();
    EXPECT_EQ(s.c1, lf::complex{});
    EXPECT_EQ(s.c2, lf::complex{});
    EXPECT_EQ(s.c3, lf::complex{1.0});
}

TEST(Trajectory, GridMismatch)
{
    const auto m = lf::make_model(1.0, 1.0, 1.0, 1.0);
    const auto c = lf::evolve_coefficients(m, horizon(1.0));
    lf::NoisePath z{c.times, std::vector<lf::complex>(c.size()), std::vector<lf::complex>(c.size() - 1)};
    EXPECT_THROW(lf::propagate_trajectory(m, c, z), lf::GridMismatch);
    z.z2.resize(c.size());
    z.times[5] += 1e-6;
    EXPECT_THROW(lf::propagate_trajectory(m, c, z), lf::GridMismatch);
}

TEST(Ensemble, TwoTrajectorySmoke)
{
    const auto e = lf::ensemble_average(lf::make_model(1.0, 1.0, 1.0, 1.0), horizon(2.0), 2, 3);
    EXPECT_EQ(e.n_traj, 2u);
    EXPECT_EQ(e.seed, 3u);
    for (const auto& r : e.rho_hat) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                ASSERT_EQ(r(i, j), std::conj(r(j, i)));
        ASSERT_TRUE(std::isfinite((r(0, 0) + r(1, 1) + r(2, 2)).real()));
    }
    EXPECT_THROW(lf::ensemble_average(lf::make_model(1.0, 1.0, 1.0, 1.0), horizon(2.0), 1, 3), lf::ValidationError);
}

TEST(Ensemble, BitIdenticalAcrossWorkers)
{
    const auto m = lf::make_model(0.5, 2.0, 1.0, 1.0);
    lf::StochasticOptions opt;
    opt.workers = 1;
    const auto ref = lf::ensemble_average(m, horizon(3.0), 300, 42, opt);
    for (unsigned w : {4u, std::max(2u, std::thread::hardware_concurrency())}) {
        opt.workers = w;
        EXPECT_TRUE(all_equal(ref, lf::ensemble_average(m, horizon(3.0), 300, 42, opt))) << w;
    }
    opt.workers = 1;
    EXPECT_FALSE(all_equal(ref, lf::ensemble_average(m, horizon(3.0), 300, 43, opt)));
}

TEST(Ensemble, AgreesWithDeterministicSolution)
{
    const auto m = lf::make_model(1.0, 1.0, 1.0, 1.0);
    const auto cfg = horizon(6.0);
    const auto e = lf::ensemble_average(m, cfg, 2000, 8);
    const auto d = lf::populations(lf::evolve_coefficients(m, cfg), m);
    for (std::size_t k = 0; k < e.times.size(); ++k) {
        const auto& r = e.rho_hat[k];
        const auto& s = e.stderr[k];
        ASSERT_LE(std::abs(r(2, 2).real() - d.rho33[k]), 5.0 * s(2, 2).real() + 1e-8);
        ASSERT_LE(std::abs(r(0, 0).real() - d.rho11[k]), 5.0 * s(0, 0).real() + 1e-12) << e.times[k];
        ASSERT_LE(std::abs(r(0, 1).real()), 5.0 * s(0, 1).real() + 1e-12);
        ASSERT_LE(std::abs(r(0, 1).imag()), 5.0 * s(0, 1).imag() + 1e-12);
        const double trace = (r(0, 0) + r(1, 1) + r(2, 2)).real();
        const double se = std::hypot(s(0, 0).real(), s(1, 1).real(), s(2, 2).real());
        ASSERT_LE(std::abs(trace - 1.0), 5.0 * se + 1e-8);
    }
}

TEST(Ensemble, StandardErrorHalvesWhenSamplesQuadruple)
{
    const auto m = lf::make_model(1.0, 1.0, 1.0, 1.0);
    const auto a = lf::ensemble_average(m, horizon(4.0), 500, 21);
    const auto b = lf::ensemble_average(m, horizon(4.0), 2000, 21);
    for (std::size_t k : {100u, 200u, 400u}) {
        const double ratio = a.stderr[k](0, 0).real() / b.stderr[k](0, 0).real();
        EXPECT_NEAR(ratio, 2.0, 0.4) << a.times[k];
    }
}

TEST(Ensemble, ConjugatedNoiseGivesSameEnsemble)
{
    const auto m = lf::make_model(0.5, 2.0, 1.0, 0.5);
    lf::StochasticOptions opt;
    const auto a = lf::ensemble_average(m, horizon(4.0), 1000, 5, opt);
    opt.conjugate_noise = true;
    const auto b = lf::ensemble_average(m, horizon(4.0), 1000, 77, opt);
    for (std::size_t k = 0; k < a.times.size(); ++k)
        for (int i = 0; i < 2; ++i) {
            const double diff = a.rho_hat[k](i, i).real() - b.rho_hat[k](i, i).real();
            const double se = std::hypot(a.stderr[k](i, i).real(), b.stderr[k](i, i).real());
            ASSERT_LE(std::abs(diff), 5.0 * se + 1e-12) << a.times[k];
        }
}

TEST(Ensemble, StationaryPopulationsAddedAnalytically)
{
    const lf::ModelSpec m(lf::BathSpec(1.0, 1.0), lf::BathSpec(1.0, 1.0), {0.3, 0.2, 0.5});
    const auto e = lf::ensemble_average(m, horizon(1.0), 64, 1);
    EXPECT_DOUBLE_EQ(e.rho_hat[0](0, 0).real(), 0.3);
    EXPECT_DOUBLE_EQ(e.rho_hat[0](1, 1).real(), 0.2);
    EXPECT_DOUBLE_EQ(e.rho_hat[0](2, 2).real(), 0.5);
}
