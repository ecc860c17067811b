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

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "ode.hpp"

namespace lambdaflow {

struct IntegratorConfig {
    double dt_out = 1e-2;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_max = 60.0;
    /// Stop once exp(-2 Re[Fbar1 + Fbar2]) drops below this; 0 disables.
    double rho33_floor = 1e-4;

    void validate() const
    {
        if (!(dt_out > 0.0) || !std::isfinite(dt_out))
            throw ValidationError("dt_out must be positive");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw ValidationError("tolerances must be positive");
        if (!(t_max > 0.0) || !std::isfinite(t_max))
            throw ValidationError("t_max must be positive");
        if (!(rho33_floor >= 0.0 && rho33_floor < 1.0))
            throw ValidationError("rho33_floor must lie in [0, 1)");
    }

    bool operator==(const IntegratorConfig&) const = default;
};

/// Convolutionless coefficients F_j(t) and their running integrals on a
/// uniform grid starting at t = 0.
struct CoefficientTrajectory {
    std::vector<double> times;
    std::vector<complex> F1, F2;
    std::vector<complex> Fbar1, Fbar2;
    /// Excitation transferred through channel j per unit initial rho33:
    /// int_0^t 2 Re[F_j(s)] exp(-2 Re[Fbar1(s) + Fbar2(s)]) ds.
    std::vector<double> transfer1, transfer2;
    bool stopped_early = false;
    double stop_time = 0.0;

    std::size_t size() const { return times.size(); }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }

    const std::vector<complex>& F(int channel) const { return channel == 1 ? F1 : F2; }
    const std::vector<complex>& Fbar(int channel) const { return channel == 1 ? Fbar1 : Fbar2; }
    const std::vector<double>& transfer(int channel) const
    {
        return channel == 1 ? transfer1 : transfer2;
    }

    /// Excited-state survival factor exp(-2 Re[Fbar1 + Fbar2]) at grid index k.
    double survival(std::size_t k) const
    {
        return std::exp(-2.0 * (Fbar1[k].real() + Fbar2[k].real()));
    }

    void reserve(std::size_t n)
    {
        times.reserve(n);
        F1.reserve(n);
        F2.reserve(n);
        Fbar1.reserve(n);
        Fbar2.reserve(n);
        transfer1.reserve(n);
        transfer2.reserve(n);
    }
};

/// Number of points of the uniform grid 0, dt, ..., covering [0, t_max].
inline std::size_t grid_points(double t_max, double dt)
{
    return static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
}

/// Closed form of the memory dynamics for exponential kernels. Differentiating
/// F_j(t) = int_0^t alpha_j(t,s) f_j(t,s) ds with alpha_j = (G_j g_j / 2) e^{-g_j (t-s)}
/// and d/dt f_j = (i w + F_1 + F_2) f_j, f_j(t,t) = 1 gives
///
///     dF_j/dt = G_j g_j / 2 + (i w - g_j + F_1 + F_2) F_j,   F_j(0) = 0.
///
/// The running integrals Fbar_j and the channel transfers are carried as
/// extra components so the populations inherit the integrator accuracy.
inline CoefficientTrajectory evolve_coefficients(const ModelSpec& model, const IntegratorConfig& cfg)
{
    cfg.validate();
    const double w = model.omega();
    const double g1 = model.bath_left().gamma(), g2 = model.bath_right().gamma();
    const double a1 = 0.5 * model.bath_left().coupling() * g1;
    const double a2 = 0.5 * model.bath_right().coupling() * g2;

    // y = [F1, F2, Fbar1, Fbar2] as (re, im) pairs, then transfer1, transfer2
    auto rhs = [=](double, const ode::State<10>& y, ode::State<10>& dy) {
        const complex f1{y[0], y[1]}, f2{y[2], y[3]};
        const complex drive{f1 + f2 + complex{0.0, w}};
        const complex d1 = a1 + (drive - g1) * f1;
        const complex d2 = a2 + (drive - g2) * f2;
        dy[0] = d1.real();
        dy[1] = d1.imag();
        dy[2] = d2.real();
        dy[3] = d2.imag();
        dy[4] = y[0];
        dy[5] = y[1];
        dy[6] = y[2];
        dy[7] = y[3];
        const double surv = std::exp(-2.0 * (y[4] + y[6]));
        dy[8] = 2.0 * y[0] * surv;
        dy[9] = 2.0 * y[2] * surv;
    };

    const std::size_t n = grid_points(cfg.t_max, cfg.dt_out);
    CoefficientTrajectory out;
    out.reserve(n);

    ode::AdaptiveOptions opt;
    opt.tol = {cfg.rel_tol, cfg.abs_tol};
    // the early phase is set by the fastest memory rate
    opt.h_init = std::min(cfg.dt_out, 1e-2 / std::max({g1, g2, w}));

    auto observe = [&](std::size_t k, double, const ode::State<10>& y) {
        for (double v : y)
            if (!std::isfinite(v))
                throw NonFiniteError("coefficient state left the finite range");
        out.times.push_back(static_cast<double>(k) * cfg.dt_out);
        out.F1.emplace_back(y[0], y[1]);
        out.F2.emplace_back(y[2], y[3]);
        out.Fbar1.emplace_back(y[4], y[5]);
        out.Fbar2.emplace_back(y[6], y[7]);
        out.transfer1.push_back(y[8]);
        out.transfer2.push_back(y[9]);
        if (cfg.rho33_floor > 0.0 && out.survival(out.size() - 1) < cfg.rho33_floor) {
            out.stopped_early = true;
            return false;
        }
        return true;
    };
    ode::integrate_on_grid<10>(rhs, ode::State<10>{}, 0.0, cfg.dt_out, n, opt, observe);
    out.stop_time = out.times.back();
    return out;
}

inline constexpr std::size_t quadrature_step_budget = 1'000'000;

enum class QuadratureRule {
    /// Plain trapezoid in s and in t; second order.
    trapezoid,
    /// Trapezoid with fourth-order Gregory end corrections in s and
    /// Adams-Moulton weights for the time step of f.
    gregory,
};

namespace detail {

/// Weight of node k in a composite rule over nodes 0..m (unit spacing).
inline double composite_weight(QuadratureRule rule, std::size_t k, std::size_t m)
{
    if (rule == QuadratureRule::trapezoid || m == 1)
        return (k == 0 || k == m) ? 0.5 : 1.0;
    if (m == 2)
        return k == 1 ? 4.0 / 3.0 : 1.0 / 3.0;
    if (m == 3)
        return (k == 0 || k == 3) ? 3.0 / 8.0 : 9.0 / 8.0;
    if (m == 4) {
        constexpr double w4[] = {1.0 / 3.0, 4.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
        return w4[k];
    }
    const std::size_t e = std::min(k, m - k);
    constexpr double ends[] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    return e < 3 ? ends[e] : 1.0;
}

} // namespace detail

/// Ground-truth evaluation of F_j straight from the memory integral. The
/// two-time field f(t, s_k) is stored for every retained s_k and stepped
/// forward in t with d/dt f = (i w + F_1 + F_2) f; F_j(t) is the quadrature
/// of alpha_j(t, s) f(t, s) over s in [0, t]. Only `correlation` is used, so
/// any kernel family works. Cost is O(N^2) in the number of steps.
///
/// Both channels share f because the evolution equation and the boundary
/// condition f(t, t) = 1 do not depend on j.
inline CoefficientTrajectory quadrature_oracle(const ModelSpec& model, double t_max, double dt,
                                               QuadratureRule rule = QuadratureRule::gregory)
{
    if (!(dt > 0.0) || !(t_max >= 0.0) || !std::isfinite(t_max))
        throw ValidationError("quadrature oracle needs dt > 0 and t_max >= 0");
    const double steps_real = std::round(t_max / dt);
    if (steps_real > static_cast<double>(quadrature_step_budget))
        throw GridTooLarge("quadrature oracle limited to 1e6 steps");
    const auto steps = static_cast<std::size_t>(steps_real);
    const BathSpec& b1 = model.bath_left();
    const BathSpec& b2 = model.bath_right();
    const complex iw{0.0, model.omega()};

    CoefficientTrajectory out;
    out.reserve(steps + 1);
    out.times.push_back(0.0);
    out.F1.emplace_back(0.0);
    out.F2.emplace_back(0.0);
    out.Fbar1.emplace_back(0.0);
    out.Fbar2.emplace_back(0.0);
    out.transfer1.push_back(0.0);
    out.transfer2.push_back(0.0);

    std::vector<complex> field; // f(t_n, s_k), k = 0..n
    field.reserve(steps + 1);
    field.emplace_back(1.0);
    std::vector<complex> total; // G = F1 + F2 on the grid
    total.reserve(steps + 1);
    total.emplace_back(0.0);

    // integral of G over [t_n, t_{n+1}] given the candidate G_{n+1}
    auto step_integral = [&](std::size_t n, complex g_next) {
        if (rule == QuadratureRule::trapezoid || n == 0)
            return 0.5 * dt * (total[n] + g_next);
        if (n == 1)
            return dt * (5.0 * g_next + 8.0 * total[1] - total[0]) / 12.0;
        return dt * (9.0 * g_next + 19.0 * total[n] - 5.0 * total[n - 1] + total[n - 2]) / 24.0;
    };

    for (std::size_t n = 0; n < steps; ++n) {
        const double t_next = static_cast<double>(n + 1) * dt;
        const std::size_t m = n + 1;

        // partial sums over the already stored s_k, before the common step factor
        complex s1{0.0}, s2{0.0};
        for (std::size_t k = 0; k <= n; ++k) {
            const double sk = static_cast<double>(k) * dt;
            const double w = detail::composite_weight(rule, k, m);
            s1 += w * correlation(b1, t_next, sk) * field[k];
            s2 += w * correlation(b2, t_next, sk) * field[k];
        }
        s1 *= dt;
        s2 *= dt;
        const double w_end = detail::composite_weight(rule, m, m) * dt;
        const complex end1 = w_end * correlation(b1, t_next, t_next);
        const complex end2 = w_end * correlation(b2, t_next, t_next);

        // G(t_{n+1}) enters the step factor implicitly; fixed-point iteration
        complex g_next = (n == 0) ? total[0] : 2.0 * total[n] - total[n - 1];
        complex factor{1.0};
        for (int it = 0; it < 200; ++it) {
            factor = std::exp(iw * dt + step_integral(n, g_next));
            const complex updated = factor * (s1 + s2) + end1 + end2;
            const double change = std::abs(updated - g_next);
            g_next = updated;
            if (change <= 1e-15 * (1.0 + std::abs(updated)))
                break;
        }
        factor = std::exp(iw * dt + step_integral(n, g_next));
        const complex f1 = factor * s1 + end1;
        const complex f2 = factor * s2 + end2;

        for (auto& v : field)
            v *= factor;
        field.emplace_back(1.0);

        out.times.push_back(t_next);
        out.Fbar1.push_back(out.Fbar1.back() + 0.5 * dt * (out.F1.back() + f1));
        out.Fbar2.push_back(out.Fbar2.back() + 0.5 * dt * (out.F2.back() + f2));
        const double surv_prev = out.survival(n);
        out.F1.push_back(f1);
        out.F2.push_back(f2);
        const double surv = out.survival(n + 1);
        out.transfer1.push_back(out.transfer1.back()
                                + dt * (out.F1[n].real() * surv_prev + f1.real() * surv));
        out.transfer2.push_back(out.transfer2.back()
                                + dt * (out.F2[n].real() * surv_prev + f2.real() * surv));
        total.push_back(f1 + f2);
    }
    out.stop_time = out.times.back();
    return out;
}

} // namespace lambdaflow
