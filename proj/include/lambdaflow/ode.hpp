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

// Dormand-Prince 5(4) embedded Runge-Kutta with the 4th-order continuous
// extension of Hairer, Norsett & Wanner (DOPRI5).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "errors.hpp"

namespace lambdaflow::ode {

struct Tolerances {
    double rel = 1e-9;
    double abs = 1e-12;
};

namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace dp

template <std::size_t N>
using State = std::array<double, N>;

/// Result of one Dormand-Prince step from (t, y0) to (t + h, y1).
template <std::size_t N>
struct StepResult {
    State<N> y1{};
    State<N> k7{};  // f(t + h, y1), reused as k1 of the next step
    State<N> err{}; // embedded error estimate
    std::array<State<N>, 5> dense{};

    /// Continuous extension at theta in [0, 1].
    State<N> interpolate(double theta) const
    {
        const double theta1 = 1.0 - theta;
        State<N> out;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = dense[0][i]
                + theta * (dense[1][i]
                           + theta1 * (dense[2][i] + theta * (dense[3][i] + theta1 * dense[4][i])));
        return out;
    }
};

/// One explicit step. `k1` must equal f(t, y0).
template <std::size_t N, class Rhs>
StepResult<N> dopri_step(Rhs&& f, double t, const State<N>& y0, const State<N>& k1, double h)
{
    using namespace dp;
    State<N> k2, k3, k4, k5, k6, tmp;
    StepResult<N> r;

    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y0[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
        r.y1[i] = y0[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t + h, r.y1, r.k7);

    for (std::size_t i = 0; i < N; ++i) {
        r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k7[i]);
        const double ydiff = r.y1[i] - y0[i];
        const double bspl = h * k1[i] - ydiff;
        r.dense[0][i] = y0[i];
        r.dense[1][i] = ydiff;
        r.dense[2][i] = bspl;
        r.dense[3][i] = ydiff - h * r.k7[i] - bspl;
        r.dense[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * r.k7[i]);
    }
    return r;
}

/// Weighted RMS error norm; returns +inf when the proposal is not finite.
template <std::size_t N>
double error_norm(const State<N>& y0, const StepResult<N>& r, const Tolerances& tol)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(r.y1[i]) || !std::isfinite(r.err[i]))
            return std::numeric_limits<double>::infinity();
        const double sc = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(r.y1[i]));
        const double q = r.err[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(N));
}

struct AdaptiveOptions {
    Tolerances tol{};
    double h_init = 0.0; // 0 picks a heuristic
    double h_min = 1e-14;
    std::size_t max_steps = 50'000'000;
};

/// Integrates y' = f(t, y) from t0 and reports the solution on the uniform
/// grid t0 + k*dt_out, k = 0..n_out-1, via dense output. The observer is
/// called as obs(k, t_k, y(t_k)) and returns false to stop early.
/// Returns the number of grid points reported.
template <std::size_t N, class Rhs, class Observer>
std::size_t integrate_on_grid(Rhs&& f, State<N> y, double t0, double dt_out, std::size_t n_out,
                              const AdaptiveOptions& opt, Observer&& obs)
{
    if (n_out == 0)
        return 0;
    if (!obs(std::size_t{0}, t0, y))
        return 1;
    if (n_out == 1)
        return 1;

    const double t_end = t0 + static_cast<double>(n_out - 1) * dt_out;
    double t = t0;
    State<N> k1;
    f(t, y, k1);
    double h = opt.h_init > 0.0 ? opt.h_init : std::min(1e-3, dt_out);
    std::size_t next = 1;
    std::size_t steps = 0;

    while (next < n_out) {
        if (++steps > opt.max_steps)
            throw StepFailure("step budget exhausted");
        h = std::min(h, t_end - t);
        StepResult<N> r = dopri_step<N>(f, t, y, k1, h);
        const double err = error_norm<N>(y, r, opt.tol);
        if (!(err <= 1.0)) {
            bool nonfinite = false;
            for (std::size_t i = 0; i < N; ++i)
                nonfinite = nonfinite || !std::isfinite(r.y1[i]) || !std::isfinite(r.err[i]);
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
            h *= fac;
            if (h < opt.h_min) {
                if (nonfinite)
                    throw NonFiniteError("state left the finite range");
                throw StepFailure("cannot meet tolerance at minimum step size");
            }
            continue;
        }
        const double t_new = (t_end - t - h <= 1e-12 * t_end) ? t_end : t + h;
        while (next < n_out) {
            const double tk = t0 + static_cast<double>(next) * dt_out;
            if (t_new < t_end && tk > t_new + 1e-12 * std::max(1.0, std::abs(t_new)))
                break;
            const double theta = std::clamp((tk - t) / h, 0.0, 1.0);
            if (!obs(next, tk, r.interpolate(theta)))
                return next + 1;
            ++next;
        }
        t = t_new;
        y = r.y1;
        k1 = r.k7;
        const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
        h *= fac;
    }
    return n_out;
}

} // namespace lambdaflow::ode
