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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace lambdaflow {

/// Populations and bath energy currents on the coefficient grid. Currents are
/// positive when energy flows from the system into the bath.
struct DynamicsTrajectory {
    std::vector<double> times;
    std::vector<double> rho11, rho22, rho33;
    std::vector<double> J1, J2;

    std::size_t size() const { return times.size(); }
};

/// rho33 from the closed exponential form; rho11, rho22 from the accumulated
/// channel transfers; J_j = 2 w Re[F_j] rho33.
inline DynamicsTrajectory populations(const CoefficientTrajectory& coeffs, const ModelSpec& model)
{
    const std::size_t n = coeffs.size();
    if (coeffs.F1.size() != n || coeffs.F2.size() != n || coeffs.Fbar1.size() != n
        || coeffs.Fbar2.size() != n || coeffs.transfer1.size() != n || coeffs.transfer2.size() != n)
        throw GridMismatch("coefficient trajectory sequences differ in length");

    const auto& p0 = model.initial_populations();
    const double w = model.omega();
    DynamicsTrajectory d;
    d.times = coeffs.times;
    d.rho11.resize(n);
    d.rho22.resize(n);
    d.rho33.resize(n);
    d.J1.resize(n);
    d.J2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r33 = coeffs.survival(k) * p0[2];
        d.rho33[k] = r33;
        d.rho11[k] = p0[0] + p0[2] * coeffs.transfer1[k];
        d.rho22[k] = p0[1] + p0[2] * coeffs.transfer2[k];
        d.J1[k] = 2.0 * w * coeffs.F1[k].real() * r33;
        d.J2[k] = 2.0 * w * coeffs.F2[k].real() * r33;
    }
    return d;
}

enum class DifferenceStencil {
    second_order, ///< 3-point central, one-sided 3-point at the ends
    fourth_order, ///< 5-point central, one-sided 5-point at the ends
};

/// First derivative of uniformly sampled data.
inline std::vector<double> finite_difference(const std::vector<double>& y, double h,
                                             DifferenceStencil stencil = DifferenceStencil::fourth_order)
{
    const std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 2)
        return d;
    if (stencil == DifferenceStencil::second_order || n < 5) {
        if (n == 2) {
            d[0] = d[1] = (y[1] - y[0]) / h;
            return d;
        }
        d[0] = (4.0 * (y[1] - y[0]) - (y[2] - y[0])) / (2.0 * h);
        d[n - 1] = (4.0 * (y[n - 1] - y[n - 2]) - (y[n - 1] - y[n - 3])) / (2.0 * h);
        for (std::size_t k = 1; k + 1 < n; ++k)
            d[k] = (y[k + 1] - y[k - 1]) / (2.0 * h);
        return d;
    }
    // written in differences so constant data gives exactly zero
    const double s = 12.0 * h;
    d[0] = (48.0 * (y[1] - y[0]) - 36.0 * (y[2] - y[0]) + 16.0 * (y[3] - y[0]) - 3.0 * (y[4] - y[0])) / s;
    d[1] = (-3.0 * (y[0] - y[1]) + 18.0 * (y[2] - y[1]) - 6.0 * (y[3] - y[1]) + (y[4] - y[1])) / s;
    for (std::size_t k = 2; k + 2 < n; ++k)
        d[k] = ((y[k - 2] - y[k + 2]) + 8.0 * (y[k + 1] - y[k - 1])) / s;
    const double a = y[n - 1], b = y[n - 2];
    d[n - 2] = (3.0 * (a - b) - 18.0 * (y[n - 3] - b) + 6.0 * (y[n - 4] - b) - (y[n - 5] - b)) / s;
    d[n - 1] = (-48.0 * (b - a) + 36.0 * (y[n - 3] - a) - 16.0 * (y[n - 4] - a) + 3.0 * (y[n - 5] - a)) / s;
    return d;
}

namespace detail {
inline void require_aligned(const DynamicsTrajectory& dyn, const CoefficientTrajectory& coeffs)
{
    if (dyn.size() != coeffs.size() || dyn.rho11.size() != dyn.size()
        || dyn.rho22.size() != dyn.size() || dyn.rho33.size() != dyn.size())
        throw GridMismatch("dynamics and coefficient grids differ in length");
    for (std::size_t k = 0; k < dyn.size(); ++k)
        if (dyn.times[k] != coeffs.times[k])
            throw GridMismatch("dynamics and coefficient grids differ");
}
} // namespace detail

/// Largest deviation, over the grid and the three diagonal elements, between
/// the finite-difference time derivative of the populations and the diagonal
/// of the exact master equation:
///   d rho33/dt = -2 (Re F1 + Re F2) rho33,   d rho_jj/dt = 2 Re F_j rho33.
inline double master_equation_residual(const DynamicsTrajectory& dyn, const CoefficientTrajectory& coeffs,
                                       DifferenceStencil stencil = DifferenceStencil::fourth_order)
{
    detail::require_aligned(dyn, coeffs);
    if (dyn.size() < 3)
        return 0.0;
    const double h = dyn.times[1] - dyn.times[0];
    const auto d11 = finite_difference(dyn.rho11, h, stencil);
    const auto d22 = finite_difference(dyn.rho22, h, stencil);
    const auto d33 = finite_difference(dyn.rho33, h, stencil);
    double worst = 0.0;
    for (std::size_t k = 0; k < dyn.size(); ++k) {
        const double r1 = 2.0 * coeffs.F1[k].real() * dyn.rho33[k];
        const double r2 = 2.0 * coeffs.F2[k].real() * dyn.rho33[k];
        worst = std::max({worst, std::abs(d11[k] - r1), std::abs(d22[k] - r2),
                          std::abs(d33[k] + r1 + r2)});
    }
    return worst;
}

/// max_k |rho11 + rho22 + rho33 - 1|
inline double trace_defect(const DynamicsTrajectory& dyn)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < dyn.size(); ++k)
        worst = std::max(worst, std::abs(dyn.rho11[k] + dyn.rho22[k] + dyn.rho33[k] - 1.0));
    return worst;
}

/// max_k |d rho33/dt + (J1 + J2)/w|: energy lost by the system equals the
/// energy delivered to the two baths.
inline double flux_defect(const DynamicsTrajectory& dyn, double omega,
                          DifferenceStencil stencil = DifferenceStencil::fourth_order)
{
    if (dyn.size() < 3)
        return 0.0;
    const auto d33 = finite_difference(dyn.rho33, dyn.times[1] - dyn.times[0], stencil);
    double worst = 0.0;
    for (std::size_t k = 0; k < dyn.size(); ++k)
        worst = std::max(worst, std::abs(d33[k] + (dyn.J1[k] + dyn.J2[k]) / omega));
    return worst;
}

} // namespace lambdaflow
