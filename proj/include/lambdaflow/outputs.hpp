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

#include <cstdint>
#include <string>

#include "coefficients.hpp"
#include "dynamics.hpp"
#include "flow.hpp"
#include "stochastic.hpp"
#include "sweep.hpp"
#include "table.hpp"

namespace lambdaflow {

/// t, reF1, imF1, reF2, imF2, rho11, rho22, rho33, J1, J2, regime
inline Table simulation_table(const CoefficientTrajectory& coeffs, const DynamicsTrajectory& dyn,
                              double eps)
{
    Table t;
    t.columns = {"t", "reF1", "imF1", "reF2", "imF2", "rho11", "rho22", "rho33", "J1", "J2", "regime"};
    t.rows.reserve(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const FlowRegime r = classify(coeffs.F1[k].real(), coeffs.F2[k].real(), eps);
        t.rows.push_back({coeffs.times[k], coeffs.F1[k].real(), coeffs.F1[k].imag(), coeffs.F2[k].real(),
                          coeffs.F2[k].imag(), dyn.rho11[k], dyn.rho22[k], dyn.rho33[k], dyn.J1[k],
                          dyn.J2[k], std::string(1, regime_code(r))});
    }
    return t;
}

/// t_start, t_end, direction (+1 L->R, -1 R->L), duration, peak_magnitude
inline Table intervals_table(const IntervalReport& report)
{
    Table t;
    t.columns = {"t_start", "t_end", "direction", "duration", "peak_magnitude"};
    for (const auto& iv : report.intervals)
        t.rows.push_back({iv.t_start, iv.t_end, static_cast<std::int64_t>(iv.direction), iv.duration(),
                          iv.peak_magnitude});
    return t;
}

/// gamma1, gamma2, duration, direction, one row per cell in row-major order.
inline Table sweep_table(const SweepResult& res)
{
    Table t;
    t.columns = {"gamma1", "gamma2", "duration", "direction"};
    t.rows.reserve(res.rows() * res.cols());
    for (std::size_t i = 0; i < res.rows(); ++i)
        for (std::size_t j = 0; j < res.cols(); ++j) {
            const ModelSpec m = res.grid.cell_model(i, j);
            t.rows.push_back({m.bath_left().gamma(), m.bath_right().gamma(), res.duration(i, j),
                              static_cast<std::int64_t>(res.direction(i, j))});
        }
    return t;
}

/// One row per geometry with its first interval and peak observables.
inline Table diode_table(const DiodeReport& d)
{
    Table t;
    t.columns = {"geometry", "gamma1", "gamma2", "coupling1", "coupling2", "t_start", "t_end",
                 "direction", "n_intervals", "peak_flow", "peak_current", "peak_sink_current",
                 "asymmetry_ratio", "current_ratio"};
    for (const auto* g : {&d.forward, &d.reverse}) {
        const auto& m = g->model;
        const bool any = !g->report.intervals.empty();
        const FlowInterval iv = any ? g->report.intervals.front() : FlowInterval{};
        t.rows.push_back({std::string(g == &d.forward ? "forward" : "reverse"), m.bath_left().gamma(),
                          m.bath_right().gamma(), m.bath_left().coupling(), m.bath_right().coupling(),
                          iv.t_start, iv.t_end, static_cast<std::int64_t>(iv.direction),
                          static_cast<std::int64_t>(g->report.intervals.size()), g->peak_flow,
                          g->peak_current, g->peak_sink_current, d.asymmetry_ratio, d.current_ratio});
    }
    return t;
}

/// Ensemble populations and coherences with their standard errors.
inline Table ensemble_table(const EnsembleEstimate& est)
{
    Table t;
    t.columns = {"t",          "rho11",      "rho22",      "rho33",      "re_rho12",   "im_rho12",
                 "re_rho13",   "im_rho13",   "re_rho23",   "im_rho23",   "se_rho11",   "se_rho22",
                 "se_rho33",   "se_re_rho12", "se_im_rho12", "se_re_rho13", "se_im_rho13",
                 "se_re_rho23", "se_im_rho23"};
    for (std::size_t k = 0; k < est.times.size(); ++k) {
        const Matrix3& r = est.rho_hat[k];
        const Matrix3& s = est.stderr[k];
        t.rows.push_back({est.times[k], r(0, 0).real(), r(1, 1).real(), r(2, 2).real(), r(0, 1).real(),
                          r(0, 1).imag(), r(0, 2).real(), r(0, 2).imag(), r(1, 2).real(), r(1, 2).imag(),
                          s(0, 0).real(), s(1, 1).real(), s(2, 2).real(), s(0, 1).real(), s(0, 1).imag(),
                          s(0, 2).real(), s(0, 2).imag(), s(1, 2).real(), s(1, 2).imag()});
    }
    return t;
}

} // namespace lambdaflow
