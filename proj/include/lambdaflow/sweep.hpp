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
#include <exception>
#include <string>
#include <string_view>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace lambdaflow {

enum class SweepAxis {
    gamma1,
    gamma2,
    coupling1,
    coupling2,
    /// gamma1 - gamma2; sets gamma1 = gamma2 + value
    gamma_diff,
};

inline std::string_view to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::gamma1: return "gamma1";
    case SweepAxis::gamma2: return "gamma2";
    case SweepAxis::coupling1: return "coupling1";
    case SweepAxis::coupling2: return "coupling2";
    case SweepAxis::gamma_diff: return "gamma_diff";
    }
    return "unknown";
}

inline SweepAxis axis_from_string(std::string_view s)
{
    for (SweepAxis a : {SweepAxis::gamma1, SweepAxis::gamma2, SweepAxis::coupling1,
                        SweepAxis::coupling2, SweepAxis::gamma_diff})
        if (to_string(a) == s)
            return a;
    throw ValidationError("unknown sweep axis '" + std::string(s) + "'");
}

inline std::vector<double> linear_axis(double lo, double hi, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

inline std::vector<double> log_axis(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > 0.0))
        throw ValidationError("log axis bounds must be positive");
    std::vector<double> v(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    if (n > 1) {
        v.front() = lo;
        v.back() = hi;
    }
    return v;
}

struct SweepGrid {
    SweepAxis axis1 = SweepAxis::gamma1;
    SweepAxis axis2 = SweepAxis::gamma2;
    std::vector<double> axis1_values;
    std::vector<double> axis2_values;
    ModelSpec base_model;
    IntegratorConfig cfg;
    FlowConfig flow;

    /// Model of cell (i, j). gamma_diff is applied after the other axis.
    ModelSpec cell_model(std::size_t i, std::size_t j) const
    {
        double g1 = base_model.bath_left().gamma(), g2 = base_model.bath_right().gamma();
        double c1 = base_model.bath_left().coupling(), c2 = base_model.bath_right().coupling();
        double diff = 0.0;
        bool has_diff = false;
        auto apply = [&](SweepAxis a, double v) {
            switch (a) {
            case SweepAxis::gamma1: g1 = v; break;
            case SweepAxis::gamma2: g2 = v; break;
            case SweepAxis::coupling1: c1 = v; break;
            case SweepAxis::coupling2: c2 = v; break;
            case SweepAxis::gamma_diff: diff = v; has_diff = true; break;
            }
        };
        apply(axis1, axis1_values.at(i));
        apply(axis2, axis2_values.at(j));
        if (has_diff)
            g1 = g2 + diff;
        return ModelSpec(BathSpec(g1, c1, base_model.bath_left().kernel()),
                         BathSpec(g2, c2, base_model.bath_right().kernel()),
                         base_model.initial_populations(), base_model.omega());
    }

    void validate() const
    {
        if (axis1 == axis2)
            throw ValidationError("sweep axes must differ");
        auto clash = [&](SweepAxis a, SweepAxis b) {
            return (axis1 == a && axis2 == b) || (axis1 == b && axis2 == a);
        };
        if (clash(SweepAxis::gamma1, SweepAxis::gamma_diff))
            throw ValidationError("gamma1 and gamma_diff cannot both be swept");
        for (const auto* axis : {&axis1_values, &axis2_values}) {
            if (axis->empty())
                throw ValidationError("sweep axis has no values");
            for (std::size_t k = 1; k < axis->size(); ++k)
                if (!((*axis)[k] > (*axis)[k - 1]))
                    throw ValidationError("sweep axis values must be strictly increasing");
        }
        cfg.validate();
        flow.validate();
        for (std::size_t i = 0; i < axis1_values.size(); ++i)
            for (std::size_t j = 0; j < axis2_values.size(); ++j)
                (void)cell_model(i, j);
    }

    bool operator==(const SweepGrid&) const = default;
};

struct CellFailure {
    std::size_t i = 0;
    std::size_t j = 0;
    std::string message;

    bool operator==(const CellFailure&) const = default;
};

/// Row-major (axis1 index outer) duration and direction maps.
struct SweepResult {
    SweepGrid grid;
    std::vector<double> durations;
    std::vector<int> directions; ///< 0 none, +1 L->R, -1 R->L
    std::vector<CellFailure> failures;

    std::size_t rows() const { return grid.axis1_values.size(); }
    std::size_t cols() const { return grid.axis2_values.size(); }
    double duration(std::size_t i, std::size_t j) const { return durations[i * cols() + j]; }
    int direction(std::size_t i, std::size_t j) const { return directions[i * cols() + j]; }
};

/// Evaluates the first-interval duration map. Each cell is independent and
/// written to its own slot, so the result does not depend on the worker
/// count or on scheduling. Cell errors are recorded, not propagated.
inline SweepResult run_sweep(const SweepGrid& grid, unsigned workers = default_workers())
{
    grid.validate();
    SweepResult res{grid, {}, {}, {}};
    const std::size_t rows = res.rows(), cols = res.cols();
    res.durations.assign(rows * cols, 0.0);
    res.directions.assign(rows * cols, 0);
    std::vector<std::string> errors(rows * cols);

    parallel_for(rows * cols, workers, [&](std::size_t cell) {
        const std::size_t i = cell / cols, j = cell % cols;
        try {
            const DurationPoint p = duration_map_point(grid.cell_model(i, j), grid.cfg, grid.flow);
            res.durations[cell] = p.duration;
            res.directions[cell] = static_cast<int>(p.direction);
        } catch (const std::exception& e) {
            errors[cell] = e.what();
            if (errors[cell].empty())
                errors[cell] = "unknown error";
        }
    });
    for (std::size_t cell = 0; cell < rows * cols; ++cell)
        if (!errors[cell].empty())
            res.failures.push_back({cell / cols, cell % cols, errors[cell]});
    return res;
}

/// Duration map over (gamma1, gamma2) with equal unit couplings.
inline SweepGrid duration_map_grid(std::size_t n = 64)
{
    IntegratorConfig cfg;
    cfg.t_max = 60.0;
    cfg.rho33_floor = 1e-4;
    return SweepGrid{SweepAxis::gamma1, SweepAxis::gamma2, log_axis(0.05, 2.0, n), log_axis(0.05, 2.0, n),
                     make_model(1.0, 1.0, 1.0, 1.0), cfg, FlowConfig{}};
}

/// Diode-time map over (gamma2, gamma1 - gamma2) in the forward geometry
/// Gamma1 = 0.5, Gamma2 = 1.
inline SweepGrid diode_map_grid(std::size_t n = 48)
{
    IntegratorConfig cfg;
    cfg.t_max = 60.0;
    cfg.rho33_floor = 1e-4;
    return SweepGrid{SweepAxis::gamma2, SweepAxis::gamma_diff, linear_axis(0.05, 1.0, n),
                     linear_axis(0.5, 8.0, n), make_model(5.0, 0.2, 0.5, 1.0), cfg, FlowConfig{}};
}

} // namespace lambdaflow
