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
#include <limits>
#include <span>
#include <vector>

#include "coefficients.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace lambdaflow {

/// Instantaneous transport regime from the signs of Re F1 (left bath) and
/// Re F2 (right bath). Positive Re F_j means the system releases energy
/// into bath j.
enum class FlowRegime {
    release_both,   ///< A: Re F1 > 0, Re F2 > 0
    leftward,       ///< B: releases left, absorbs right (flow R -> L)
    rightward,      ///< C: absorbs left, releases right (flow L -> R)
    absorb_both,    ///< D: Re F1 < 0, Re F2 < 0
    indeterminate,  ///< either value inside the dead band
};

inline char regime_code(FlowRegime r)
{
    switch (r) {
    case FlowRegime::release_both: return 'A';
    case FlowRegime::leftward: return 'B';
    case FlowRegime::rightward: return 'C';
    case FlowRegime::absorb_both: return 'D';
    case FlowRegime::indeterminate: break;
    }
    return 'I';
}

inline bool is_unidirectional(FlowRegime r)
{
    return r == FlowRegime::leftward || r == FlowRegime::rightward;
}

/// Direction of a unidirectional interval; the integer values are the sweep
/// direction codes.
enum class Direction : int {
    none = 0,
    left_to_right = 1,
    right_to_left = -1,
};

inline FlowRegime classify(double re_f1, double re_f2, double eps)
{
    if (std::abs(re_f1) <= eps || std::abs(re_f2) <= eps || std::isnan(re_f1) || std::isnan(re_f2))
        return FlowRegime::indeterminate;
    if (re_f1 > 0.0)
        return re_f2 > 0.0 ? FlowRegime::release_both : FlowRegime::leftward;
    return re_f2 > 0.0 ? FlowRegime::rightward : FlowRegime::absorb_both;
}

struct FlowConfig {
    double eps = 1e-6;     ///< dead band on Re F_j, units of omega
    double min_len = 0.01; ///< shortest reported interval, units of 1/omega

    void validate() const
    {
        if (!(eps >= 0.0) || !(min_len >= 0.0))
            throw ValidationError("eps and min_len must be non-negative");
    }

    bool operator==(const FlowConfig&) const = default;
};

struct FlowInterval {
    double t_start = 0.0;
    double t_end = 0.0;
    Direction direction = Direction::none;
    /// max over the interval of min(|Re F1|, |Re F2|)
    double peak_magnitude = 0.0;
    std::size_t first_index = 0; ///< first grid point inside the interval
    std::size_t last_index = 0;  ///< last grid point inside the interval

    double duration() const { return t_end - t_start; }
};

struct IntervalReport {
    std::vector<FlowInterval> intervals;

    double first_duration() const { return intervals.empty() ? 0.0 : intervals.front().duration(); }
    Direction first_direction() const
    {
        return intervals.empty() ? Direction::none : intervals.front().direction;
    }
};

namespace detail {

// time where x crosses `threshold` between grid points a and b
inline double crossing(double ta, double tb, double xa, double xb, double threshold)
{
    if (xb == xa)
        return tb;
    return std::clamp(ta + (tb - ta) * (threshold - xa) / (xb - xa), std::min(ta, tb), std::max(ta, tb));
}

} // namespace detail

/// Unidirectional intervals (regimes B and C) of sampled Re F1, Re F2.
/// Boundaries are refined to where the offending component crosses the dead
/// band edge; runs of the same direction separated by an indeterminate gap
/// shorter than min_len are merged; runs shorter than min_len are dropped.
inline IntervalReport detect_intervals(std::span<const double> times, std::span<const double> re_f1,
                                       std::span<const double> re_f2, double eps, double min_len)
{
    FlowConfig{eps, min_len}.validate();
    const std::size_t n = times.size();
    if (re_f1.size() != n || re_f2.size() != n)
        throw GridMismatch("flow series differ in length");

    std::vector<FlowRegime> regime(n);
    for (std::size_t k = 0; k < n; ++k)
        regime[k] = classify(re_f1[k], re_f2[k], eps);

    // sign each component must carry inside a run of the given regime
    auto signs = [](FlowRegime r) {
        return r == FlowRegime::rightward ? std::pair{-1.0, 1.0} : std::pair{1.0, -1.0};
    };
    const std::span<const double> comp[2] = {re_f1, re_f2};

    std::vector<FlowInterval> runs;
    std::size_t k = 0;
    while (k < n) {
        if (!is_unidirectional(regime[k])) {
            ++k;
            continue;
        }
        const FlowRegime tag = regime[k];
        std::size_t j = k;
        while (j + 1 < n && regime[j + 1] == tag)
            ++j;

        const auto [s1, s2] = signs(tag);
        const double sign[2] = {s1, s2};
        FlowInterval iv;
        iv.direction = tag == FlowRegime::rightward ? Direction::left_to_right : Direction::right_to_left;
        iv.first_index = k;
        iv.last_index = j;

        iv.t_start = times[k];
        if (k > 0) {
            double start = times[k - 1];
            for (int c = 0; c < 2; ++c) {
                const double xa = comp[c][k - 1];
                if (sign[c] * xa <= eps)
                    start = std::max(start, detail::crossing(times[k - 1], times[k], xa, comp[c][k],
                                                             sign[c] * eps));
            }
            iv.t_start = start;
        }
        iv.t_end = times[j];
        if (j + 1 < n) {
            double end = times[j + 1];
            for (int c = 0; c < 2; ++c) {
                const double xb = comp[c][j + 1];
                if (sign[c] * xb <= eps)
                    end = std::min(end, detail::crossing(times[j], times[j + 1], comp[c][j], xb,
                                                         sign[c] * eps));
            }
            iv.t_end = end;
        }
        for (std::size_t m = k; m <= j; ++m)
            iv.peak_magnitude = std::max(iv.peak_magnitude,
                                         std::min(std::abs(re_f1[m]), std::abs(re_f2[m])));
        runs.push_back(iv);
        k = j + 1;
    }

    std::vector<FlowInterval> merged;
    for (const auto& iv : runs) {
        if (!merged.empty()) {
            FlowInterval& prev = merged.back();
            bool gap_indeterminate = true;
            for (std::size_t m = prev.last_index + 1; m < iv.first_index; ++m)
                gap_indeterminate = gap_indeterminate && regime[m] == FlowRegime::indeterminate;
            if (prev.direction == iv.direction && gap_indeterminate
                && iv.t_start - prev.t_end < min_len) {
                prev.t_end = iv.t_end;
                prev.last_index = iv.last_index;
                prev.peak_magnitude = std::max(prev.peak_magnitude, iv.peak_magnitude);
                continue;
            }
        }
        merged.push_back(iv);
    }

    IntervalReport report;
    for (const auto& iv : merged)
        if (iv.duration() >= min_len && iv.t_end > iv.t_start)
            report.intervals.push_back(iv);
    return report;
}

inline IntervalReport detect_intervals(const CoefficientTrajectory& coeffs, double eps, double min_len)
{
    std::vector<double> r1(coeffs.size()), r2(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        r1[k] = coeffs.F1[k].real();
        r2[k] = coeffs.F2[k].real();
    }
    return detect_intervals(coeffs.times, r1, r2, eps, min_len);
}

inline IntervalReport detect_intervals(const CoefficientTrajectory& coeffs, const FlowConfig& flow = {})
{
    return detect_intervals(coeffs, flow.eps, flow.min_len);
}

/// Time at which Re F_j first turns negative (linear interpolation), i.e. the
/// onset of absorption from bath j. NaN if it never happens.
inline double absorption_onset(const CoefficientTrajectory& coeffs, int channel)
{
    const auto& f = coeffs.F(channel);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        if (f[k - 1].real() >= 0.0 && f[k].real() < 0.0 && coeffs.times[k - 1] > 0.0)
            return detail::crossing(coeffs.times[k - 1], coeffs.times[k], f[k - 1].real(), f[k].real(), 0.0);
    return std::numeric_limits<double>::quiet_NaN();
}

/// First grid time at which the excited-state survival drops below `level`;
/// NaN if it stays above.
inline double relaxation_time(const CoefficientTrajectory& coeffs, double level)
{
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        if (coeffs.survival(k) < level)
            return coeffs.times[k];
    return std::numeric_limits<double>::quiet_NaN();
}

struct DurationPoint {
    double duration = 0.0;
    Direction direction = Direction::none;

    bool operator==(const DurationPoint&) const = default;
};

/// Duration and direction of the first unidirectional interval.
inline DurationPoint duration_map_point(const ModelSpec& model, const IntegratorConfig& cfg,
                                        const FlowConfig& flow = {})
{
    const IntervalReport r = detect_intervals(evolve_coefficients(model, cfg), flow);
    return {r.first_duration(), r.first_direction()};
}

struct GeometryReport {
    ModelSpec model;
    CoefficientTrajectory coeffs;
    DynamicsTrajectory dynamics;
    IntervalReport report;
    /// Bottleneck min(|Re F1|, |Re F2|) peak in the first interval; the
    /// diode magnitude. NaN without an interval.
    double peak_flow = std::numeric_limits<double>::quiet_NaN();
    /// Peak of min(|J1|, |J2|) in the first interval.
    double peak_current = std::numeric_limits<double>::quiet_NaN();
    /// Peak current into the releasing-side (sink) bath in the first interval.
    double peak_sink_current = std::numeric_limits<double>::quiet_NaN();
};

struct DiodeReport {
    GeometryReport forward;
    GeometryReport reverse;
    /// reverse.peak_flow / forward.peak_flow
    double asymmetry_ratio = std::numeric_limits<double>::quiet_NaN();
    /// reverse.peak_current / forward.peak_current
    double current_ratio = std::numeric_limits<double>::quiet_NaN();
};

inline GeometryReport analyse_geometry(const ModelSpec& model, const IntegratorConfig& cfg,
                                       const FlowConfig& flow)
{
    GeometryReport g{model, evolve_coefficients(model, cfg), {}, {}};
    g.dynamics = populations(g.coeffs, model);
    g.report = detect_intervals(g.coeffs, flow);
    if (g.report.intervals.empty())
        return g;
    const FlowInterval& iv = g.report.intervals.front();
    g.peak_flow = iv.peak_magnitude;
    g.peak_current = 0.0;
    g.peak_sink_current = 0.0;
    const auto& sink = iv.direction == Direction::left_to_right ? g.dynamics.J2 : g.dynamics.J1;
    for (std::size_t k = iv.first_index; k <= iv.last_index; ++k) {
        g.peak_current = std::max(g.peak_current,
                                  std::min(std::abs(g.dynamics.J1[k]), std::abs(g.dynamics.J2[k])));
        g.peak_sink_current = std::max(g.peak_sink_current, sink[k]);
    }
    return g;
}

/// Runs the forward geometry and the reversed one (memory rates exchanged,
/// couplings kept on their channels) and compares their first intervals.
inline DiodeReport diode_compare(const ModelSpec& model_forward, const IntegratorConfig& cfg,
                                 const FlowConfig& flow = {})
{
    DiodeReport d{analyse_geometry(model_forward, cfg, flow),
                  analyse_geometry(swap_baths(model_forward), cfg, flow)};
    d.asymmetry_ratio = d.reverse.peak_flow / d.forward.peak_flow;
    d.current_ratio = d.reverse.peak_current / d.forward.peak_current;
    return d;
}

} // namespace lambdaflow
