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

// Self-check run by `lambdaflow validate`: the closed coefficient ODE against
// the direct memory-integral quadrature, population identities, and the
// proportional-kernel sign theorem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "dynamics.hpp"
#include "flow.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "table.hpp"

namespace lambdaflow {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Bath 1 takes (gamma, Gamma) from {0.2, 1, 5, 10} x {0.5, 1, 2}; bath 2
/// takes the cyclic successor of each, so every case is asymmetric.
inline std::vector<ModelSpec> oracle_parameter_matrix()
{
    const double gammas[] = {0.2, 1.0, 5.0, 10.0};
    const double couplings[] = {0.5, 1.0, 2.0};
    std::vector<ModelSpec> out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            out.push_back(make_model(gammas[i], gammas[(i + 1) % 4], couplings[j], couplings[(j + 1) % 3]));
    return out;
}

inline double max_coefficient_gap(const CoefficientTrajectory& a, const CoefficientTrajectory& b)
{
    const std::size_t n = std::min(a.size(), b.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        worst = std::max({worst, std::abs(a.F1[k] - b.F1[k]), std::abs(a.F2[k] - b.F2[k])});
    return worst;
}

inline CheckResult check_oracle_equivalence(unsigned workers, double t_max = 10.0, double dt = 1e-3,
                                            double tolerance = 1e-5)
{
    const auto models = oracle_parameter_matrix();
    std::vector<double> gaps(models.size());
    parallel_for(models.size(), workers, [&](std::size_t i) {
        IntegratorConfig cfg;
        cfg.dt_out = dt;
        cfg.t_max = t_max;
        cfg.rho33_floor = 0.0;
        gaps[i] = max_coefficient_gap(evolve_coefficients(models[i], cfg),
                                      quadrature_oracle(models[i], t_max, dt));
    });
    const double worst = *std::max_element(gaps.begin(), gaps.end());
    return {"closed ODE vs quadrature oracle", worst < tolerance,
            "max |dF| = " + format_double(worst) + " over " + std::to_string(models.size()) + " models"};
}

inline CheckResult check_population_identities(double trace_tol = 1e-8, double flux_tol = 1e-4)
{
    std::vector<ModelSpec> models = oracle_parameter_matrix();
    models.push_back(make_model(0.2, 1.0, 1.0, 1.0));
    models.push_back(make_model(5.0, 0.2, 0.5, 1.0));
    double trace = 0.0, flux = 0.0;
    for (const auto& m : models) {
        IntegratorConfig cfg;
        const auto coeffs = evolve_coefficients(m, cfg);
        const auto dyn = populations(coeffs, m);
        trace = std::max(trace, trace_defect(dyn));
        flux = std::max(flux, flux_defect(dyn, m.omega()));
    }
    return {"trace and flux identities", trace < trace_tol && flux < flux_tol,
            "trace defect " + format_double(trace) + ", flux defect " + format_double(flux)};
}

inline CheckResult check_proportional_kernels(std::uint64_t seed = 7, int cases = 20)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_gamma(std::log(0.05), std::log(10.0));
    std::uniform_real_distribution<double> coupling(0.1, 3.0);
    double worst_product = 0.0, worst_duration = 0.0;
    for (int c = 0; c < cases; ++c) {
        const double g = std::exp(log_gamma(rng));
        const double c1 = coupling(rng);
        double c2 = coupling(rng);
        if (std::abs(c1 - c2) < 1e-3)
            c2 += 0.5;
        IntegratorConfig cfg;
        const auto coeffs = evolve_coefficients(make_model(g, g, c1, c2), cfg);
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            worst_product = std::min(worst_product, coeffs.F1[k].real() * coeffs.F2[k].real());
        worst_duration = std::max(worst_duration, detect_intervals(coeffs).first_duration());
    }
    return {"same spectral form gives no unidirectional flow",
            worst_product >= -1e-12 && worst_duration == 0.0,
            "min Re F1 Re F2 = " + format_double(worst_product) + ", max first duration "
                + format_double(worst_duration)};
}

inline std::vector<CheckResult> run_validation(unsigned workers)
{
    return {check_oracle_equivalence(workers), check_population_identities(), check_proportional_kernels()};
}

} // namespace lambdaflow
