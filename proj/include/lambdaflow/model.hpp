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

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace lambdaflow {

using complex = std::complex<double>;

/// Units: omega = 1 unless stated otherwise. Rates (gamma, Gamma) are in
/// units of omega and times in units of 1/omega.

enum class KernelFamily {
    /// alpha(t,s) = (Gamma*gamma/2) exp(-gamma|t-s|), a Lorentzian spectrum.
    exponential,
};

inline std::string_view to_string(KernelFamily k)
{
    switch (k) {
    case KernelFamily::exponential:
        return "exponential";
    }
    return "unknown";
}

inline KernelFamily kernel_from_string(std::string_view name)
{
    if (name == "exponential" || name == "ornstein-uhlenbeck")
        return KernelFamily::exponential;
    throw ValidationError("unknown kernel family '" + std::string(name) + "'");
}

/// Memory rate and coupling strength of one zero-temperature bath.
class BathSpec {
public:
    BathSpec(double gamma, double coupling, KernelFamily kernel = KernelFamily::exponential)
        : gamma_(gamma), coupling_(coupling), kernel_(kernel)
    {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw ValidationError("gamma must be positive and finite");
        if (!(coupling >= 0.0) || !std::isfinite(coupling))
            throw ValidationError("coupling must be non-negative and finite");
    }

    double gamma() const { return gamma_; }
    double coupling() const { return coupling_; }
    KernelFamily kernel() const { return kernel_; }

    bool operator==(const BathSpec&) const = default;

private:
    double gamma_;
    double coupling_;
    KernelFamily kernel_;
};

/// Diagonal initial state (rho11, rho22, rho33).
using Populations = std::array<double, 3>;

/// Full physical configuration of the Lambda system and its two baths.
/// bath_left couples through L1 = |1><3|, bath_right through L2 = |2><3|.
class ModelSpec {
public:
    ModelSpec(BathSpec left, BathSpec right, Populations initial = {0.0, 0.0, 1.0},
              double omega = 1.0)
        : omega_(omega), left_(left), right_(right), initial_(initial)
    {
        if (!(omega > 0.0) || !std::isfinite(omega))
            throw ValidationError("omega must be positive and finite");
        double sum = 0.0;
        for (double p : initial) {
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError("initial populations must lie in [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("initial populations must sum to 1");
    }

    double omega() const { return omega_; }
    const BathSpec& bath_left() const { return left_; }
    const BathSpec& bath_right() const { return right_; }
    const BathSpec& bath(int channel) const { return channel == 1 ? left_ : right_; }
    const Populations& initial_populations() const { return initial_; }

    bool operator==(const ModelSpec&) const = default;

private:
    double omega_;
    BathSpec left_;
    BathSpec right_;
    Populations initial_;
};

/// Convenience constructor for the common case rho33(0) = 1, omega = 1.
inline ModelSpec make_model(double gamma1, double gamma2, double coupling1, double coupling2)
{
    return ModelSpec(BathSpec(gamma1, coupling1), BathSpec(gamma2, coupling2));
}

/// Bath correlation function alpha(t, s). Real for the zero-temperature
/// exponential kernel; the complex return leaves room for kernels with phases.
inline complex correlation(const BathSpec& bath, double t, double s)
{
    switch (bath.kernel()) {
    case KernelFamily::exponential:
        break;
    }
    const double amp = 0.5 * bath.coupling() * bath.gamma();
    return {amp * std::exp(-bath.gamma() * std::abs(t - s)), 0.0};
}

/// Exchanges the memory rates of the two baths while each coupling stays on
/// its channel: turns the forward diode geometry into the reversed one.
inline ModelSpec swap_baths(const ModelSpec& model)
{
    const BathSpec& l = model.bath_left();
    const BathSpec& r = model.bath_right();
    return ModelSpec(BathSpec(r.gamma(), l.coupling(), r.kernel()),
                     BathSpec(l.gamma(), r.coupling(), l.kernel()),
                     model.initial_populations(), model.omega());
}

/// Full channel mirror: (gamma1, Gamma1) <-> (gamma2, Gamma2), rho11 <-> rho22.
inline ModelSpec mirror_channels(const ModelSpec& model)
{
    const Populations& p = model.initial_populations();
    return ModelSpec(model.bath_right(), model.bath_left(), {p[1], p[0], p[2]}, model.omega());
}

} // namespace lambdaflow
