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
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "ode.hpp"
#include "parallel.hpp"

namespace lambdaflow {

/// Realisations of the bath processes z*_{1t}, z*_{2t} on a uniform grid.
struct NoisePath {
    std::vector<double> times;
    std::vector<complex> z1, z2;
};

/// Amplitudes of |1>, |2>, |3> in the unnormalised stochastic state.
struct StochasticState {
    complex c1{0.0}, c2{0.0}, c3{1.0};
};

/// Row-major 3x3 complex matrix.
struct Matrix3 {
    std::array<complex, 9> a{};

    complex& operator()(int r, int c) { return a[static_cast<std::size_t>(3 * r + c)]; }
    const complex& operator()(int r, int c) const { return a[static_cast<std::size_t>(3 * r + c)]; }
};

/// Ensemble mean of |psi><psi| with per-entry standard errors. For each
/// entry, stderr.real() is the standard error of the real part and
/// stderr.imag() that of the imaginary part.
struct EnsembleEstimate {
    std::vector<double> times;
    std::vector<Matrix3> rho_hat;
    std::vector<Matrix3> stderr;
    std::size_t n_traj = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_uniform(std::span<const double> times)
{
    if (times.empty())
        throw BadGrid("empty time grid");
    if (times.size() == 1)
        return;
    const double dt = times[1] - times[0];
    if (!(dt > 0.0))
        throw BadGrid("time grid must be increasing");
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double expect = times[0] + static_cast<double>(k) * dt;
        if (std::abs(times[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
            throw BadGrid("time grid must be uniform");
    }
}

/// Seed sequence for stream `index` of a run seeded with `seed`.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

} // namespace detail

/// Stationary complex Ornstein-Uhlenbeck sequence with M[z] = 0,
/// M[z_t z_s] = 0 and M[z_t z*_s] = (G g / 2) e^{-g |t - s|}. The recursion
/// z_{k+1} = a z_k + sqrt(V (1 - a^2)) xi_k with a = e^{-g dt} is exact on the
/// grid; xi_k are unit circular complex normals.
template <class Engine>
std::vector<complex> sample_noise(const BathSpec& bath, std::span<const double> times, Engine& rng)
{
    detail::require_uniform(times);
    const double var = 0.5 * bath.coupling() * bath.gamma();
    const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    const double a = std::exp(-bath.gamma() * dt);
    const double innov = std::sqrt(var * (1.0 - a * a) * 0.5);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<complex> z(times.size());
    const double s0 = std::sqrt(0.5 * var);
    z[0] = {s0 * normal(rng), s0 * normal(rng)};
    for (std::size_t k = 1; k < z.size(); ++k) {
        const double re = normal(rng), im = normal(rng);
        z[k] = a * z[k - 1] + complex{innov * re, innov * im};
    }
    return z;
}

inline std::vector<complex> sample_noise(const BathSpec& bath, std::span<const double> times,
                                         std::uint64_t seed)
{
    auto rng = detail::stream_engine(seed, 0);
    return sample_noise(bath, times, rng);
}

namespace detail {

/// Lagrange interpolation of uniformly sampled complex data on the `order`
/// nodes nearest to t (fewer when the series is shorter).
inline complex lagrange_at(const std::vector<complex>& v, double t0, double h, double t, std::size_t order = 6)
{
    const std::size_t n = v.size();
    const std::size_t p = std::min(order, n);
    if (p == 1)
        return v[0];
    const double x = (t - t0) / h;
    auto first = static_cast<std::ptrdiff_t>(std::floor(x)) - static_cast<std::ptrdiff_t>(p / 2 - 1);
    first = std::clamp<std::ptrdiff_t>(first, 0, static_cast<std::ptrdiff_t>(n - p));
    const double u = x - static_cast<double>(first);
    complex sum{};
    for (std::size_t i = 0; i < p; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < p; ++j)
            if (j != i)
                w *= (u - static_cast<double>(j)) / (static_cast<double>(i) - static_cast<double>(j));
        sum += w * v[static_cast<std::size_t>(first) + i];
    }
    return sum;
}

} // namespace detail

/// Integrates the linear stochastic Schroedinger equation
///   d/dt psi = { -i w |3><3| + sum_j [ L_j z*_{jt} - F_j(t) |3><3| ] } psi
/// on the shared grid with fixed Dormand-Prince steps. The noise is
/// interpolated linearly inside a step and F_j by six-point Lagrange
/// interpolation.
inline std::vector<StochasticState> propagate_trajectory(const ModelSpec& model,
                                                         const CoefficientTrajectory& coeffs,
                                                         const NoisePath& noise,
                                                         StochasticState initial = {})
{
    const std::size_t n = coeffs.size();
    if (noise.times.size() != n || noise.z1.size() != n || noise.z2.size() != n)
        throw GridMismatch("noise path and coefficient grid differ in length");
    for (std::size_t k = 0; k < n; ++k)
        if (noise.times[k] != coeffs.times[k])
            throw GridMismatch("noise path and coefficient grid differ");
    detail::require_uniform(noise.times);

    std::vector<StochasticState> out;
    out.reserve(n);
    out.push_back(initial);
    if (n == 1)
        return out;

    const double h = coeffs.times[1] - coeffs.times[0];
    const double t0 = coeffs.times[0];
    const complex iw{0.0, model.omega()};

    auto noise_at = [&](const std::vector<complex>& z, double t) {
        const double x = std::clamp((t - t0) / h, 0.0, static_cast<double>(n - 1));
        const auto k = std::min(static_cast<std::size_t>(x), n - 2);
        const double u = x - static_cast<double>(k);
        return (1.0 - u) * z[k] + u * z[k + 1];
    };
    auto rhs = [&](double t, const ode::State<6>& y, ode::State<6>& dy) {
        const complex c3{y[4], y[5]};
        const complex g = detail::lagrange_at(coeffs.F1, t0, h, t) + detail::lagrange_at(coeffs.F2, t0, h, t);
        const complex d1 = noise_at(noise.z1, t) * c3;
        const complex d2 = noise_at(noise.z2, t) * c3;
        const complex d3 = -(iw + g) * c3;
        dy = {d1.real(), d1.imag(), d2.real(), d2.imag(), d3.real(), d3.imag()};
    };

    ode::State<6> y{initial.c1.real(), initial.c1.imag(), initial.c2.real(),
                    initial.c2.imag(), initial.c3.real(), initial.c3.imag()};
    ode::State<6> k1;
    rhs(t0, y, k1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        auto r = ode::dopri_step<6>(rhs, coeffs.times[k], y, k1, h);
        for (double v : r.y1)
            if (!std::isfinite(v))
                throw NonFiniteError("stochastic state left the finite range");
        y = r.y1;
        k1 = r.k7;
        out.push_back({{y[0], y[1]}, {y[2], y[3]}, {y[4], y[5]}});
    }
    return out;
}

struct StochasticOptions {
    unsigned workers = default_workers();
    /// Trajectories per accumulation block. Fixed independently of the
    /// worker count so the reduction tree is always the same.
    std::size_t block_size = 64;
    /// Feed z instead of z* into the equation; the ensemble must not change.
    bool conjugate_noise = false;
};

namespace detail {

// components: rho11, rho22, rho33, Re/Im rho12, Re/Im rho13, Re/Im rho23
inline constexpr std::size_t n_components = 9;
using Components = std::array<double, n_components>;

inline Components outer_components(const StochasticState& s)
{
    const complex r12 = s.c1 * std::conj(s.c2);
    const complex r13 = s.c1 * std::conj(s.c3);
    const complex r23 = s.c2 * std::conj(s.c3);
    return {std::norm(s.c1), std::norm(s.c2), std::norm(s.c3), r12.real(), r12.imag(),
            r13.real(),      r13.imag(),      r23.real(),      r23.imag()};
}

/// Running mean and centred second moment per grid point and component.
struct Moments {
    double count = 0.0;
    std::vector<Components> mean;
    std::vector<Components> m2;

    explicit Moments(std::size_t n = 0) : mean(n, Components{}), m2(n, Components{}) {}

    void add(const std::vector<StochasticState>& traj)
    {
        count += 1.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const Components x = outer_components(traj[k]);
            for (std::size_t c = 0; c < n_components; ++c) {
                const double delta = x[c] - mean[k][c];
                mean[k][c] += delta / count;
                m2[k][c] += delta * (x[c] - mean[k][c]);
            }
        }
    }

    /// Chan et al. pairwise combination.
    static Moments merge(const Moments& a, const Moments& b)
    {
        if (a.count == 0.0)
            return b;
        if (b.count == 0.0)
            return a;
        Moments out(a.mean.size());
        out.count = a.count + b.count;
        for (std::size_t k = 0; k < a.mean.size(); ++k)
            for (std::size_t c = 0; c < n_components; ++c) {
                const double delta = b.mean[k][c] - a.mean[k][c];
                out.mean[k][c] = a.mean[k][c] + delta * b.count / out.count;
                out.m2[k][c] = a.m2[k][c] + b.m2[k][c] + delta * delta * a.count * b.count / out.count;
            }
        return out;
    }
};

inline Moments reduce_pairwise(std::vector<Moments>& blocks, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1)
        return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    return Moments::merge(reduce_pairwise(blocks, lo, mid), reduce_pairwise(blocks, mid, hi));
}

} // namespace detail

/// Ensemble average of |psi><psi| over n_traj noise realisations. The noise
/// of trajectory i comes from a stream seeded by (seed, i), and trajectories
/// are accumulated in fixed blocks reduced in a fixed pairwise order, so the
/// estimate is bit-identical for any worker count.
///
/// Populations initially in |1> or |2> are stationary and are added
/// analytically; trajectories start in |3>.
inline EnsembleEstimate ensemble_average(const ModelSpec& model, const IntegratorConfig& cfg,
                                         std::size_t n_traj, std::uint64_t seed,
                                         const StochasticOptions& opt = {})
{
    if (n_traj < 2)
        throw ValidationError("n_traj must be at least 2");
    if (opt.block_size == 0)
        throw ValidationError("block_size must be positive");
    const CoefficientTrajectory coeffs = evolve_coefficients(model, cfg);
    const std::size_t n = coeffs.size();

    const std::size_t n_blocks = (n_traj + opt.block_size - 1) / opt.block_size;
    std::vector<detail::Moments> blocks(n_blocks);
    parallel_for(n_blocks, opt.workers, [&](std::size_t b) {
        detail::Moments acc(n);
        const std::size_t first = b * opt.block_size;
        const std::size_t last = std::min(n_traj, first + opt.block_size);
        for (std::size_t i = first; i < last; ++i) {
            auto rng = detail::stream_engine(seed, i);
            NoisePath noise{coeffs.times, sample_noise(model.bath_left(), coeffs.times, rng),
                            sample_noise(model.bath_right(), coeffs.times, rng)};
            if (opt.conjugate_noise)
                for (auto* z : {&noise.z1, &noise.z2})
                    for (auto& v : *z)
                        v = std::conj(v);
            acc.add(propagate_trajectory(model, coeffs, noise));
        }
        blocks[b] = std::move(acc);
    });
    const detail::Moments total = detail::reduce_pairwise(blocks, 0, n_blocks);

    const auto& p0 = model.initial_populations();
    const double weight = p0[2];
    const double nt = total.count;
    EnsembleEstimate est;
    est.times = coeffs.times;
    est.n_traj = n_traj;
    est.seed = seed;
    est.rho_hat.resize(n);
    est.stderr.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& m = total.mean[k];
        detail::Components se;
        for (std::size_t c = 0; c < detail::n_components; ++c)
            se[c] = weight * std::sqrt(std::max(0.0, total.m2[k][c]) / (nt - 1.0) / nt);
        Matrix3& r = est.rho_hat[k];
        Matrix3& s = est.stderr[k];
        r(0, 0) = weight * m[0] + p0[0];
        r(1, 1) = weight * m[1] + p0[1];
        r(2, 2) = weight * m[2];
        r(0, 1) = weight * complex{m[3], m[4]};
        r(0, 2) = weight * complex{m[5], m[6]};
        r(1, 2) = weight * complex{m[7], m[8]};
        r(1, 0) = std::conj(r(0, 1));
        r(2, 0) = std::conj(r(0, 2));
        r(2, 1) = std::conj(r(1, 2));
        s(0, 0) = se[0];
        s(1, 1) = se[1];
        s(2, 2) = se[2];
        s(0, 1) = s(1, 0) = complex{se[3], se[4]};
        s(0, 2) = s(2, 0) = complex{se[5], se[6]};
        s(1, 2) = s(2, 1) = complex{se[7], se[8]};
    }
    return est;
}

} // namespace lambdaflow
