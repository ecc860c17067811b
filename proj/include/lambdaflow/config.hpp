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

// Run configuration in a flat INI document:
//
//   [run]         mode, format, output, workers
//   [model]       omega, gamma1, gamma2, coupling1, coupling2, kernel1, kernel2,
//                 rho11, rho22, rho33
//   [integrator]  dt_out, rel_tol, abs_tol, t_max, rho33_floor
//   [flow]        eps, min_len
//   [sweep]       axis1, axis2, and per axis either axisN_values (comma list)
//                 or axisN_min, axisN_max, axisN_count, axisN_spacing (linear|log)
//   [stochastic]  n_traj, seed
//
// Keys not listed here are rejected. Missing keys keep the mode defaults.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "coefficients.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "model.hpp"
#include "sweep.hpp"
#include "table.hpp"

namespace lambdaflow {

enum class Mode { simulate, sweep, diode, stochastic, validate };

inline std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::sweep: return "sweep";
    case Mode::diode: return "diode";
    case Mode::stochastic: return "stochastic";
    case Mode::validate: return "validate";
    }
    return "unknown";
}

inline Mode mode_from_string(std::string_view s)
{
    for (Mode m : {Mode::simulate, Mode::sweep, Mode::diode, Mode::stochastic, Mode::validate})
        if (to_string(m) == s)
            return m;
    throw ValidationError("unknown mode '" + std::string(s) + "'");
}

struct SweepSpec {
    SweepAxis axis1 = SweepAxis::gamma1;
    SweepAxis axis2 = SweepAxis::gamma2;
    std::vector<double> axis1_values;
    std::vector<double> axis2_values;

    bool operator==(const SweepSpec&) const = default;
};

struct StochasticParams {
    std::size_t n_traj = 10000;
    std::uint64_t seed = 1;

    bool operator==(const StochasticParams&) const = default;
};

struct RunConfig {
    Mode mode = Mode::simulate;
    ModelSpec model = make_model(0.2, 10.0, 1.0, 1.0);
    IntegratorConfig integrator;
    FlowConfig flow;
    std::optional<SweepSpec> sweep;
    std::optional<StochasticParams> stochastic;
    std::string output_path = "out.csv";
    Format format = Format::csv;
    unsigned workers = 0; ///< 0 means one per hardware thread

    SweepGrid sweep_grid() const
    {
        if (!sweep)
            throw ValidationError("sweep section missing");
        return SweepGrid{sweep->axis1, sweep->axis2, sweep->axis1_values, sweep->axis2_values,
                         model, integrator, flow};
    }

    void validate() const
    {
        integrator.validate();
        flow.validate();
        if (mode == Mode::sweep) {
            if (!sweep)
                throw ValidationError("sweep mode requires a [sweep] section");
            sweep_grid().validate();
        }
        if (mode == Mode::stochastic) {
            if (!stochastic)
                throw ValidationError("stochastic mode requires a [stochastic] section");
            if (stochastic->n_traj < 2)
                throw ValidationError("n_traj must be at least 2");
        }
        if (output_path.empty())
            throw ValidationError("output path must not be empty");
    }

    bool operator==(const RunConfig&) const = default;
};

/// Defaults per mode: simulate reproduces the long/short memory pair
/// (0.2, 10) with unit couplings, diode the forward geometry
/// (gamma 5 / 0.2, Gamma 0.5 / 1), sweep the (gamma1, gamma2) duration map,
/// stochastic the symmetric unit model.
inline RunConfig default_run_config(Mode mode)
{
    RunConfig rc;
    rc.mode = mode;
    switch (mode) {
    case Mode::simulate:
    case Mode::validate:
        break;
    case Mode::diode:
        rc.model = make_model(5.0, 0.2, 0.5, 1.0);
        rc.output_path = "diode.csv";
        break;
    case Mode::sweep: {
        const SweepGrid g = duration_map_grid();
        rc.model = g.base_model;
        rc.integrator = g.cfg;
        rc.sweep = SweepSpec{g.axis1, g.axis2, g.axis1_values, g.axis2_values};
        rc.output_path = "sweep.csv";
        break;
    }
    case Mode::stochastic:
        rc.model = make_model(1.0, 1.0, 1.0, 1.0);
        rc.integrator.t_max = 10.0;
        rc.integrator.rho33_floor = 0.0;
        rc.stochastic = StochasticParams{};
        rc.output_path = "stochastic.csv";
        break;
    }
    return rc;
}

namespace detail {

inline double parse_double(const std::string& where, const std::string& text)
{
    double v{};
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw ParseError(where + ": expected a number, got '" + text + "'");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& where, const std::string& text)
{
    std::uint64_t v{};
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw ParseError(where + ": expected a non-negative integer, got '" + text + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& where, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw ParseError(where + ": empty list element");
        out.push_back(parse_double(where, item.substr(b, e - b + 1)));
    }
    if (out.empty())
        throw ParseError(where + ": empty list");
    return out;
}

inline const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s{
        {"run", {"mode", "format", "output", "workers"}},
        {"model", {"omega", "gamma1", "gamma2", "coupling1", "coupling2", "kernel1", "kernel2", "rho11",
                   "rho22", "rho33"}},
        {"integrator", {"dt_out", "rel_tol", "abs_tol", "t_max", "rho33_floor"}},
        {"flow", {"eps", "min_len"}},
        {"sweep", {"axis1", "axis2", "axis1_values", "axis2_values", "axis1_min", "axis1_max",
                   "axis1_count", "axis1_spacing", "axis2_min", "axis2_max", "axis2_count",
                   "axis2_spacing"}},
        {"stochastic", {"n_traj", "seed"}},
    };
    return s;
}

} // namespace detail

/// Parses and validates a configuration document. `mode_hint` (from the CLI
/// subcommand) selects the defaults when the document has no [run] mode; a
/// conflicting mode is an error.
inline RunConfig parse_config(const std::string& text, std::optional<Mode> mode_hint = std::nullopt)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("config line " + std::to_string(e.line()) + ": " + e.message());
    }

    for (const auto& [section, body] : tree) {
        const auto it = detail::schema().find(section);
        if (body.empty() && !body.data().empty())
            throw ParseError("key '" + section + "' must belong to a section");
        if (it == detail::schema().end())
            throw ParseError("unknown section '" + section + "'");
        for (const auto& [key, value] : body)
            if (!it->second.count(key))
                throw ParseError("unknown key '" + section + "." + key + "'");
    }

    auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "/" + key, '/')))
            return *v;
        return std::nullopt;
    };
    auto number = [&](const std::string& section, const std::string& key, double& target) {
        if (auto v = get(section, key))
            target = detail::parse_double(section + "." + key, *v);
    };

    Mode mode = mode_hint.value_or(Mode::simulate);
    if (auto m = get("run", "mode")) {
        const Mode parsed = mode_from_string(*m);
        if (mode_hint && *mode_hint != parsed)
            throw ValidationError("config mode '" + *m + "' conflicts with subcommand '"
                                  + std::string(to_string(*mode_hint)) + "'");
        mode = parsed;
    }
    RunConfig rc = default_run_config(mode);

    if (auto v = get("run", "format"))
        rc.format = format_from_string(*v);
    if (auto v = get("run", "output"))
        rc.output_path = *v;
    if (auto v = get("run", "workers"))
        rc.workers = static_cast<unsigned>(detail::parse_unsigned("run.workers", *v));

    {
        const ModelSpec& m = rc.model;
        double omega = m.omega(), g1 = m.bath_left().gamma(), g2 = m.bath_right().gamma();
        double c1 = m.bath_left().coupling(), c2 = m.bath_right().coupling();
        KernelFamily k1 = m.bath_left().kernel(), k2 = m.bath_right().kernel();
        Populations p = m.initial_populations();
        number("model", "omega", omega);
        number("model", "gamma1", g1);
        number("model", "gamma2", g2);
        number("model", "coupling1", c1);
        number("model", "coupling2", c2);
        number("model", "rho11", p[0]);
        number("model", "rho22", p[1]);
        number("model", "rho33", p[2]);
        if (auto v = get("model", "kernel1"))
            k1 = kernel_from_string(*v);
        if (auto v = get("model", "kernel2"))
            k2 = kernel_from_string(*v);
        rc.model = ModelSpec(BathSpec(g1, c1, k1), BathSpec(g2, c2, k2), p, omega);
    }

    number("integrator", "dt_out", rc.integrator.dt_out);
    number("integrator", "rel_tol", rc.integrator.rel_tol);
    number("integrator", "abs_tol", rc.integrator.abs_tol);
    number("integrator", "t_max", rc.integrator.t_max);
    number("integrator", "rho33_floor", rc.integrator.rho33_floor);
    number("flow", "eps", rc.flow.eps);
    number("flow", "min_len", rc.flow.min_len);

    if (tree.get_child_optional("sweep")) {
        SweepSpec s = rc.sweep.value_or(SweepSpec{});
        if (auto v = get("sweep", "axis1"))
            s.axis1 = axis_from_string(*v);
        if (auto v = get("sweep", "axis2"))
            s.axis2 = axis_from_string(*v);
        for (int a = 1; a <= 2; ++a) {
            const std::string prefix = "axis" + std::to_string(a);
            auto& values = a == 1 ? s.axis1_values : s.axis2_values;
            if (auto v = get("sweep", prefix + "_values")) {
                values = detail::parse_list("sweep." + prefix + "_values", *v);
                continue;
            }
            auto lo = get("sweep", prefix + "_min"), hi = get("sweep", prefix + "_max"),
                 count = get("sweep", prefix + "_count");
            if (!lo && !hi && !count)
                continue;
            if (!lo || !hi || !count)
                throw ParseError("sweep." + prefix + ": _min, _max and _count must be given together");
            const double l = detail::parse_double("sweep." + prefix + "_min", *lo);
            const double h = detail::parse_double("sweep." + prefix + "_max", *hi);
            const auto n = static_cast<std::size_t>(detail::parse_unsigned("sweep." + prefix + "_count", *count));
            const std::string spacing = get("sweep", prefix + "_spacing").value_or("linear");
            if (spacing == "linear")
                values = linear_axis(l, h, n);
            else if (spacing == "log")
                values = log_axis(l, h, n);
            else
                throw ParseError("sweep." + prefix + "_spacing must be linear or log");
        }
        rc.sweep = s;
    }

    if (tree.get_child_optional("stochastic")) {
        StochasticParams sp = rc.stochastic.value_or(StochasticParams{});
        if (auto v = get("stochastic", "n_traj"))
            sp.n_traj = static_cast<std::size_t>(detail::parse_unsigned("stochastic.n_traj", *v));
        if (auto v = get("stochastic", "seed"))
            sp.seed = detail::parse_unsigned("stochastic.seed", *v);
        rc.stochastic = sp;
    }

    rc.validate();
    return rc;
}

/// Fully resolved INI document; parse_config(serialize_config(rc)) == rc.
inline std::string serialize_config(const RunConfig& rc)
{
    std::ostringstream os;
    const auto& m = rc.model;
    const auto& p = m.initial_populations();
    os << "[run]\n"
       << "mode = " << to_string(rc.mode) << '\n'
       << "format = " << to_string(rc.format) << '\n'
       << "output = " << rc.output_path << '\n'
       << "workers = " << rc.workers << '\n'
       << "\n[model]\n"
       << "omega = " << format_double(m.omega()) << '\n'
       << "gamma1 = " << format_double(m.bath_left().gamma()) << '\n'
       << "gamma2 = " << format_double(m.bath_right().gamma()) << '\n'
       << "coupling1 = " << format_double(m.bath_left().coupling()) << '\n'
       << "coupling2 = " << format_double(m.bath_right().coupling()) << '\n'
       << "kernel1 = " << to_string(m.bath_left().kernel()) << '\n'
       << "kernel2 = " << to_string(m.bath_right().kernel()) << '\n'
       << "rho11 = " << format_double(p[0]) << '\n'
       << "rho22 = " << format_double(p[1]) << '\n'
       << "rho33 = " << format_double(p[2]) << '\n'
       << "\n[integrator]\n"
       << "dt_out = " << format_double(rc.integrator.dt_out) << '\n'
       << "rel_tol = " << format_double(rc.integrator.rel_tol) << '\n'
       << "abs_tol = " << format_double(rc.integrator.abs_tol) << '\n'
       << "t_max = " << format_double(rc.integrator.t_max) << '\n'
       << "rho33_floor = " << format_double(rc.integrator.rho33_floor) << '\n'
       << "\n[flow]\n"
       << "eps = " << format_double(rc.flow.eps) << '\n'
       << "min_len = " << format_double(rc.flow.min_len) << '\n';
    if (rc.sweep) {
        auto list = [](const std::vector<double>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + format_double(v[i]);
            return s;
        };
        os << "\n[sweep]\n"
           << "axis1 = " << to_string(rc.sweep->axis1) << '\n'
           << "axis2 = " << to_string(rc.sweep->axis2) << '\n'
           << "axis1_values = " << list(rc.sweep->axis1_values) << '\n'
           << "axis2_values = " << list(rc.sweep->axis2_values) << '\n';
    }
    if (rc.stochastic)
        os << "\n[stochastic]\n"
           << "n_traj = " << rc.stochastic->n_traj << '\n'
           << "seed = " << rc.stochastic->seed << '\n';
    return os.str();
}

} // namespace lambdaflow
