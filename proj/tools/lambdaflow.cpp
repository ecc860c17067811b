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

// lambdaflow command-line driver.
//
//   lambdaflow simulate   [flags]   coefficients, populations, currents, intervals
//   lambdaflow sweep      [flags]   first-interval duration map
//   lambdaflow diode      [flags]   forward vs reversed geometry
//   lambdaflow stochastic [flags]   trajectory ensemble vs deterministic solution
//   lambdaflow validate   [flags]   oracle-equivalence self check
//
// Precedence: built-in mode defaults < --config file < command-line flags.
// Exit codes: 0 success, 1 validation/physics error, 2 I/O error,
// 3 integration failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lambdaflow/lambdaflow.hpp"

namespace lf = lambdaflow;

namespace {

struct Overrides {
    double gamma1 = 0, gamma2 = 0, coupling1 = 0, coupling2 = 0;
    double tmax = 0, dt_out = 0, eps = 0, min_len = 0;
    std::size_t n_traj = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out, format, config;
    std::vector<CLI::Option*> opts;

    bool given(const std::string& name) const
    {
        for (auto* o : opts)
            if (o->check_name(name))
                return o->count() > 0;
        return false;
    }
};

void add_flags(CLI::App* sub, Overrides& o)
{
    o.opts = {
        sub->add_option("--gamma1", o.gamma1, "memory rate of bath 1 (units of omega)"),
        sub->add_option("--gamma2", o.gamma2, "memory rate of bath 2"),
        sub->add_option("--coupling1", o.coupling1, "coupling strength of bath 1"),
        sub->add_option("--coupling2", o.coupling2, "coupling strength of bath 2"),
        sub->add_option("--tmax", o.tmax, "maximum simulated time (units of 1/omega)"),
        sub->add_option("--dt-out", o.dt_out, "output grid spacing"),
        sub->add_option("--eps", o.eps, "dead band on Re F_j"),
        sub->add_option("--min-len", o.min_len, "shortest reported interval"),
        sub->add_option("--n-traj", o.n_traj, "stochastic trajectories"),
        sub->add_option("--seed", o.seed, "stochastic seed"),
        sub->add_option("--workers", o.workers, "worker threads (0 = all cores)"),
        sub->add_option("--out", o.out, "output path"),
        sub->add_option("--format", o.format, "csv or json"),
        sub->add_option("--config", o.config, "INI configuration file"),
    };
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw lf::IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lf::RunConfig resolve(lf::Mode mode, const Overrides& o)
{
    lf::RunConfig rc = o.given("--config") ? lf::parse_config(read_file(o.config), mode)
                                           : lf::default_run_config(mode);
    const auto& m = rc.model;
    const double g1 = o.given("--gamma1") ? o.gamma1 : m.bath_left().gamma();
    const double g2 = o.given("--gamma2") ? o.gamma2 : m.bath_right().gamma();
    const double c1 = o.given("--coupling1") ? o.coupling1 : m.bath_left().coupling();
    const double c2 = o.given("--coupling2") ? o.coupling2 : m.bath_right().coupling();
    rc.model = lf::ModelSpec(lf::BathSpec(g1, c1, m.bath_left().kernel()),
                             lf::BathSpec(g2, c2, m.bath_right().kernel()), m.initial_populations(), m.omega());
    if (o.given("--tmax"))
        rc.integrator.t_max = o.tmax;
    if (o.given("--dt-out"))
        rc.integrator.dt_out = o.dt_out;
    if (o.given("--eps"))
        rc.flow.eps = o.eps;
    if (o.given("--min-len"))
        rc.flow.min_len = o.min_len;
    if (o.given("--n-traj") || o.given("--seed")) {
        lf::StochasticParams sp = rc.stochastic.value_or(lf::StochasticParams{});
        if (o.given("--n-traj"))
            sp.n_traj = o.n_traj;
        if (o.given("--seed"))
            sp.seed = o.seed;
        rc.stochastic = sp;
    }
    if (o.given("--workers"))
        rc.workers = o.workers;
    if (o.given("--out"))
        rc.output_path = o.out;
    if (o.given("--format"))
        rc.format = lf::format_from_string(o.format);
    if (!o.given("--out") && rc.format == lf::Format::json) {
        std::filesystem::path p(rc.output_path);
        if (p.extension() == ".csv")
            rc.output_path = p.replace_extension(".json").string();
    }
    rc.validate();
    return rc;
}

/// `runs/a.csv` + "forward" -> `runs/a.forward.csv`
std::string sidecar(const lf::RunConfig& rc, const std::string& tag)
{
    std::filesystem::path p(rc.output_path);
    const std::string ext = rc.format == lf::Format::csv ? ".csv" : ".json";
    p.replace_extension();
    return p.string() + "." + tag + ext;
}

void write_metadata(const lf::RunConfig& rc, const std::vector<std::string>& outputs, nlohmann::json extra)
{
    nlohmann::json meta = {
        {"version", lf::version},
        {"mode", std::string(lf::to_string(rc.mode))},
        {"config_ini", lf::serialize_config(rc)},
        {"outputs", outputs},
    };
    for (auto& [k, v] : extra.items())
        meta[k] = v;
    lf::write_text_file(rc.output_path + ".meta.json", meta.dump(2) + "\n");
}

unsigned workers_of(const lf::RunConfig& rc)
{
    return rc.workers == 0 ? lf::default_workers() : rc.workers;
}

int run_simulate(const lf::RunConfig& rc)
{
    const auto coeffs = lf::evolve_coefficients(rc.model, rc.integrator);
    const auto dyn = lf::populations(coeffs, rc.model);
    const auto report = lf::detect_intervals(coeffs, rc.flow);
    const std::string ivpath = sidecar(rc, "intervals");
    lf::emit(lf::simulation_table(coeffs, dyn, rc.flow.eps), rc.format, rc.output_path);
    lf::emit(lf::intervals_table(report), rc.format, ivpath);
    write_metadata(rc, {rc.output_path, ivpath},
                   {{"stop_time", coeffs.stop_time}, {"stopped_early", coeffs.stopped_early},
                    {"n_intervals", report.intervals.size()}});
    std::cerr << "simulate: " << coeffs.size() << " points, " << report.intervals.size()
              << " unidirectional interval(s), first duration " << report.first_duration() << '\n';
    return 0;
}

int run_sweep(const lf::RunConfig& rc)
{
    const auto res = lf::run_sweep(rc.sweep_grid(), workers_of(rc));
    lf::emit(lf::sweep_table(res), rc.format, rc.output_path);
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : res.failures)
        failures.push_back({{"i", f.i}, {"j", f.j}, {"message", f.message}});
    write_metadata(rc, {rc.output_path}, {{"failures", failures}});
    std::cerr << "sweep: " << res.rows() << "x" << res.cols() << " cells, " << res.failures.size()
              << " failure(s)\n";
    return 0;
}

int run_diode(const lf::RunConfig& rc)
{
    const auto d = lf::diode_compare(rc.model, rc.integrator, rc.flow);
    std::vector<std::string> outputs{rc.output_path};
    lf::emit(lf::diode_table(d), rc.format, rc.output_path);
    for (const auto& [g, tag] : {std::pair{&d.forward, "forward"}, std::pair{&d.reverse, "reverse"}}) {
        const std::string series = sidecar(rc, tag);
        const std::string ivs = sidecar(rc, std::string(tag) + ".intervals");
        lf::emit(lf::simulation_table(g->coeffs, g->dynamics, rc.flow.eps), rc.format, series);
        lf::emit(lf::intervals_table(g->report), rc.format, ivs);
        outputs.push_back(series);
        outputs.push_back(ivs);
    }
    write_metadata(rc, outputs, {{"asymmetry_ratio", d.asymmetry_ratio}});
    std::cerr << "diode: asymmetry ratio " << d.asymmetry_ratio << '\n';
    return 0;
}

int run_stochastic(const lf::RunConfig& rc)
{
    lf::StochasticOptions opt;
    opt.workers = workers_of(rc);
    const auto est = lf::ensemble_average(rc.model, rc.integrator, rc.stochastic->n_traj, rc.stochastic->seed, opt);
    const auto coeffs = lf::evolve_coefficients(rc.model, rc.integrator);
    const auto dyn = lf::populations(coeffs, rc.model);
    const std::string det = sidecar(rc, "deterministic");
    lf::emit(lf::ensemble_table(est), rc.format, rc.output_path);
    lf::emit(lf::simulation_table(coeffs, dyn, rc.flow.eps), rc.format, det);
    write_metadata(rc, {rc.output_path, det}, {});
    std::cerr << "stochastic: " << est.n_traj << " trajectories\n";
    return 0;
}

int run_validate(const lf::RunConfig& rc)
{
    bool ok = true;
    for (const auto& c : lf::run_validation(workers_of(rc))) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transient energy flow through a Lambda system between two non-Markovian baths"};
    app.set_version_flag("--version", std::string(lf::version));
    app.require_subcommand(1);

    const std::pair<lf::Mode, const char*> modes[] = {
        {lf::Mode::simulate, "coefficients, populations, currents and unidirectional intervals"},
        {lf::Mode::sweep, "first-interval duration map over a 2-D parameter grid"},
        {lf::Mode::diode, "forward vs reversed geometry comparison"},
        {lf::Mode::stochastic, "stochastic trajectory ensemble"},
        {lf::Mode::validate, "oracle-equivalence self check"},
    };
    std::vector<Overrides> overrides(std::size(modes));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(modes); ++i) {
        auto* sub = app.add_subcommand(std::string(lf::to_string(modes[i].first)), modes[i].second);
        add_flags(sub, overrides[i]);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed())
                continue;
            const lf::RunConfig rc = resolve(modes[i].first, overrides[i]);
            switch (rc.mode) {
            case lf::Mode::simulate: return run_simulate(rc);
            case lf::Mode::sweep: return run_sweep(rc);
            case lf::Mode::diode: return run_diode(rc);
            case lf::Mode::stochastic: return run_stochastic(rc);
            case lf::Mode::validate: return run_validate(rc);
            }
        }
    } catch (const lf::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const lf::IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return 3;
    } catch (const lf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
