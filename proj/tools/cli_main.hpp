#pragma once

// Argument parsing for the decim executable. Precedence: preset defaults,
// then --config JSON, then explicit flags.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "app.hpp"

namespace decim::app {

namespace detail {

struct FlagValues {
    std::optional<std::string> config, out, format, method;
    std::optional<double> eta, omega, omega_min, omega_max, t_max, dt, seed_amp;
    std::optional<int> omega_points, n_sites, compare_oracle, reps;
    std::optional<unsigned> threads;
    std::optional<std::vector<int>> sites, sizes;
    std::optional<std::vector<std::string>> pairs;
    std::optional<std::vector<double>> gamma_grid, pump_grid;
    std::optional<double> epsilon, t_c, phi, gamma, pump, gamma_nn, pump_nn;
    bool hatano_nelson = false, mirrored = false, linear = false;
};

inline void add_flags(CLI::App& a, FlagValues& f)
{
    a.add_option("--config", f.config, "JSON config file");
    a.add_option("--out", f.out, "output data file (stdout if omitted)");
    a.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    a.add_option("--eta", f.eta, "imaginary frequency shift, units of t_c");
    a.add_option("--threads", f.threads, "worker threads for grid evaluation");
    a.add_option("--omega", f.omega, "single frequency, units of t_c");
    a.add_option("--omega-min", f.omega_min, "frequency grid start, units of t_c");
    a.add_option("--omega-max", f.omega_max, "frequency grid end, units of t_c");
    a.add_option("--omega-points", f.omega_points, "frequency grid size");
    a.add_option("--sites", f.sites, "site indices")->delimiter(',');
    a.add_option("--pairs", f.pairs, "site pairs j:l")->delimiter(',');
    a.add_option("--n-sites", f.n_sites, "finite chain length");
    a.add_option("--method", f.method, "gf method: semi, dense or finite");
    a.add_option("--tmax", f.t_max, "final time, units of 1/t_c");
    a.add_option("--dt", f.dt, "time step, units of 1/t_c");
    a.add_option("--seed-amp", f.seed_amp, "coherent seed amplitude at site 0");
    a.add_option("--compare-oracle", f.compare_oracle, "also propagate an N-site chain by matrix exponential");
    a.add_option("--gamma-grid", f.gamma_grid, "min,max,points")->delimiter(',')->expected(3);
    a.add_option("--pump-grid", f.pump_grid, "min,max,points")->delimiter(',')->expected(3);
    a.add_option("--sizes", f.sizes, "benchmark chain lengths")->delimiter(',');
    a.add_option("--reps", f.reps, "benchmark repetitions");
    a.add_option("--epsilon", f.epsilon, "on-site energy, units of t_c");
    a.add_option("--tc", f.t_c, "hopping amplitude (absolute)");
    a.add_option("--phi", f.phi, "hopping phase (rad)");
    a.add_option("--gamma", f.gamma, "local loss, units of t_c");
    a.add_option("--pump", f.pump, "local gain, units of t_c");
    a.add_option("--gamma-nn", f.gamma_nn, "nearest-neighbour loss, units of t_c");
    a.add_option("--pump-nn", f.pump_nn, "nearest-neighbour gain, units of t_c");
    a.add_flag("--hatano-nelson", f.hatano_nelson, "set pump_nn = pump / 2");
    a.add_flag("--mirrored", f.mirrored, "number sites from the opposite end");
    a.add_flag("--linear", f.linear, "gain in linear units instead of dB");
}

inline void apply_flags(RunConfig& c, const FlagValues& f)
{
    if (f.config) {
        std::ifstream in(*f.config);
        if (!in) throw UsageError("cannot read config " + *f.config);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(std::string("malformed config: ") + e.what());
        }
        apply_json_config(c, j);
    }
    if (f.t_c) c.params.t_c = *f.t_c;
    const double tc = c.params.t_c;
    if (f.epsilon) c.params.epsilon = *f.epsilon * tc;
    if (f.phi) c.params.phi = *f.phi;
    if (f.gamma) c.params.gamma = *f.gamma * tc;
    if (f.pump) c.params.pump = *f.pump * tc;
    if (f.gamma_nn) c.params.gamma_nn = *f.gamma_nn * tc;
    if (f.pump_nn) c.params.pump_nn = *f.pump_nn * tc;
    if (f.hatano_nelson) c.params.pump_nn = c.params.pump / 2.0;
    if (f.mirrored) c.params.mirrored = true;
    if (f.out) c.output_path = *f.out;
    if (f.format) c.format = *f.format == "json" ? Format::json : Format::csv;
    if (f.eta) c.eta = *f.eta;
    if (f.threads) c.threads = *f.threads;
    if (f.omega) c.omega = *f.omega;
    if (f.omega_min) c.omega_min = *f.omega_min;
    if (f.omega_max) c.omega_max = *f.omega_max;
    if (f.omega_points) c.omega_points = *f.omega_points;
    if (f.sites) c.sites = *f.sites;
    if (f.pairs) {
        c.pairs.clear();
        for (const auto& s : *f.pairs) {
            const auto colon = s.find(':');
            if (colon == std::string::npos) throw UsageError("pair '" + s + "' must look like j:l");
            try {
                c.pairs.emplace_back(std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
            } catch (const std::exception&) {
                throw UsageError("pair '" + s + "' must look like j:l");
            }
        }
    }
    if (f.n_sites) c.n_sites = *f.n_sites;
    if (f.method) c.gf_method = *f.method;
    if (f.t_max) c.t_max = *f.t_max;
    if (f.dt) c.dt = *f.dt;
    if (f.seed_amp) c.seed_amp = *f.seed_amp;
    if (f.compare_oracle) c.compare_oracle = *f.compare_oracle;
    if (f.gamma_grid) {
        c.gamma_min = (*f.gamma_grid)[0];
        c.gamma_max = (*f.gamma_grid)[1];
        c.gamma_points = static_cast<int>((*f.gamma_grid)[2]);
    }
    if (f.pump_grid) {
        c.pump_min = (*f.pump_grid)[0];
        c.pump_max = (*f.pump_grid)[1];
        c.pump_points = static_cast<int>((*f.pump_grid)[2]);
    }
    if (f.sizes) c.bench_sizes = *f.sizes;
    if (f.reps) c.repetitions = *f.reps;
    if (f.linear) c.decibels = false;
}

}  // namespace detail

inline const std::vector<std::string>& subcommand_names()
{
    static const std::vector<std::string> names{"convergence", "gf",    "xi",    "dos",  "dos-bulk", "winding",
                                                "phases",      "transient", "gain", "noise", "bench"};
    return names;
}

/// Full command-line entry point; returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Green's functions of driven-dissipative bosonic chains by decimation"};
    app.require_subcommand(1);
    detail::FlagValues flags;
    std::vector<CLI::App*> subs;
    for (const auto& n : subcommand_names()) subs.push_back(app.add_subcommand(n, n + " data"));
    for (const auto& n : preset_names()) subs.push_back(app.add_subcommand(n, "data for figure preset " + n));
    for (auto* s : subs) detail::add_flags(*s, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    std::string name;
    for (auto* s : subs)
        if (s->parsed()) name = s->get_name();

    RunConfig cfg;
    try {
        cfg = is_preset(name) ? preset_config(name) : RunConfig{};
        cfg.subcommand = name;
        detail::apply_flags(cfg, flags);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    return run(cfg, out, err);
}

}  // namespace decim::app
