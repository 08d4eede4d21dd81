#pragma once

// Command-line application layer: configuration, figure presets, table
// output and the decimation-vs-dense benchmark. Kept out of include/ so the
// library itself does not depend on the JSON and CLI headers.

#include <decim/decim.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace decim::app {

using json = nlohmann::json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Format { csv, json };

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

/// Everything a run needs. Physical fields are absolute; frequencies and times
/// here are in units of t_c and are converted when the run starts.
struct RunConfig {
    std::string subcommand;
    ChainParams params;  // absolute units
    double omega = 0.0;
    double omega_min = -4.0;
    double omega_max = 4.0;
    int omega_points = 401;
    double eta = 0.0;
    int n_sites = 45;
    std::vector<int> sites{0};
    std::vector<std::pair<int, int>> pairs{{5, 4}};
    std::string gf_method = "semi";
    double t_max = 20.0;
    double dt = 0.05;
    double seed_amp = 1.0;
    int compare_oracle = 0;
    double gamma_min = 0.2, gamma_max = 4.0;
    int gamma_points = 20;
    double pump_min = 0.15, pump_max = 3.95;
    int pump_points = 20;
    bool decibels = true;
    std::vector<int> bench_sizes{50, 100, 200, 400};
    int repetitions = 7;
    std::string output_path;
    Format format = Format::csv;
    unsigned threads = 1;
    /// Per-preset sub-runs (figures that produce several data sets).
    std::vector<std::string> variants;
};

/// Ordered table of preformatted cells; formatting is fixed so output is reproducible.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    json meta = json::object();
};

inline std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(int v) { return std::to_string(v); }

inline std::vector<double> linspace(double a, double b, int n)
{
    if (n < 2) throw UsageError("omega_points must be >= 2");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    return v;
}

inline void validate(const RunConfig& c)
{
    if (c.omega_points < 2) throw UsageError("omega_points must be >= 2");
    if (!(c.omega_max > c.omega_min)) throw UsageError("empty omega grid: omega_max must exceed omega_min");
    if (c.eta < 0) throw UsageError("eta must be >= 0");
    if (c.n_sites < 1) throw UsageError("n_sites must be >= 1");
    if (!(c.dt > 0) || !(c.t_max > 0)) throw UsageError("t_max and dt must be positive");
    if (c.repetitions < 1) throw UsageError("repetitions must be >= 1");
    if (c.bench_sizes.empty()) throw UsageError("bench needs at least one size");
    if (c.gamma_points < 1 || c.pump_points < 1) throw UsageError("phase grids must be nonempty");
    for (int j : c.sites)
        if (j < 0) throw UsageError("sites must be nonnegative");
    for (auto [j, l] : c.pairs)
        if (j < 0 || l < 0) throw UsageError("site pairs must be nonnegative");
    if (c.compare_oracle < 0) throw UsageError("compare-oracle must be >= 0");
    if (c.params.t_c <= 0) throw UsageError("t_c must be positive");
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------- config I/O

/// Reads a parameter block. With "units": "t_c" every rate and energy is a multiple of t_c.
inline ChainParams params_from_json(const json& j, ChainParams base = {})
{
    ChainParams p = base;
    p.t_c = j.value("t_c", p.t_c);
    const bool relative = j.value("units", std::string()) == "t_c";
    const double s = relative ? p.t_c : 1.0;
    auto rd = [&](const char* key, double& field) {
        if (j.contains(key)) field = j.at(key).get<double>() * s;
    };
    rd("epsilon", p.epsilon);
    rd("gamma", p.gamma);
    rd("pump", p.pump);
    rd("gamma_nn", p.gamma_nn);
    rd("pump_nn", p.pump_nn);
    p.phi = j.value("phi", p.phi);
    p.mirrored = j.value("mirrored", p.mirrored);
    return p;
}

inline json params_to_json(const ChainParams& p)
{
    return {{"epsilon", p.epsilon}, {"t_c", p.t_c},           {"phi", p.phi},
            {"gamma", p.gamma},     {"pump", p.pump},         {"gamma_nn", p.gamma_nn},
            {"pump_nn", p.pump_nn}, {"mirrored", p.mirrored}};
}

inline json config_to_json(const RunConfig& c)
{
    json pairs = json::array();
    for (auto [j, l] : c.pairs) pairs.push_back({j, l});
    return {{"subcommand", c.subcommand},
            {"params", params_to_json(c.params)},
            {"omega", c.omega},
            {"omega_min", c.omega_min},
            {"omega_max", c.omega_max},
            {"omega_points", c.omega_points},
            {"eta", c.eta},
            {"n_sites", c.n_sites},
            {"sites", c.sites},
            {"pairs", pairs},
            {"gf_method", c.gf_method},
            {"t_max", c.t_max},
            {"dt", c.dt},
            {"seed_amp", c.seed_amp},
            {"compare_oracle", c.compare_oracle},
            {"gamma_grid", {c.gamma_min, c.gamma_max, c.gamma_points}},
            {"pump_grid", {c.pump_min, c.pump_max, c.pump_points}},
            {"bench_sizes", c.bench_sizes},
            {"repetitions", c.repetitions},
            {"threads", c.threads},
            {"units", "t_c"}};
}

/// Applies a JSON config file on top of `c`. Unknown keys are rejected.
inline void apply_json_config(RunConfig& c, const json& j)
{
    static const std::vector<std::string> known{
        "subcommand", "params", "omega",     "omega_min",      "omega_max",   "omega_points", "eta",
        "n_sites",    "sites",  "pairs",     "gf_method",      "t_max",       "dt",           "seed_amp",
        "compare_oracle", "gamma_grid", "pump_grid", "bench_sizes", "repetitions", "threads", "units",
        "format",     "decibels"};
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw UsageError("unknown config key '" + it.key() + "'");
    try {
        if (j.contains("params")) c.params = params_from_json(j.at("params"), c.params);
        c.omega = j.value("omega", c.omega);
        c.omega_min = j.value("omega_min", c.omega_min);
        c.omega_max = j.value("omega_max", c.omega_max);
        c.omega_points = j.value("omega_points", c.omega_points);
        c.eta = j.value("eta", c.eta);
        c.n_sites = j.value("n_sites", c.n_sites);
        if (j.contains("sites")) c.sites = j.at("sites").get<std::vector<int>>();
        if (j.contains("pairs")) {
            c.pairs.clear();
            for (const auto& pr : j.at("pairs")) c.pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
        }
        c.gf_method = j.value("gf_method", c.gf_method);
        c.t_max = j.value("t_max", c.t_max);
        c.dt = j.value("dt", c.dt);
        c.seed_amp = j.value("seed_amp", c.seed_amp);
        c.compare_oracle = j.value("compare_oracle", c.compare_oracle);
        if (j.contains("gamma_grid")) {
            const auto& g = j.at("gamma_grid");
            c.gamma_min = g.at(0);
            c.gamma_max = g.at(1);
            c.gamma_points = g.at(2);
        }
        if (j.contains("pump_grid")) {
            const auto& g = j.at("pump_grid");
            c.pump_min = g.at(0);
            c.pump_max = g.at(1);
            c.pump_points = g.at(2);
        }
        if (j.contains("bench_sizes")) c.bench_sizes = j.at("bench_sizes").get<std::vector<int>>();
        c.repetitions = j.value("repetitions", c.repetitions);
        c.threads = j.value("threads", c.threads);
        c.decibels = j.value("decibels", c.decibels);
        if (j.contains("format")) {
            const auto f = j.at("format").get<std::string>();
            if (f != "csv" && f != "json") throw UsageError("format must be csv or json");
            c.format = f == "csv" ? Format::csv : Format::json;
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad config value: ") + e.what());
    }
}

// ---------------------------------------------------------------- presets

/// Named presets with fixed parameters, one per reference data set.
inline RunConfig preset_config(const std::string& name)
{
    using std::numbers::pi;
    RunConfig c;
    c.subcommand = name;
    if (name == "fig2") {
        c.params = ChainParams::coupled_cavity(-0.2, 1.0, 0.1, 0.05);
        c.omega = 0.0;
        c.n_sites = 400;
    } else if (name == "fig3") {
        c.params = ChainParams::coupled_cavity(0.0, 1.0, 0.0, 0.0);
        c.sites = {0, 1, 2, 10, 50};
        c.eta = 1e-3;
        c.omega_min = -3.0;
        c.omega_max = 3.0;
        c.omega_points = 1201;
    } else if (name == "fig4") {
        // Lossless and dissipative DOS at the surface and in the bulk; the
        // dissipative variant uses gamma = 0.5 t_c.
        c.params = ChainParams::coupled_cavity(0.0, 1.0, 0.5, 0.0);
        c.sites = {0};
        c.eta = 1e-3;
        c.omega_min = -3.0;
        c.omega_max = 3.0;
        c.omega_points = 1201;
        c.variants = {"surface_lossless", "surface_lossy", "bulk_lossless", "bulk_lossy"};
    } else if (name == "fig5") {
        c.params = ChainParams::hatano_nelson(0.1, 1.0, 0.9 * pi / 2.0, 3.0, 3.0);
        c.n_sites = 45;
        c.pairs = {{5, 4}};
        c.omega_min = -4.0;
        c.omega_max = 4.0;
        c.omega_points = 400;
        c.variants = {"semi", "dense"};
    } else if (name == "fig6") {
        c.params = ChainParams::hatano_nelson(0.0, 1.0, pi / 2.0, 2.0, 4.0);
        c.omega_min = -4.0;
        c.omega_max = 4.0;
        c.omega_points = 2000;
        c.variants = {"xi", "winding"};
    } else if (name == "fig7") {
        c.params = ChainParams::coupled_cavity(0.1, 1.0, 0.5, 0.0);
        c.n_sites = 15;
        c.compare_oracle = 15;
        c.t_max = 20.0;
        c.dt = 0.05;
        c.sites.clear();
        for (int j = 0; j < 15; ++j) c.sites.push_back(j);
    } else if (name == "fig8") {
        c.params = ChainParams::hatano_nelson(0.0, 1.0, pi / 2.0, 2.0, 1.4);
        c.t_max = 40.0;
        c.dt = 0.05;
        c.sites = {0, 2, 4, 6, 8, 10};
        c.variants = {"gamma2", "gamma1"};
    } else if (name == "fig9") {
        c.params = ChainParams::hatano_nelson(0.0, 1.0, pi / 2.0, 2.0, 1.4);
        c.omega = 0.0;
        c.n_sites = 40;
        c.gamma_min = 0.05;
        c.gamma_max = 4.0;
        c.gamma_points = 80;
        c.pump_min = 0.05;
        c.pump_max = 3.95;
        c.pump_points = 79;
    } else if (name == "fig10") {
        // Sites numbered from the input port, so that the amplified direction is +j.
        c.params = ChainParams::hatano_nelson(0.0, 1.0, pi / 2.0, 4.0, 3.6);
        c.params.mirrored = true;
        c.sites = {0, 5, 10, 20};
        c.omega_min = -3.0;
        c.omega_max = 3.0;
        c.omega_points = 601;
        c.variants = {"gain", "noise"};
    } else {
        throw UsageError("unknown preset '" + name + "'");
    }
    return c;
}

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "fig6",
                                                "fig7", "fig8", "fig9", "fig10"};
    return names;
}

inline bool is_preset(const std::string& s)
{
    const auto& n = preset_names();
    return std::find(n.begin(), n.end(), s) != n.end();
}

// ---------------------------------------------------------------- benchmark

struct BenchRow {
    int n;
    double decimation_seconds;
    double dense_seconds;
    double max_rel_error;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double decimation_exponent = 0.0;
    double dense_exponent = 0.0;
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {
template <class F>
double median_seconds(F&& f, int repetitions, double min_batch_seconds = 2e-3)
{
    using clock = std::chrono::steady_clock;
    // Batch calls so that one timing sample is well above clock resolution.
    int batch = 1;
    for (;;) {
        const auto t0 = clock::now();
        for (int b = 0; b < batch; ++b) f();
        const double s = std::chrono::duration<double>(clock::now() - t0).count();
        if (s >= min_batch_seconds || batch >= (1 << 20)) break;
        batch *= 2;
    }
    std::vector<double> samples;
    for (int r = 0; r < repetitions; ++r) {
        const auto t0 = clock::now();
        for (int b = 0; b < batch; ++b) f();
        samples.push_back(std::chrono::duration<double>(clock::now() - t0).count() / batch);
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    return samples[samples.size() / 2];
}

inline volatile double sink = 0.0;
}  // namespace detail

/// Times the O(N) surface row against dense LU inversion at one complex
/// frequency. Both are checked against each other to 1e-10 before timing.
inline BenchReport run_benchmark(const ChainParams& params, const std::vector<int>& sizes, int repetitions,
                                 cplx omega)
{
    if (repetitions < 1) throw UsageError("repetitions must be >= 1");
    const auto c = effective_couplings(params);
    BenchReport rep;
    for (int n : sizes) {
        const auto d = DynamicalMatrix::homogeneous(c, n);
        const auto row = surface_gf_finite(c, n, omega);
        const auto g = dense_gf(d, omega);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            err = std::max(err, rel_diff(row[static_cast<std::size_t>(j)], g(0, j), 1e-300));
        if (!(err < 1e-10))
            throw NumericalError("benchmark correctness gate failed at N = " + std::to_string(n) +
                                 " (max relative error " + fmt(err) + ")");
        BenchRow r{n, 0.0, 0.0, err};
        r.decimation_seconds = detail::median_seconds(
            [&] { detail::sink = detail::sink + surface_gf_finite(c, n, omega).back().real(); }, repetitions);
        r.dense_seconds =
            detail::median_seconds([&] { detail::sink = detail::sink + dense_gf(d, omega)(0, n - 1).real(); },
                                   repetitions);
        rep.rows.push_back(r);
    }
    std::vector<double> x, yd, yl;
    for (const auto& r : rep.rows) {
        x.push_back(r.n);
        yd.push_back(r.decimation_seconds);
        yl.push_back(r.dense_seconds);
    }
    if (x.size() >= 2) {
        rep.decimation_exponent = loglog_slope(x, yd);
        rep.dense_exponent = loglog_slope(x, yl);
    }
    return rep;
}

// ---------------------------------------------------------------- subcommands

namespace detail {

inline std::vector<double> omega_grid(const RunConfig& c)
{
    auto g = linspace(c.omega_min, c.omega_max, c.omega_points);
    for (double& w : g) w *= c.params.t_c;
    return g;
}

inline std::vector<double> time_grid(const RunConfig& c)
{
    const double tc = c.params.t_c;
    const auto n = static_cast<int>(std::floor(c.t_max / c.dt + 1e-9));
    std::vector<double> t;
    for (int k = 0; k <= n; ++k) t.push_back(k * c.dt / tc);
    return t;
}

inline Table convergence(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    const cplx w = c.omega * tc;
    const cplx lim = eps1_semi_infinite(eff, w);
    Table t{"convergence", {"N", "re_eps1", "im_eps1", "re_limit", "im_limit"}, {}, {}};
    for (int n = 1; n <= c.n_sites; ++n) {
        const cplx e = eps1_closed_form(eff, w, n);
        t.rows.push_back({fmt(n), fmt(e.real() / tc), fmt(e.imag() / tc), fmt(lim.real() / tc), fmt(lim.imag() / tc)});
    }
    const auto corr = correlation_data(solve_surface_gf(eff, w), eff);
    t.meta["re_xi"] = corr.xi_minus.real();
    t.meta["correlation_length"] = 1.0 / std::abs(corr.xi_minus.real());
    return t;
}

inline Table gf(const RunConfig& c, const std::string& method)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    Table t{"gf", {"omega", "j", "l", "re", "im"}, {}, {}};
    t.meta["method"] = method;
    if (method != "semi" && method != "dense" && method != "finite")
        throw UsageError("gf method must be semi, dense or finite");
    std::optional<DynamicalMatrix> d;
    if (method != "semi") {
        for (auto [j, l] : c.pairs)
            if (j >= c.n_sites || l >= c.n_sites) throw UsageError("site pair outside the finite chain");
        d = DynamicalMatrix::homogeneous(eff, c.n_sites);
    }
    int near_branch = 0;
    for (double w : omega_grid(c)) {
        const cplx z(w, c.eta * tc);
        std::vector<cplx> vals;
        if (method == "semi") {
            const auto s = solve_surface_gf(eff, z);
            near_branch += s.near_branch_point ? 1 : 0;
            for (auto [j, l] : c.pairs) vals.push_back(gf_pair(s, eff, j, l));
        } else if (method == "dense") {
            const auto g = dense_gf(*d, z);
            for (auto [j, l] : c.pairs) vals.push_back(g(j, l));
        } else {
            const auto row = surface_gf_finite(eff, c.n_sites, z);
            const auto g = recover_rows(row, eff, z);
            for (auto [j, l] : c.pairs) vals.push_back(g(j, l));
        }
        for (std::size_t k = 0; k < c.pairs.size(); ++k)
            t.rows.push_back({fmt(w / tc), fmt(c.pairs[k].first), fmt(c.pairs[k].second), fmt(vals[k].real() * tc),
                              fmt(vals[k].imag() * tc)});
    }
    t.meta["branch"] = "attracting fixed point (|G00| smallest root)";
    t.meta["near_branch_point_count"] = near_branch;
    return t;
}

inline Table xi(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    Table t{"xi", {"omega", "re_xi", "im_xi", "re_xi_inv"}, {}, {}};
    std::vector<double> ws = omega_grid(c), re, im;
    for (double w : ws) {
        const auto corr = correlation_data(solve_surface_gf(eff, cplx(w, c.eta * tc)), eff);
        re.push_back(corr.xi_minus.real());
        im.push_back(corr.xi_minus.imag());
    }
    im = unwrap_phase(im);
    for (std::size_t k = 0; k < ws.size(); ++k)
        t.rows.push_back({fmt(ws[k] / tc), fmt(re[k]), fmt(im[k]), fmt(1.0 / re[k])});
    t.meta["xi"] = "log(G00 t-), imaginary part unwrapped along the sweep";
    return t;
}

inline Table dos(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    Table t{"dos", {"omega", "site", "dos"}, {}, {}};
    for (double w : omega_grid(c)) {
        const auto s = solve_surface_gf(eff, cplx(w, c.eta * tc));
        for (int j : c.sites) t.rows.push_back({fmt(w / tc), fmt(j), fmt(local_dos(gf_pair(s, eff, j, j)) * tc)});
    }
    return t;
}

inline Table dos_bulk(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    Table t{"dos_bulk", {"omega", "dos"}, {}, {}};
    for (double w : omega_grid(c)) {
        const auto b = bulk_gf(eff, cplx(w, c.eta * tc));
        t.rows.push_back({fmt(w / tc), fmt(local_dos(b.diagonal) * tc)});
    }
    t.meta["construction"] = "two semi-infinite chains joined at one site";
    return t;
}

inline Table winding(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    Table t{"winding", {"omega", "W1", "indicator"}, {}, {}};
    for (double w : omega_grid(c)) {
        std::string wn;
        try {
            wn = fmt(winding_number(eff, w));
        } catch (const GapClosing&) {
            wn = "gap";
        }
        const auto ind = topo_indicator_from_xi(correlation_data(solve_surface_gf(eff, w), eff));
        t.rows.push_back({fmt(w / tc), wn, ind.boundary ? "boundary" : fmt(ind.value)});
    }
    return t;
}

inline Table phases(const RunConfig& c)
{
    const double tc = c.params.t_c;
    auto grid = [&](double a, double b, int n) {
        std::vector<double> v;
        for (int k = 0; k < n; ++k) v.push_back(tc * (n == 1 ? a : a + (b - a) * k / (n - 1)));
        return v;
    };
    const auto pd = phase_diagram(c.params, grid(c.gamma_min, c.gamma_max, c.gamma_points),
                                  grid(c.pump_min, c.pump_max, c.pump_points), c.omega * tc, c.n_sites, c.threads);
    Table t{"phases", {"gamma", "pump", "class"}, {}, {}};
    for (std::size_t g = 0; g < pd.gamma_grid.size(); ++g)
        for (std::size_t p = 0; p < pd.pump_grid.size(); ++p)
            t.rows.push_back({fmt(pd.gamma_grid[g] / tc), fmt(pd.pump_grid[p] / tc), to_string(pd.at(g, p))});
    t.meta["n_sites_stability"] = c.n_sites;
    t.meta["omega"] = c.omega;
    return t;
}

inline Table transient(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    const auto tp = TransientParams::from(eff, c.seed_amp);
    const auto ts = time_grid(c);
    Table t{"transient", {"t", "site", "re", "im", "re_oracle", "im_oracle"}, {}, {}};
    std::optional<Trajectory> oracle;
    if (c.compare_oracle > 0) {
        for (int j : c.sites)
            if (j >= c.compare_oracle) throw UsageError("site outside the oracle chain");
        Eigen::VectorXcd seed = Eigen::VectorXcd::Zero(c.compare_oracle);
        seed(0) = c.seed_amp;
        oracle = propagate(DynamicalMatrix::homogeneous(eff, c.compare_oracle), seed, ts);
        if (oracle->truncated) t.meta["oracle_overflow_time"] = *oracle->overflow_time * tc;
    }
    for (std::size_t k = 0; k < ts.size(); ++k) {
        for (int j : c.sites) {
            const cplx a = coherent_amplitude(tp, j, ts[k]);
            std::string ro = "", io = "";
            if (oracle && k < oracle->t_grid.size()) {
                ro = fmt(oracle->amplitudes(static_cast<Eigen::Index>(k), j).real());
                io = fmt(oracle->amplitudes(static_cast<Eigen::Index>(k), j).imag());
            }
            t.rows.push_back({fmt(ts[k] * tc), fmt(j), fmt(a.real()), fmt(a.imag()), ro, io});
        }
    }
    t.meta["sqrt_alpha"] = {std::sqrt(tp.alpha).real(), std::sqrt(tp.alpha).imag()};
    t.meta["branch"] = "t-^j G00(t)^(j+1) via the reduced Bessel function (no fractional powers)";
    t.meta["tau_amp"] = amplification_time(tp) * tc;
    return t;
}

inline Table gain_table(const RunConfig& c)
{
    const auto eff = effective_couplings(c.params);
    const double tc = c.params.t_c;
    Table t{"gain", {"omega", "site", c.decibels ? "gain_db" : "gain"}, {}, {}};
    for (double w : omega_grid(c)) {
        const auto s = solve_surface_gf(eff, cplx(w, c.eta * tc));
        const auto corr = correlation_data(s, eff);
        for (int j : c.sites) {
            const double g = gain(s, corr, c.params.gamma, j);
            t.rows.push_back({fmt(w / tc), fmt(j), fmt(c.decibels ? gain_db(g) : g)});
        }
    }
    return t;
}

inline Table noise(const RunConfig& c)
{
    const double tc = c.params.t_c;
    Table t{"noise", {"omega", "site", "n_add"}, {}, {}};
    int capped = 0;
    int skipped = 0;
    for (double w : omega_grid(c)) {
        for (int j : c.sites) {
            try {
                const auto r = added_noise(c.params, w, j);
                capped += r.capped ? 1 : 0;
                t.rows.push_back({fmt(w / tc), fmt(j), r.n_add ? fmt(*r.n_add) : "nan"});
            } catch (const NumericalError&) {
                ++skipped;
                t.rows.push_back({fmt(w / tc), fmt(j), "nan"});
            }
        }
    }
    t.meta["tail"] = "row summed to l = j + ceil(8/|Re xi+|), at most j + 20000";
    t.meta["capped_points"] = capped;
    t.meta["divergent_points"] = skipped;
    t.meta["pump_kernel"] = "P on the diagonal, P_nn on the first off-diagonals";
    return t;
}

inline Table bench(const RunConfig& c)
{
    const auto rep = run_benchmark(c.params, c.bench_sizes, c.repetitions, cplx(c.omega, 0.1) * c.params.t_c);
    Table t{"bench", {"N", "decimation_seconds", "dense_seconds", "max_rel_error"}, {}, {}};
    for (const auto& r : rep.rows)
        t.rows.push_back({fmt(r.n), fmt(r.decimation_seconds), fmt(r.dense_seconds), fmt(r.max_rel_error)});
    t.meta["decimation_exponent"] = rep.decimation_exponent;
    t.meta["dense_exponent"] = rep.dense_exponent;
    return t;
}

inline std::vector<Table> run_preset(const RunConfig& c)
{
    const auto& s = c.subcommand;
    auto named = [](Table t, std::string n) {
        t.name = std::move(n);
        return t;
    };
    if (s == "fig2") return {convergence(c)};
    if (s == "fig3") return {dos(c)};
    if (s == "fig4") {
        RunConfig lossless = c;
        lossless.params.gamma = 0.0;
        return {named(dos(lossless), "surface_lossless"), named(dos(c), "surface_lossy"),
                named(dos_bulk(lossless), "bulk_lossless"), named(dos_bulk(c), "bulk_lossy")};
    }
    if (s == "fig5") return {named(gf(c, "semi"), "semi"), named(gf(c, "dense"), "dense")};
    if (s == "fig6") return {xi(c), winding(c)};
    if (s == "fig7") return {transient(c)};
    if (s == "fig8") {
        RunConfig low = c;
        low.params.gamma = 1.0 * c.params.t_c;
        return {named(transient(c), "gamma2"), named(transient(low), "gamma1")};
    }
    if (s == "fig9") return {phases(c)};
    if (s == "fig10") return {gain_table(c), noise(c)};
    throw UsageError("unknown preset '" + s + "'");
}

}  // namespace detail

/// Executes the configured subcommand and returns its tables (no I/O).
inline std::vector<Table> compute(const RunConfig& c)
{
    validate(c);
    const auto& s = c.subcommand;
    if (is_preset(s)) return detail::run_preset(c);
    if (s == "convergence") return {detail::convergence(c)};
    if (s == "gf") return {detail::gf(c, c.gf_method)};
    if (s == "xi") return {detail::xi(c)};
    if (s == "dos") return {detail::dos(c)};
    if (s == "dos-bulk") return {detail::dos_bulk(c)};
    if (s == "winding") return {detail::winding(c)};
    if (s == "phases") return {detail::phases(c)};
    if (s == "transient") return {detail::transient(c)};
    if (s == "gain") return {detail::gain_table(c)};
    if (s == "noise") return {detail::noise(c)};
    if (s == "bench") return {detail::bench(c)};
    throw UsageError("unknown subcommand '" + s + "'");
}

// ---------------------------------------------------------------- output

inline void write_table(std::ostream& os, const Table& t, Format f)
{
    if (f == Format::csv) {
        for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
        os << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
            os << '\n';
        }
        return;
    }
    json rows = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (std::size_t k = 0; k < r.size(); ++k) o[t.header[k]] = r[k];
        rows.push_back(std::move(o));
    }
    os << json{{"name", t.name}, {"columns", t.header}, {"rows", rows}}.dump(1) << '\n';
}

/// Output path for table k of n: the path itself when n = 1, otherwise stem_name.ext.
inline std::filesystem::path table_path(const std::filesystem::path& out, const Table& t, std::size_t n)
{
    if (n == 1) return out;
    auto p = out;
    p.replace_filename(out.stem().string() + "_" + t.name + out.extension().string());
    return p;
}

/// Runs and writes the results. Data files are deterministic; the timestamp
/// lives only in the JSON sidecar next to each data file.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    try {
        const auto tables = compute(c);
        if (c.output_path.empty()) {
            for (const auto& t : tables) {
                if (tables.size() > 1) out << "# " << t.name << '\n';
                write_table(out, t, c.format);
            }
            return exit_ok;
        }
        for (const auto& t : tables) {
            const auto path = table_path(c.output_path, t, tables.size());
            if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
            std::ofstream f(path);
            if (!f) throw UsageError("cannot write " + path.string());
            write_table(f, t, c.format);
            std::ofstream meta(path.string() + ".meta.json");
            if (!meta) throw UsageError("cannot write sidecar for " + path.string());
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            char stamp[32];
            std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            meta << json{{"config", config_to_json(c)}, {"table", t.name}, {"meta", t.meta}, {"created", stamp}}.dump(2)
                 << '\n';
        }
        return exit_ok;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const BesselDomainError& e) {
        err << "numerical error [transient]: " << e.what() << '\n';
        return exit_numerical;
    } catch (const NumericalError& e) {
        err << "numerical error [" << c.subcommand << "]: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "numerical error [" << c.subcommand << "]: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace decim::app
