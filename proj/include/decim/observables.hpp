#pragma once

// Quantities derived from the Green's functions: local density of states,
// the periodic bulk GF, point-gap winding, the xi indicator, stability phase
// diagrams, directional gain and added noise.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "complex_utils.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "semi_infinite.hpp"

namespace decim {

/// D_j = -Im G_jj / pi; G must be a retarded value.
inline double local_dos(cplx g_jj)
{
    const double d = -g_jj.imag() / std::numbers::pi;
    if (d < -1e-8) throw BranchError("negative density of states: G is not on the retarded branch");
    return d;
}

/// Bulk G_{j,j+d} of an infinite Hermitian chain (on-site omega_a, hopping t_c).
/// Real omega gives the retarded limit; complex omega the analytic value.
inline cplx bulk_gf_pbc(cplx omega, double t_c, double omega_a, int d)
{
    if (!(t_c > 0)) throw std::invalid_argument("t_c must be positive");
    const int ad = std::abs(d);
    const cplx w = omega - omega_a;
    if (w.imag() == 0.0) {
        const double x = w.real() / (2.0 * t_c);
        if (std::abs(x) == 1.0) return bulk_gf_pbc(omega + cplx(0.0, 1e-10 * t_c), t_c, omega_a, d);
        if (std::abs(x) < 1.0) {
            const double s = std::sqrt(1.0 - x * x);
            return cplx(0.0, -1.0) / (2.0 * t_c * s) * ipow(cplx(x, -s), ad);
        }
        const double sg = x > 0 ? 1.0 : -1.0;
        const double s = std::sqrt(x * x - 1.0);
        return sg / (2.0 * t_c * s) * std::pow(x - sg * s, ad);
    }
    // Residue at the pole of the Brillouin-zone integrand inside the unit circle.
    const cplx x = w / (2.0 * t_c);
    const cplx r = std::sqrt(x * x - 1.0);
    cplx z_in = x - r, z_out = x + r;
    if (std::abs(z_in) > std::abs(z_out)) std::swap(z_in, z_out);
    return ipow(z_in, ad) / (t_c * (z_out - z_in));
}

namespace detail {
/// Roots of a z^2 + b z + c without cancellation; a = 0 returns one root and infinity.
inline std::pair<cplx, cplx> quadratic_roots(cplx a, cplx b, cplx c)
{
    const double inf = std::numeric_limits<double>::infinity();
    if (a == cplx(0.0)) {
        if (b == cplx(0.0)) throw std::domain_error("degenerate quadratic");
        return {-c / b, cplx(inf, 0.0)};
    }
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx q = (std::conj(b) * disc).real() >= 0 ? -(b + disc) / 2.0 : -(b - disc) / 2.0;
    if (q == cplx(0.0)) return {0.0, 0.0};
    return {q / a, c / q};
}
}  // namespace detail

/// Winding of omega - D(k) around the origin, from the roots z of
/// t- z^2 - (omega - eps~) z + t+ = 0: W = 1 - #{|z| < 1}.
inline int winding_number(const EffectiveCouplings& c, double omega, double gap_tol = 1e-6)
{
    const cplx mu = omega - c.eps_tilde;
    if (c.t_minus == cplx(0.0) && mu == cplx(0.0)) throw GapClosing("gap closes at omega = " + std::to_string(omega));
    const auto [z1, z2] = detail::quadratic_roots(c.t_minus, -mu, c.t_plus);
    int inside = 0;
    for (cplx z : {z1, z2}) {
        const double r = std::abs(z);
        if (std::abs(r - 1.0) < gap_tol) throw GapClosing("gap closes at omega = " + std::to_string(omega));
        if (r < 1.0) ++inside;
    }
    return 1 - inside;
}

inline int winding_number(const ChainParams& p, double omega) { return winding_number(effective_couplings(p), omega); }

struct TopoIndicator {
    int value = 0;        ///< Theta(Re xi) of the amplifying direction
    bool boundary = false;
    double re_xi = 0.0;   ///< max(Re xi+, Re xi-)
};

/// 1 iff correlations grow in one of the two directions.
inline TopoIndicator topo_indicator_from_xi(const CorrelationData& corr, double tol = 1e-8)
{
    TopoIndicator t;
    t.re_xi = std::max(corr.xi_plus.real(), corr.xi_minus.real());
    t.boundary = std::abs(t.re_xi) < tol;
    t.value = t.re_xi > 0 ? 1 : 0;
    return t;
}

enum class Phase { trivial_stable, topological_stable, topological_unstable, trivial_unstable, boundary };

inline const char* to_string(Phase p)
{
    switch (p) {
    case Phase::trivial_stable: return "trivial_stable";
    case Phase::topological_stable: return "topological_stable";
    case Phase::topological_unstable: return "topological_unstable";
    case Phase::trivial_unstable: return "trivial_unstable";
    case Phase::boundary: return "boundary";
    }
    return "?";
}

struct PhaseDiagram {
    std::vector<double> gamma_grid;
    std::vector<double> pump_grid;
    std::vector<Phase> classification;  // row-major [gamma][pump]

    Phase at(std::size_t g, std::size_t p) const { return classification.at(g * pump_grid.size() + p); }
};

/// Classification of one parameter point at frequency omega on an N-site chain.
inline Phase classify_point(const ChainParams& params, double omega, int n_sites)
{
    const auto c = effective_couplings(params);
    const auto s = solve_surface_gf(c, omega);
    const auto ind = topo_indicator_from_xi(correlation_data(s, c));
    if (ind.boundary) return Phase::boundary;
    const bool stable = stability_report(DynamicalMatrix::homogeneous(c, n_sites)).stable;
    if (ind.value == 1) return stable ? Phase::topological_stable : Phase::topological_unstable;
    return stable ? Phase::trivial_stable : Phase::trivial_unstable;
}

/// Sweeps (gamma, P) keeping the other fields of `base`. If `base` carries
/// non-local gain, its ratio pump_nn / pump is preserved (Hatano-Nelson: 1/2).
inline PhaseDiagram phase_diagram(const ChainParams& base, const std::vector<double>& gamma_grid,
                                  const std::vector<double>& pump_grid, double omega, int n_sites,
                                  unsigned threads = 1)
{
    if (gamma_grid.empty() || pump_grid.empty()) throw std::invalid_argument("grids must be nonempty");
    const double nn_ratio = base.pump > 0 ? base.pump_nn / base.pump : 0.5;
    PhaseDiagram pd{gamma_grid, pump_grid, std::vector<Phase>(gamma_grid.size() * pump_grid.size())};
    auto cell = [&](std::size_t idx) {
        ChainParams p = base;
        p.gamma = gamma_grid[idx / pump_grid.size()];
        p.pump = pump_grid[idx % pump_grid.size()];
        p.pump_nn = nn_ratio * p.pump;
        try {
            pd.classification[idx] = classify_point(p, omega, n_sites);
        } catch (const GapClosing&) {
            pd.classification[idx] = Phase::boundary;
        }
    };
    const std::size_t total = pd.classification.size();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
    if (threads == 1) {
        for (std::size_t i = 0; i < total; ++i) cell(i);
        return pd;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < total; i += threads) cell(i);
        });
    pool.clear();
    return pd;
}

/// Power gain gamma^2 |G_{j,0}|^2 for a drive at site 0 read out at site j.
inline double gain(const SurfaceGF& surface, const CorrelationData& corr, double gamma, int j)
{
    if (j < 0) throw std::invalid_argument("j must be nonnegative");
    return gamma * gamma * std::norm(surface.value) * std::exp(2.0 * j * corr.xi_minus.real());
}

inline double gain_db(double g) { return 10.0 * std::log10(g); }

struct NoiseReport {
    double omega = 0.0;
    int site = 0;
    double gain = 0.0;
    double n_amp = 0.0;
    std::optional<double> n_add;  ///< unset when gain = 0
    int row_length = 0;           ///< number of G_{j,l} terms summed
    bool capped = false;          ///< truncation hit the hard limit before the tail bound
};

/// (gamma/2) sum_{l,l'} conj(G_{j,l}) G_{j,l'} P_{l,l'} with a tridiagonal pump
/// kernel (P on the diagonal, P_nn next to it).
inline double noise_quadratic_form(const std::vector<cplx>& row, double pump, double pump_nn, double gamma)
{
    double diag = 0.0, off = 0.0;
    for (std::size_t l = 0; l < row.size(); ++l) {
        diag += std::norm(row[l]);
        if (l + 1 < row.size()) off += 2.0 * (std::conj(row[l]) * row[l + 1]).real();
    }
    const double n_amp = 0.5 * gamma * (pump * diag + pump_nn * off);
    if (n_amp < -1e-12 * 0.5 * gamma * pump * diag) throw NumericalError("negative amplifier noise");
    return std::max(n_amp, 0.0);
}

inline NoiseReport added_noise(const std::vector<cplx>& row, int site, double omega, double pump, double pump_nn,
                               double gamma, double gain_value)
{
    NoiseReport r;
    r.omega = omega;
    r.site = site;
    r.gain = gain_value;
    r.n_amp = noise_quadratic_form(row, pump, pump_nn, gamma);
    r.row_length = static_cast<int>(row.size());
    if (gain_value > 0) r.n_add = r.n_amp / gain_value;
    return r;
}

/// Added noise at site j of the semi-infinite chain. The row G_{j,l} is summed up
/// to l = j + ceil(8 / |Re xi+|), where the neglected tail is below e^{-16} of the
/// l = j term, or j + max_tail when that is smaller.
inline NoiseReport added_noise(const ChainParams& params, double omega, int j, int max_tail = 20000)
{
    if (j < 0) throw std::invalid_argument("j must be nonnegative");
    const auto c = effective_couplings(params);
    const auto s = solve_surface_gf(c, omega);
    const auto corr = correlation_data(s, c);
    if (corr.xi_plus.real() >= 0) throw NumericalError("noise sum diverges: Re xi+ >= 0");
    const double need = std::ceil(8.0 / std::abs(corr.xi_plus.real()));
    const bool capped = need > max_tail;
    const int tail = capped ? max_tail : static_cast<int>(need);
    std::vector<cplx> row(static_cast<std::size_t>(j + tail + 1));
    for (int l = 0; l <= j + tail; ++l) row[static_cast<std::size_t>(l)] = gf_pair(s, c, j, l);
    auto r = added_noise(row, j, omega, params.pump, params.pump_nn, params.gamma,
                         gain(s, corr, params.gamma, j));
    r.capped = capped;
    return r;
}

}  // namespace decim
