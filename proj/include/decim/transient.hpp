#pragma once

// Time-domain response of a semi-infinite chain to a coherent seed at site 0.
// Powers of the surface Green's function in the time domain are Bessel
// functions; everything below is evaluated through the reduced function
// n! J_n(x) / (x/2)^n, which depends on alpha only through x^2 = 4 t^2 alpha.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bessel.hpp"
#include "complex_utils.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "semi_infinite.hpp"

namespace decim {

struct TransientParams {
    cplx alpha;             ///< t+ t-
    cplx eps_tilde;
    cplx seed_amplitude = 1.0;
    cplx ratio;             ///< t- / t+
    cplx t_minus;           ///< hopping toward site 0 (fixes the branch of ratio^{j/2} alpha^{j/2})

    static TransientParams from(const EffectiveCouplings& c, cplx seed = 1.0)
    {
        const cplx r = c.t_plus == cplx(0.0) ? cplx(std::numeric_limits<double>::infinity()) : c.t_minus / c.t_plus;
        return {c.alpha(), c.eps_tilde, seed, r, c.t_minus};
    }

    EffectiveCouplings couplings() const
    {
        if (t_minus == cplx(0.0)) throw std::domain_error("t- = 0: t+ not recoverable from alpha");
        return {eps_tilde, alpha / t_minus, t_minus};
    }
};

namespace detail {
/// log of (-i)^m t^{m-1} / (m-1)! * reduced(m, 2 t sqrt(alpha)) * exp(-i t eps~), plus mantissa.
inline ScaledValue surface_power_scaled(const TransientParams& p, int m, double t)
{
    if (t < 0) throw std::invalid_argument("t must be nonnegative");
    if (m < 1) throw std::invalid_argument("power must be >= 1");
    const cplx phase = ipow(cplx(0.0, -1.0), m);
    if (t == 0.0) return {m == 1 ? phase : cplx(0.0), 0.0};
    const cplx x = 2.0 * t * std::sqrt(p.alpha);
    ScaledValue r = bessel_j_reduced(m, x);
    const cplx expo = cplx(0.0, -t) * p.eps_tilde;
    r.log_scale += (m - 1) * std::log(t) - std::lgamma(static_cast<double>(m)) + expo.real();
    r.mantissa *= phase * std::polar(1.0, expo.imag());
    return r;
}
}  // namespace detail

/// G00(t)^{j+1}: the time-domain counterpart of G00(omega)^{j+1}.
inline cplx surface_gf_power_time(const TransientParams& p, int j, double t)
{
    if (j < 0) throw std::invalid_argument("j must be nonnegative");
    return detail::surface_power_scaled(p, j + 1, t).value();
}

/// <a_j(t)> for the seed alpha0 at site 0: i alpha0 t-^j G00(t)^{j+1}.
inline cplx coherent_amplitude(const TransientParams& p, int j, double t)
{
    if (j < 0) throw std::invalid_argument("j must be nonnegative");
    ScaledValue v = detail::surface_power_scaled(p, j + 1, t);
    if (j > 0) {
        if (p.t_minus == cplx(0.0)) return 0.0;
        const cplx lt = std::log(p.t_minus);
        v.log_scale += j * lt.real();
        v.mantissa *= std::polar(1.0, j * lt.imag());
    }
    v.mantissa *= cplx(0.0, 1.0) * p.seed_amplitude;
    return v.value();
}

/// Amplitudes on sites 0..n_sites-1 for every time in t_grid.
inline Trajectory coherent_evolution(const TransientParams& p, int n_sites, const std::vector<double>& t_grid)
{
    if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
    Trajectory tr;
    tr.t_grid = t_grid;
    tr.amplitudes.resize(static_cast<Eigen::Index>(t_grid.size()), n_sites);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        for (int j = 0; j < n_sites; ++j) {
            const cplx v = coherent_amplitude(p, j, t_grid[k]);
            if (!is_finite(v)) {
                tr.truncated = true;
                tr.overflow_time = t_grid[k];
                tr.t_grid.resize(k);
                tr.amplitudes.conservativeResize(static_cast<Eigen::Index>(k), n_sites);
                return tr;
            }
            tr.amplitudes(static_cast<Eigen::Index>(k), j) = v;
        }
    }
    return tr;
}

/// Large-t form of coherent_amplitude from the Bessel envelope (pi x / 2)^{-1/2}
/// with the oscillation dropped: decays as t^{-3/2} times |exp(-i eps~ t)|.
inline cplx long_time_asymptote(const TransientParams& p, int j, double t)
{
    if (j < 0) throw std::invalid_argument("j must be nonnegative");
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    const cplx sa = std::sqrt(p.alpha);
    if (sa == cplx(0.0)) throw std::domain_error("alpha = 0 has no Bessel asymptote");
    const int m = j + 1;
    cplx dir = 1.0;
    if (j > 0) dir = std::exp(static_cast<double>(j) * (std::log(p.t_minus) - std::log(sa)));
    return cplx(0.0, 1.0) * p.seed_amplitude * std::exp(cplx(0.0, -t) * p.eps_tilde) * ipow(cplx(0.0, -1.0), m) *
           static_cast<double>(m) * dir / (std::sqrt(std::numbers::pi) * std::pow(t * sa, 1.5));
}

/// Ratio of exact to asymptotic amplitude, rms-averaged over one oscillation
/// period pi / (2|sqrt alpha|) starting at t0 and scaled by sqrt(2) so that a
/// pure cosine envelope gives exactly 1.
inline double asymptote_ratio(const TransientParams& p, int j, double t0, int samples = 256)
{
    const double period = std::numbers::pi / (2.0 * std::abs(std::sqrt(p.alpha)));
    double acc = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = t0 + period * (k + 0.5) / samples;
        acc += std::norm(coherent_amplitude(p, j, t) / long_time_asymptote(p, j, t));
    }
    return std::sqrt(2.0 * acc / samples);
}

/// tau_amp = pi / |4 sqrt(alpha)|.
inline double amplification_time(const TransientParams& p)
{
    if (p.alpha == cplx(0.0)) throw std::domain_error("alpha = 0");
    return std::numbers::pi / std::abs(4.0 * std::sqrt(p.alpha));
}

struct AmplificationTiming {
    double estimate;            ///< 2 tau_amp: expected delay between sites j and j+2
    double measured;            ///< mean delay of matched amplitude minima
    std::vector<double> delays; ///< individual matched delays
};

/// Measures the delay between sites j and j+2 by matching the k-th minimum of
/// |a_j(t)| with the k-th minimum of |a_{j+2}(t)|. The first `skip` minima are
/// discarded since the zeros of J_{j+1} and J_{j+3} only become evenly spaced
/// for large argument.
inline AmplificationTiming measure_amplification_time(const TransientParams& p, const std::vector<int>& sites,
                                                      double t_max, double dt, int skip = 3)
{
    if (!(dt > 0) || !(t_max > dt)) throw std::invalid_argument("need 0 < dt < t_max");
    const auto n_t = static_cast<std::size_t>(std::floor(t_max / dt)) + 1;
    auto minima = [&](int j) {
        std::vector<double> mags(n_t);
        for (std::size_t k = 0; k < n_t; ++k) mags[k] = std::abs(coherent_amplitude(p, j, k * dt));
        std::vector<double> out;
        for (std::size_t k = 1; k + 1 < n_t; ++k) {
            if (mags[k] < mags[k - 1] && mags[k] <= mags[k + 1]) {
                // parabolic refinement of the minimum location
                const double a = mags[k - 1], b = mags[k], c = mags[k + 1];
                const double den = a - 2.0 * b + c;
                const double shift = den > 0 ? 0.5 * (a - c) / den : 0.0;
                out.push_back((k + shift) * dt);
            }
        }
        return out;
    };
    AmplificationTiming r{2.0 * amplification_time(p), 0.0, {}};
    for (int j : sites) {
        const auto a = minima(j), b = minima(j + 2);
        const std::size_t n = std::min(a.size(), b.size());
        for (std::size_t k = static_cast<std::size_t>(skip); k < n; ++k) r.delays.push_back(b[k] - a[k]);
    }
    if (r.delays.empty()) throw std::runtime_error("no amplitude minima found in the time window");
    for (double d : r.delays) r.measured += d;
    r.measured /= static_cast<double>(r.delays.size());
    return r;
}

enum class FinalValueStatus { converged, divergent, inconclusive };

struct FinalValueResult {
    FinalValueStatus status;
    cplx value;                  ///< limit when converged
    double growth_rate;          ///< largest real part among the singularities of the transform
    std::vector<cplx> iterates;  ///< s_k i alpha0 G_{j,0}(i s_k)
};

/// Final-value check lim_{s->0+} s L[a_j](s) with L[a_j](s) = i alpha0 G_{j,0}(omega = i s).
///
/// The transform is analytic for Re s larger than the real part of its branch
/// points s = -i(eps~ +- 2 sqrt(alpha)); if that exceeds `tol` the time signal grows
/// and the limit does not exist. Otherwise s_k = 0.1 * 2^{-k}, k = 0..40, and the
/// limit is accepted when the last three iterates agree to 1e-8.
inline FinalValueResult steady_state_final_value(const TransientParams& p, int j, double tol = 1e-9)
{
    if (j < 0) throw std::invalid_argument("j must be nonnegative");
    FinalValueResult r{FinalValueStatus::inconclusive, 0.0, 0.0, {}};
    const cplx sa = std::sqrt(p.alpha);
    r.growth_rate = std::max((p.eps_tilde + 2.0 * sa).imag(), (p.eps_tilde - 2.0 * sa).imag());
    if (r.growth_rate > tol) {
        r.status = FinalValueStatus::divergent;
        return r;
    }
    if (r.growth_rate > -tol) return r;

    const EffectiveCouplings c{p.eps_tilde, p.t_minus == cplx(0.0) ? cplx(0.0) : p.alpha / p.t_minus, p.t_minus};
    for (int k = 0; k <= 40; ++k) {
        const double s = 0.1 * std::ldexp(1.0, -k);
        const auto g = solve_surface_gf(c, cplx(0.0, s));
        const cplx gj0 = ipow(c.t_minus, j) * ipow(g.value, j + 1);
        r.iterates.push_back(s * cplx(0.0, 1.0) * p.seed_amplitude * gj0);
    }
    const auto n = r.iterates.size();
    const bool cauchy = std::abs(r.iterates[n - 1] - r.iterates[n - 2]) < 1e-8 &&
                        std::abs(r.iterates[n - 2] - r.iterates[n - 3]) < 1e-8;
    if (cauchy) {
        r.status = FinalValueStatus::converged;
        r.value = r.iterates.back();
    } else if (!is_finite(r.iterates.back()) || std::abs(r.iterates.back()) > 1e8) {
        r.status = FinalValueStatus::divergent;
    }
    return r;
}

}  // namespace decim
