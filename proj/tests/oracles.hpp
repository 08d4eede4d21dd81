#pragma once

// Independent reference computations used only by the tests. None of these
// reuse the code paths they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <decim/model.hpp>

namespace oracle {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

/// J_n(z) by the ascending series in extended precision.
inline cplx bessel_series_ld(int n, cplx z)
{
    const lcplx zz(z.real(), z.imag());
    const lcplx q = -zz * zz / 4.0L;
    lcplx term = 1.0L;
    for (int k = 1; k <= n; ++k) term *= zz / (2.0L * k);
    lcplx sum = term;
    for (int k = 1; k < 4000; ++k) {
        term *= q / (static_cast<long double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) && k > 5) break;
    }
    return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

/// Trapezoid rule over the Brillouin zone: (1/2pi) int dk e^{ikd} / (omega - omega_a - 2 t_c cos k).
/// Exponentially convergent for omega off the band.
inline cplx bulk_gf_quadrature(cplx omega, double t_c, double omega_a, int d, int points = 20000)
{
    cplx acc = 0.0;
    for (int k = 0; k < points; ++k) {
        const double kk = 2.0 * std::numbers::pi * k / points;
        acc += std::polar(1.0, kk * d) / (omega - omega_a - 2.0 * t_c * std::cos(kk));
    }
    return acc / static_cast<double>(points);
}

/// Winding of omega - D(k), D(k) = eps~ + t+ e^{ik} + t- e^{-ik}, by accumulating phase increments.
inline int winding_quadrature(const decim::EffectiveCouplings& c, double omega, int points = 20000)
{
    auto f = [&](double k) {
        return omega - (c.eps_tilde + c.t_plus * std::polar(1.0, k) + c.t_minus * std::polar(1.0, -k));
    };
    double total = 0.0;
    cplx prev = f(0.0);
    for (int k = 1; k <= points; ++k) {
        const cplx cur = f(2.0 * std::numbers::pi * k / points);
        total += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Surface GF of a semi-infinite chain as the limit of an N-site chain, by the
/// continued fraction g_{k} = 1 / (omega - eps~ - alpha g_{k+1}) started deep inside.
inline cplx surface_gf_continued_fraction(const decim::EffectiveCouplings& c, cplx omega, int depth)
{
    cplx g = 0.0;
    for (int k = 0; k < depth; ++k) g = 1.0 / (omega - c.eps_tilde - c.alpha() * g);
    return g;
}

/// Random Hatano-Nelson-type parameters with a stable finite chain (net loss dominates).
inline decim::ChainParams random_stable_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    decim::ChainParams p;
    p.epsilon = -1.0 + 2.0 * u(rng);
    p.t_c = 0.3 + 1.2 * u(rng);
    p.phi = 2.0 * std::numbers::pi * u(rng);
    p.pump = 2.0 * u(rng);
    p.gamma = p.pump + 0.05 + 2.0 * u(rng);
    p.pump_nn = 0.5 * p.pump * u(rng);
    p.gamma_nn = 0.5 * u(rng);
    return p;
}

}  // namespace oracle
