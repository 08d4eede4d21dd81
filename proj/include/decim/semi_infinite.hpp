#pragma once

// Semi-infinite chain via the Dyson fixed point for the surface Green's function,
// G00 = g00 + g00 t+ G00 t- G00, and the two-point functions built from it.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "complex_utils.hpp"
#include "errors.hpp"
#include "finite_chain.hpp"
#include "model.hpp"

namespace decim {

enum class BranchTag { physical, alternate };

struct SurfaceGF {
    cplx omega;
    cplx value;
    double residual = 0.0;
    BranchTag branch_tag = BranchTag::physical;
    /// (|y_big| - |y_small|) / |y_big|; zero on the branch cut where both roots tie.
    double branch_margin = 1.0;
    bool near_branch_point = false;
};

namespace detail {
inline double fixed_point_residual(const EffectiveCouplings& c, cplx omega, cplx g00)
{
    const cplx z = omega - c.eps_tilde;
    if (z == cplx(0.0)) return std::abs(c.alpha() * g00 * g00 + 1.0);
    const cplx bare = 1.0 / z;
    return std::abs(g00 - bare - bare * c.alpha() * g00 * g00);
}
}  // namespace detail

/// Physical surface Green's function: the root of t+ t- G^2 - (omega - eps~) G + 1 = 0
/// with the smaller modulus (the attracting fixed point, decaying as 1/omega).
/// `ambiguity` sets the branch-margin threshold that raises near_branch_point.
inline SurfaceGF solve_surface_gf(const EffectiveCouplings& c, cplx omega, double ambiguity = 1e-6)
{
    SurfaceGF s;
    s.omega = omega;
    const cplx a = c.alpha();
    const cplx z = omega - c.eps_tilde;
    if (a == cplx(0.0)) {
        if (z == cplx(0.0)) throw SingularResolvent(omega);
        s.value = 1.0 / z;
        return s;
    }
    const auto r = fixed_point_roots(c, omega);
    cplx g = 1.0 / r.y_big;
    s.branch_margin = (std::abs(r.y_big) - std::abs(r.y_small)) / std::abs(r.y_big);
    s.near_branch_point = s.branch_margin < ambiguity;
    if (s.near_branch_point && r.y_small != cplx(0.0)) {
        // On the cut both roots have equal modulus; take the limit from omega + i0.
        const double h = 1e-7 * (std::abs(z) + std::sqrt(std::abs(a)));
        const auto up = fixed_point_roots(c, omega + cplx(0.0, h));
        const cplx ref = 1.0 / up.y_big, other = 1.0 / r.y_small;
        if (std::abs(other - ref) < std::abs(g - ref)) g = other;
    }
    // One Newton polish on F(G) = a G^2 - z G + 1.
    const cplx dF = 2.0 * a * g - z;
    if (dF != cplx(0.0)) g -= (a * g * g - z * g + 1.0) / dF;
    s.value = g;
    s.residual = detail::fixed_point_residual(c, omega, g);
    return s;
}

/// The other root of the fixed-point quadratic (never the physical one off the branch cut).
inline SurfaceGF solve_surface_gf_alternate(const EffectiveCouplings& c, cplx omega)
{
    const cplx a = c.alpha();
    if (a == cplx(0.0)) throw std::domain_error("t+ t- = 0 has a single fixed point");
    const auto r = fixed_point_roots(c, omega);
    if (r.y_small == cplx(0.0)) throw SingularResolvent(omega);
    SurfaceGF s;
    s.omega = omega;
    s.value = 1.0 / r.y_small;
    s.residual = detail::fixed_point_residual(c, omega, s.value);
    s.branch_tag = BranchTag::alternate;
    s.branch_margin = (std::abs(r.y_big) - std::abs(r.y_small)) / std::abs(r.y_big);
    return s;
}

/// Physical surface GF along a real frequency sweep at omega + i eta.
inline std::vector<SurfaceGF> surface_gf_sweep(const EffectiveCouplings& c, const std::vector<double>& omegas,
                                               double eta)
{
    std::vector<SurfaceGF> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back(solve_surface_gf(c, cplx(w, eta)));
    return out;
}

/// Directional logarithms and rho = G00^2 t+ t-.
struct CorrelationData {
    cplx xi_plus;   ///< log(G00 t+): growth of G_{j,l} with l - j > 0
    cplx xi_minus;  ///< log(G00 t-): growth of G_{j,l} with j - l > 0
    cplx rho;
};

inline CorrelationData correlation_data(const SurfaceGF& s, const EffectiveCouplings& c)
{
    if (s.value == cplx(0.0)) throw std::domain_error("G00 = 0");
    return {std::log(s.value * c.t_plus), std::log(s.value * c.t_minus), s.value * s.value * c.alpha()};
}

/// Xi_m = sum_{k=1}^{m} rho^k, the surface correction at distance m from the edge.
inline cplx surface_amplitude(cplx rho, int m)
{
    if (m <= 0) return 0.0;
    if (std::abs(rho - 1.0) < 1e-8) {
        const double mm = m;
        return mm + mm * (mm + 1.0) / 2.0 * (rho - 1.0);
    }
    return rho * (ipow(rho, m) - 1.0) / (rho - 1.0);
}

/// G_{j,l} of the semi-infinite chain in factored form,
/// [1 + Xi_{min(j,l)}] (G00 t_{sgn(l-j)})^{|l-j|} G00.
inline cplx gf_pair(const SurfaceGF& s, const EffectiveCouplings& c, int j, int l)
{
    if (j < 0 || l < 0) throw std::out_of_range("site indices must be nonnegative");
    const cplx g = s.value;
    const cplx rho = g * g * c.alpha();
    const int lo = std::min(j, l);
    const cplx hop = l >= j ? g * c.t_plus : g * c.t_minus;
    return (1.0 + surface_amplitude(rho, lo)) * ipow(hop, std::abs(l - j)) * g;
}

/// Term-by-term evaluation of the two-point sum (reference for gf_pair).
inline cplx gf_pair_sum(const SurfaceGF& s, const EffectiveCouplings& c, int j, int l)
{
    if (j < 0 || l < 0) throw std::out_of_range("site indices must be nonnegative");
    const cplx g = s.value;
    const cplx gp = g * c.t_plus, gm = g * c.t_minus;
    cplx sum = ipow(l >= j ? gp : gm, std::abs(l - j)) * g;
    for (int a = 0; a < std::min(j, l); ++a) sum += ipow(gm, j - a) * ipow(gp, l - a) * g;
    return sum;
}

/// log(G00 t-) from the closed form
/// 1/2 log(t-/t+) + log[a - a sqrt(1 - a^-2)], a = (omega - eps~) / (2 sqrt(t+ t-)).
/// Equal to correlation_data().xi_minus modulo i*pi.
inline cplx xi_decay_formula(const EffectiveCouplings& c, double omega)
{
    const cplx alpha = c.alpha();
    if (alpha == cplx(0.0)) throw std::domain_error("xi_decay_formula needs t+ t- != 0");
    const cplx a = (omega - c.eps_tilde) / (2.0 * std::sqrt(alpha));
    const cplx head = 0.5 * std::log(c.t_minus / c.t_plus);
    if (a == cplx(0.0)) {
        // a - a sqrt(1 - a^-2) -> -sqrt(-1) = -i  (principal branch limit)
        return head + std::log(cplx(0.0, -1.0));
    }
    return head + std::log(a - a * std::sqrt(1.0 - 1.0 / (a * a)));
}

/// Bulk two-point function of an infinite chain obtained by joining two semi-infinite halves at site 0.
struct BulkGF {
    cplx diagonal;    ///< G_{j,j}
    cplx step_plus;   ///< G_{j,j+d} = diagonal * step_plus^d
    cplx step_minus;  ///< G_{j+d,j} = diagonal * step_minus^d

    cplx operator()(int j, int l) const
    {
        return l >= j ? diagonal * ipow(step_plus, l - j) : diagonal * ipow(step_minus, j - l);
    }
};

/// Dyson gluing: site 0 dressed by the left half (sites < 0, surface GF `left`)
/// and the right half (sites > 0, surface GF `right`).
inline BulkGF glue_chains(const SurfaceGF& left, const SurfaceGF& right, const EffectiveCouplings& c)
{
    if (left.omega != right.omega) throw std::invalid_argument("surfaces evaluated at different omega");
    const cplx self = c.t_plus * right.value * c.t_minus + c.t_minus * left.value * c.t_plus;
    const cplx den = left.omega - c.eps_tilde - self;
    if (den == cplx(0.0)) throw SingularResolvent(left.omega);
    return {1.0 / den, right.value * c.t_plus, right.value * c.t_minus};
}

inline BulkGF bulk_gf(const EffectiveCouplings& c, cplx omega)
{
    const auto right = solve_surface_gf(c, omega);
    const auto left = solve_surface_gf(c.mirrored(), omega);
    return glue_chains(left, right, c);
}

}  // namespace decim
