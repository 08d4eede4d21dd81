#pragma once

// Real-space decimation of a finite chain, starting from the site next to the
// boundary. After n eliminations site 0 couples to the renormalized site
// n+1 only; N-1 eliminations leave site 0 alone and give the surface row
// G_{0,j} = delta0_j / (omega - eps0).

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "complex_utils.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace decim {

/// Renormalized coefficients after n decimations.
struct DecimationState {
    cplx eps1;                  ///< on-site energy of the site adjacent to 0
    cplx eps0;                  ///< on-site energy of site 0
    cplx tp;                    ///< hopping 0 -> adjacent site
    cplx tm;                    ///< hopping adjacent site -> 0
    std::vector<cplx> delta0;   ///< source term of site 0, indexed by j
    std::vector<cplx> delta1;   ///< source term of the adjacent site
    int n = 0;
};

inline DecimationState initial_state(const EffectiveCouplings& c, int n_sites)
{
    if (n_sites < 2) throw std::invalid_argument("decimation state needs at least two sites");
    DecimationState s{c.eps_tilde, c.eps_tilde, c.t_plus, c.t_minus,
                      std::vector<cplx>(static_cast<std::size_t>(n_sites)),
                      std::vector<cplx>(static_cast<std::size_t>(n_sites)), 0};
    s.delta0[0] = 1.0;
    s.delta1[1] = 1.0;
    return s;
}

/// One elimination of the site adjacent to 0. `next_onsite` is eps~ of the
/// site that becomes adjacent (original site n+2); homogeneous chains pass eps~.
inline DecimationState decimate_step(const DecimationState& s, cplx omega, const EffectiveCouplings& c,
                                     cplx next_onsite)
{
    const cplx den = omega - s.eps1;
    if (den == cplx(0.0)) throw DecimationPole(s.n, omega);
    const cplx inv = 1.0 / den;

    DecimationState out;
    out.n = s.n + 1;
    out.eps1 = next_onsite + c.t_minus * c.t_plus * inv;
    out.eps0 = s.eps0 + s.tp * s.tm * inv;
    out.tp = s.tp * c.t_plus * inv;
    out.tm = c.t_minus * s.tm * inv;

    const std::size_t len = s.delta0.size();
    const std::size_t next = static_cast<std::size_t>(s.n) + 2;
    out.delta0.resize(len);
    out.delta1.resize(len);
    for (std::size_t j = 0; j < len; ++j) {
        out.delta0[j] = s.delta0[j] + s.tp * inv * s.delta1[j];
        out.delta1[j] = (j == next ? 1.0 : 0.0) + c.t_minus * inv * s.delta1[j];
    }
    return out;
}

inline DecimationState decimate_step(const DecimationState& s, cplx omega, const EffectiveCouplings& c)
{
    return decimate_step(s, omega, c, c.eps_tilde);
}

/// eps1 after n decimations of the semi-infinite recurrence (direct iteration).
inline cplx eps1_iterated(const EffectiveCouplings& c, cplx omega, int n)
{
    const cplx a = c.alpha();
    cplx e = c.eps_tilde;
    for (int k = 0; k < n; ++k) {
        const cplx den = omega - e;
        if (den == cplx(0.0)) throw DecimationPole(k, omega);
        e = c.eps_tilde + a / den;
    }
    return e;
}

struct LambdaPair {
    cplx lambda_plus;
    cplx lambda_minus;
};

/// lambda_± = (omega - eps~ ± sqrt((omega - eps~)^2 - 4 t+ t-)) / (t+ t-).
inline LambdaPair lambdas(const EffectiveCouplings& c, cplx omega)
{
    const cplx a = c.alpha();
    if (a == cplx(0.0)) throw std::domain_error("lambda roots need t+ t- != 0");
    const cplx z = omega - c.eps_tilde;
    const cplx d = std::sqrt(z * z - 4.0 * a);
    return {(z + d) / a, (z - d) / a};
}

/// Closed form of eps1 after n decimations (homogeneous chain).
///
/// Evaluated as (eps~ + omega)/2 - (D/2) coth((n+1) atanh(D/z)), with
/// z = omega - eps~ and D^2 = z^2 - 4 t+ t-; algebraically identical to the
/// lambda^n ratio but free of overflow, and even in D so the root branch is
/// irrelevant. Near lambda_+ = lambda_- the coth is replaced by its series.
inline cplx eps1_closed_form(const EffectiveCouplings& c, cplx omega, int n)
{
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    const cplx a = c.alpha();
    const cplx z = omega - c.eps_tilde;
    if (a == cplx(0.0)) return c.eps_tilde;
    if (z == cplx(0.0)) {
        // Continued fraction alternates between eps~ and infinity.
        if (n % 2 == 0) return c.eps_tilde;
        throw DecimationPole(n - 1, omega);
    }
    const cplx d = std::sqrt(z * z - 4.0 * a);
    const double m = n + 1.0;
    const cplx mid = (c.eps_tilde + omega) / 2.0;
    // |lambda+ - lambda-| / |lambda+| = 2|D| / |z + D|
    const bool degenerate = 2.0 * std::abs(d) < 1e-8 * std::abs(z + d);
    if (degenerate) {
        // (D/2) coth(m D / z + O(D^3)) = z/(2m) * (1 + (m D / z)^2 / 3)
        const cplx x = m * d / z;
        return mid - z / (2.0 * m) * (1.0 + x * x / 3.0);
    }
    const cplx w = m * std::atanh(d / z);
    return mid - (d / 2.0) / std::tanh(w);
}

/// The two roots y of y^2 - (omega - eps~) y + t+ t- = 0, with |y_big| >= |y_small|.
/// y = omega - eps1 at the fixed points of the semi-infinite continued fraction.
struct FixedPointRoots {
    cplx y_big;
    cplx y_small;
};

inline FixedPointRoots fixed_point_roots(const EffectiveCouplings& c, cplx omega)
{
    const cplx a = c.alpha();
    const cplx z = omega - c.eps_tilde;
    cplx d = std::sqrt(z * z - 4.0 * a);
    // Orient the root so z and d do not cancel.
    if ((std::conj(z) * d).real() < 0.0) d = -d;
    const cplx big = (z + d) / 2.0;
    if (big == cplx(0.0)) return {big, big};  // z = 0 and t+ t- = 0
    return {big, a / big};
}

/// Semi-infinite limit of eps1: the attracting fixed point, which also decays
/// to eps~ as |omega| -> infinity.
inline cplx eps1_semi_infinite(const EffectiveCouplings& c, cplx omega)
{
    const auto r = fixed_point_roots(c, omega);
    if (r.y_big == cplx(0.0)) return c.eps_tilde;
    return c.eps_tilde + r.y_small;
}

namespace detail {

/// Surface row of a chain with arbitrary on-site energies and uniform hoppings, in O(N).
inline std::vector<cplx> surface_row(std::span<const cplx> onsite, cplx t_plus, cplx t_minus, cplx omega)
{
    const std::size_t n_sites = onsite.size();
    if (n_sites == 0) throw std::invalid_argument("N must be >= 1");
    std::vector<cplx> row(n_sites);
    if (n_sites == 1) {
        const cplx den = omega - onsite[0];
        if (den == cplx(0.0)) throw DecimationPole(0, omega);
        row[0] = 1.0 / den;
        return row;
    }
    // kappa[n]: weight of delta1^(n) added to delta0; tau[n]: delta1^(n+1) = e_{n+2} + tau[n] delta1^(n).
    std::vector<cplx> kappa(n_sites - 1), tau(n_sites - 1);
    cplx eps1 = onsite[1], eps0 = onsite[0], tp = t_plus, tm = t_minus;
    const cplx a = t_plus * t_minus;
    for (std::size_t n = 0; n + 1 < n_sites; ++n) {
        const cplx den = omega - eps1;
        if (den == cplx(0.0)) throw DecimationPole(static_cast<int>(n), omega);
        const cplx inv = 1.0 / den;
        kappa[n] = tp * inv;
        tau[n] = t_minus * inv;
        eps0 += tp * tm * inv;
        tp *= t_plus * inv;
        tm *= t_minus * inv;
        eps1 = (n + 2 < n_sites ? onsite[n + 2] : onsite.back()) + a * inv;
    }
    const cplx den0 = omega - eps0;
    if (den0 == cplx(0.0)) throw DecimationPole(static_cast<int>(n_sites - 1), omega);
    // delta0_j = sum_{n >= j-1} kappa[n] prod_{m=j-1}^{n-1} tau[m], accumulated backwards.
    cplx acc = 0.0;
    for (std::size_t j = n_sites - 1; j >= 1; --j) {
        acc = kappa[j - 1] + tau[j - 1] * acc;
        row[j] = acc / den0;
    }
    row[0] = 1.0 / den0;
    return row;
}

}  // namespace detail

/// G_{0,j}(omega) for j = 0..N-1 of an N-site homogeneous chain.
inline std::vector<cplx> surface_gf_finite(const EffectiveCouplings& c, int n_sites, cplx omega)
{
    if (n_sites < 1) throw std::invalid_argument("N must be >= 1");
    const std::vector<cplx> onsite(static_cast<std::size_t>(n_sites), c.eps_tilde);
    return detail::surface_row(onsite, c.t_plus, c.t_minus, omega);
}

/// Surface row of a tridiagonal matrix with site-dependent diagonal and uniform hoppings.
inline std::vector<cplx> surface_gf_finite(const DynamicalMatrix& d, cplx omega)
{
    if (d.n_sites() < 1) throw std::invalid_argument("N must be >= 1");
    const cplx tp = d.off_upper.empty() ? cplx(0.0) : d.off_upper.front();
    const cplx tm = d.off_lower.empty() ? cplx(0.0) : d.off_lower.front();
    for (std::size_t k = 0; k < d.off_upper.size(); ++k)
        if (d.off_upper[k] != tp || d.off_lower[k] != tm)
            throw std::invalid_argument("decimation requires uniform hoppings");
    return detail::surface_row(d.diagonal, tp, tm, omega);
}

/// Row N-1 (G_{N-1,j}), by decimating from the opposite edge.
inline std::vector<cplx> surface_gf_finite_far_edge(const EffectiveCouplings& c, int n_sites, cplx omega)
{
    auto mirrored = surface_gf_finite(c.mirrored(), n_sites, omega);
    return {mirrored.rbegin(), mirrored.rend()};
}

/// All rows G_{k,j} from the surface row, using the equations of motion
/// forward in k. Error amplification grows with k when |t+| is small.
inline Eigen::MatrixXcd recover_rows(std::span<const cplx> row0, const EffectiveCouplings& c, cplx omega)
{
    const auto n = static_cast<Eigen::Index>(row0.size());
    if (n == 0) throw std::invalid_argument("empty surface row");
    if (n > 1 && c.t_plus == cplx(0.0))
        throw UnidirectionalChain("t+ = 0: rows cannot be recovered in the forward direction");
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) g(0, j) = row0[static_cast<std::size_t>(j)];
    const cplx z = omega - c.eps_tilde;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx rhs = z * g(k, j) - (k == j ? 1.0 : 0.0);
            if (k > 0) rhs -= c.t_minus * g(k - 1, j);
            g(k + 1, j) = rhs / c.t_plus;
        }
    }
    return g;
}

/// Mirror of recover_rows: starts from row N-1 and proceeds with t-.
inline Eigen::MatrixXcd recover_rows_backward(std::span<const cplx> row_last, const EffectiveCouplings& c,
                                              cplx omega)
{
    const std::vector<cplx> reversed(row_last.rbegin(), row_last.rend());
    const Eigen::MatrixXcd gm = recover_rows(reversed, c.mirrored(), omega);
    return gm.reverse();
}

}  // namespace decim
