#pragma once

// Chain parameters, effective couplings and the tridiagonal dynamical matrix
// of a homogeneous driven-dissipative bosonic chain.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex_utils.hpp"
#include "errors.hpp"

namespace decim {

/// Physical parameters of one homogeneous chain, in absolute units.
///
/// Local loss/gain enter the on-site energy, nearest-neighbour loss/gain enter
/// the hoppings. A chain is "mirrored" when its sites are numbered from the
/// opposite end, which swaps the two directional hoppings.
struct ChainParams {
    double epsilon = 0.0;
    double t_c = 1.0;
    double phi = 0.0;
    double gamma = 0.0;
    double pump = 0.0;
    double gamma_nn = 0.0;
    double pump_nn = 0.0;
    bool mirrored = false;

    /// Net loss rate gamma - P.
    double net_loss() const noexcept { return gamma - pump; }

    /// Coupled-cavity array with local loss and gain only.
    static ChainParams coupled_cavity(double epsilon, double t_c, double gamma, double pump)
    {
        ChainParams p;
        p.epsilon = epsilon;
        p.t_c = t_c;
        p.gamma = gamma;
        p.pump = pump;
        return p;
    }

    /// Standard Hatano-Nelson form: non-local gain P_nn = P/2, no non-local loss.
    static ChainParams hatano_nelson(double epsilon, double t_c, double phi, double gamma, double pump)
    {
        ChainParams p;
        p.epsilon = epsilon;
        p.t_c = t_c;
        p.phi = phi;
        p.gamma = gamma;
        p.pump = pump;
        p.pump_nn = pump / 2.0;
        return p;
    }

    void validate() const
    {
        auto check = [](double v, const char* name) {
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
        };
        check(epsilon, "epsilon");
        check(t_c, "t_c");
        check(phi, "phi");
        check(gamma, "gamma");
        check(pump, "pump");
        check(gamma_nn, "gamma_nn");
        check(pump_nn, "pump_nn");
        if (t_c < 0 || gamma < 0 || pump < 0 || gamma_nn < 0 || pump_nn < 0)
            throw std::invalid_argument("hopping and rates must be nonnegative");
    }

    friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

/// eps~ and the two directional hoppings. t_plus couples site j to j+1
/// (matrix element D[j][j+1]), t_minus couples j+1 back to j.
struct EffectiveCouplings {
    cplx eps_tilde;
    cplx t_plus;
    cplx t_minus;

    cplx alpha() const noexcept { return t_plus * t_minus; }

    EffectiveCouplings mirrored() const noexcept { return {eps_tilde, t_minus, t_plus}; }
};

inline EffectiveCouplings effective_couplings(const ChainParams& p)
{
    p.validate();
    const cplx eps = cplx(p.epsilon, -(p.gamma - p.pump) / 2.0);
    const cplx nonlocal = cplx(0.0, -(p.gamma_nn - p.pump_nn) / 2.0);
    EffectiveCouplings c{eps, p.t_c * std::polar(1.0, p.phi) + nonlocal,
                         p.t_c * std::polar(1.0, -p.phi) + nonlocal};
    return p.mirrored ? c.mirrored() : c;
}

/// Complex tridiagonal matrix: diagonal (N), off_upper[j] = D[j][j+1], off_lower[j] = D[j+1][j].
struct DynamicalMatrix {
    std::vector<cplx> diagonal;
    std::vector<cplx> off_upper;
    std::vector<cplx> off_lower;

    int n_sites() const noexcept { return static_cast<int>(diagonal.size()); }

    static DynamicalMatrix homogeneous(const EffectiveCouplings& c, int n_sites)
    {
        if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
        const auto n = static_cast<std::size_t>(n_sites);
        return {std::vector<cplx>(n, c.eps_tilde), std::vector<cplx>(n - 1, c.t_plus),
                std::vector<cplx>(n - 1, c.t_minus)};
    }

    Eigen::MatrixXcd dense() const
    {
        const int n = n_sites();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (int j = 0; j < n; ++j) m(j, j) = diagonal[j];
        for (int j = 0; j + 1 < n; ++j) {
            m(j, j + 1) = off_upper[j];
            m(j + 1, j) = off_lower[j];
        }
        return m;
    }

    /// Infinity norm (max absolute row sum).
    double norm_inf() const
    {
        double best = 0.0;
        const int n = n_sites();
        for (int j = 0; j < n; ++j) {
            double row = std::abs(diagonal[j]);
            if (j + 1 < n) row += std::abs(off_upper[j]);
            if (j > 0) row += std::abs(off_lower[j - 1]);
            best = std::max(best, row);
        }
        return best;
    }
};

inline DynamicalMatrix build_dynamical_matrix(const ChainParams& params, int n_sites)
{
    return DynamicalMatrix::homogeneous(effective_couplings(params), n_sites);
}

struct StabilityReport {
    double max_imag_eigenvalue;
    bool stable;
    double tolerance;
    std::vector<cplx> eigenvalues;
};

/// Diagonal similarity that equalizes the two off-diagonals to sqrt(upper * lower).
/// Same spectrum; far better conditioned when |t+| and |t-| differ a lot.
/// Returns the input unchanged if some hopping product vanishes.
inline DynamicalMatrix symmetrized(const DynamicalMatrix& d)
{
    DynamicalMatrix s = d;
    for (std::size_t k = 0; k < d.off_upper.size(); ++k) {
        const cplx prod = d.off_upper[k] * d.off_lower[k];
        if (prod == cplx(0.0)) return d;
        s.off_upper[k] = s.off_lower[k] = std::sqrt(prod);
    }
    return s;
}

/// Dynamical stability: every eigenvalue has Im <= 1e-9 * ||D||_inf.
/// Eigenvalues are taken from the symmetrized matrix.
inline StabilityReport stability_report(const DynamicalMatrix& d)
{
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(symmetrized(d).dense(), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw EigenSolverFailure("eigenvalue iteration did not converge");
    const auto& ev = solver.eigenvalues();
    StabilityReport r;
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    r.max_imag_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const auto& l : r.eigenvalues) r.max_imag_eigenvalue = std::max(r.max_imag_eigenvalue, l.imag());
    r.tolerance = 1e-9 * d.norm_inf();
    r.stable = r.max_imag_eigenvalue <= r.tolerance;
    return r;
}

}  // namespace decim
