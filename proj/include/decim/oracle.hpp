#pragma once

// Dense reference computations: resolvent by LU inversion and time propagation
// by matrix exponential. Deliberately blind to the tridiagonal structure.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "complex_utils.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace decim {

/// Two-point Green's function values over a frequency grid.
struct GFGrid {
    std::vector<double> omega_grid;
    std::vector<std::pair<int, int>> site_pairs;
    std::vector<cplx> values;  // row-major [frequency][pair]

    cplx at(std::size_t w, std::size_t pair) const { return values.at(w * site_pairs.size() + pair); }
};

/// Field amplitudes <a_j(t)> on a time grid.
struct Trajectory {
    std::vector<double> t_grid;
    Eigen::MatrixXcd amplitudes;  // [time, site]
    bool truncated = false;       // stopped at the first non-finite value
    std::optional<double> overflow_time;
};

/// Full resolvent (omega - D)^{-1} by LU with partial pivoting.
///
/// Singular means a pivot below N eps ||omega - D||. The condition number is
/// not used: non-reciprocal chains have resolvents with entries growing like
/// |t+/t-|^N, which is physics rather than a numerical defect.
inline Eigen::MatrixXcd dense_gf(const DynamicalMatrix& d, cplx omega)
{
    const int n = d.n_sites();
    Eigen::MatrixXcd a = -d.dense();
    a.diagonal().array() += omega;
    const double scale = a.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot > n * std::numeric_limits<double>::epsilon() * scale)) throw SingularResolvent(omega);
    Eigen::MatrixXcd g = lu.inverse();
    if (!g.allFinite()) throw SingularResolvent(omega);
    return g;
}

inline GFGrid dense_gf_grid(const DynamicalMatrix& d, const std::vector<double>& omegas, double eta,
                            const std::vector<std::pair<int, int>>& pairs)
{
    for (const auto& [j, l] : pairs)
        if (j < 0 || l < 0 || j >= d.n_sites() || l >= d.n_sites())
            throw std::out_of_range("site pair outside the chain");
    GFGrid g{omegas, pairs, {}};
    g.values.reserve(omegas.size() * pairs.size());
    for (double w : omegas) {
        const auto G = dense_gf(d, cplx(w, eta));
        for (const auto& [j, l] : pairs) g.values.push_back(G(j, l));
    }
    return g;
}

enum class ExpmMethod { automatic, eigen_decomposition, scaling_squaring };

/// amplitudes[t] = exp(-i D t) seed.
///
/// The automatic method diagonalizes D and falls back to scaling-and-squaring
/// when the eigenvector matrix has condition number above 1e8.
inline Trajectory propagate(const DynamicalMatrix& d, const Eigen::VectorXcd& seed,
                            const std::vector<double>& t_grid, ExpmMethod method = ExpmMethod::automatic)
{
    const int n = d.n_sites();
    if (seed.size() != n) throw std::invalid_argument("seed length must equal the number of sites");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (t_grid[k] < 0) throw std::invalid_argument("times must be nonnegative");
        if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("time grid must increase");
    }

    const Eigen::MatrixXcd m = d.dense();
    Trajectory traj;
    traj.t_grid = t_grid;
    traj.amplitudes = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(t_grid.size()), n);

    bool use_eig = method != ExpmMethod::scaling_squaring;
    Eigen::VectorXcd lambda, coeff;
    Eigen::MatrixXcd vecs;
    if (use_eig) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
        if (es.info() != Eigen::Success) throw EigenSolverFailure("eigendecomposition failed in propagate");
        vecs = es.eigenvectors();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(sv.size() - 1);
        if (method == ExpmMethod::automatic && !(cond <= 1e8)) {
            use_eig = false;
        } else {
            lambda = es.eigenvalues();
            coeff = vecs.partialPivLu().solve(seed);
        }
    }

    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        Eigen::VectorXcd state;
        if (use_eig) {
            Eigen::VectorXcd phase = (lambda * cplx(0.0, -t)).array().exp();
            state = vecs * phase.cwiseProduct(coeff);
        } else {
            const Eigen::MatrixXcd gen = m * cplx(0.0, -t);
            state = gen.exp() * seed;
        }
        if (!state.allFinite()) {
            traj.truncated = true;
            traj.overflow_time = t;
            traj.t_grid.resize(k);
            traj.amplitudes.conservativeResize(static_cast<Eigen::Index>(k), n);
            break;
        }
        traj.amplitudes.row(static_cast<Eigen::Index>(k)) = state.transpose();
    }
    return traj;
}

}  // namespace decim
