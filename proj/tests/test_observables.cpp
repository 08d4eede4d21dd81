#include <gtest/gtest.h>

#include <decim/finite_chain.hpp>
#include <decim/observables.hpp>
#include <decim/oracle.hpp>

#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace decim;
using std::numbers::pi;

TEST(Observables, SingleSiteDosIsLorentzian)
{
    const double kappa = 0.4, w0 = 0.3;
    for (double w : {-1.0, 0.3, 0.8}) {
        const cplx g = 1.0 / (cplx(w, 0.0) - cplx(w0, -kappa / 2));
        const double lorentz = (kappa / 2) / pi / ((w - w0) * (w - w0) + kappa * kappa / 4);
        EXPECT_NEAR(local_dos(g), lorentz, 1e-14);
    }
}

TEST(Observables, NegativeDosThrows)
{
    EXPECT_THROW(local_dos(cplx(0.0, 1e-3)), BranchError);
    EXPECT_NO_THROW(local_dos(cplx(0.0, 1e-10)));
}

TEST(Observables, SurfaceDosSumRule)
{
    const auto c = effective_couplings(ChainParams::coupled_cavity(0.0, 1.0, 0.0, 0.0));
    double acc = 0.0;
    const int n = 20001;
    const double h = 6.0 / (n - 1);
    for (int k = 0; k < n; ++k) acc += local_dos(solve_surface_gf(c, cplx(-3.0 + k * h, 1e-3)).value) * h;
    EXPECT_NEAR(acc, 1.0, 5e-3);
}

TEST(Observables, SurfaceDosSemicircle)
{
    const auto c = effective_couplings(ChainParams::coupled_cavity(0.0, 1.0, 0.0, 0.0));
    for (double w : {-1.5, 0.0, 0.9}) {
        const double ref = std::sqrt(4.0 - w * w) / (2.0 * pi);
        EXPECT_NEAR(local_dos(solve_surface_gf(c, w).value), ref, 1e-10);
    }
    EXPECT_NEAR(local_dos(solve_surface_gf(c, 2.5).value), 0.0, 1e-12);
}

TEST(Observables, DosNodesOfFiniteSurfaceRow)
{
    // site j of the lossless semi-infinite chain: rho_jj vanishes where sin((j+1) k) = 0
    const auto c = effective_couplings(ChainParams::coupled_cavity(0.0, 1.0, 0.0, 0.0));
    const int j = 2;
    const double k = pi / (j + 1);
    const double w = 2.0 * std::cos(k);
    const auto s = solve_surface_gf(c, w);
    EXPECT_NEAR(local_dos(gf_pair(s, c, j, j)), 0.0, 1e-10);
}

TEST(Observables, BulkGfAgainstQuadrature)
{
    for (cplx w : {cplx(0.5, 0.05), cplx(-1.2, 0.2), cplx(3.0, 0.0), cplx(-2.6, 0.01)})
        for (int d : {0, 1, 3}) {
            const cplx a = bulk_gf_pbc(w, 1.0, 0.0, d);
            const cplx b = oracle::bulk_gf_quadrature(w, 1.0, 0.0, d, 200000);
            EXPECT_LT(rel_diff(a, b), 1e-6) << w << " " << d;
        }
}

TEST(Observables, BulkGfRealFrequencyInBand)
{
    for (double w : {-1.0, 0.2, 1.7}) {
        const double ref = 1.0 / (pi * std::sqrt(4.0 - w * w));
        EXPECT_NEAR(local_dos(bulk_gf_pbc(w, 1.0, 0.0, 0)), ref, 1e-12);
    }
}

TEST(Observables, WindingAgainstQuadrature)
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int checked = 0;
    for (int k = 0; k < 300; ++k) {
        const auto c = effective_couplings(oracle::random_stable_params(rng));
        const double w = u(rng);
        try {
            const int a = winding_number(c, w);
            EXPECT_EQ(a, oracle::winding_quadrature(c, w)) << w;
            ++checked;
        } catch (const GapClosing&) {
        }
    }
    EXPECT_GT(checked, 250);
}

TEST(Observables, WindingOfTopologicalChain)
{
    const auto p = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 2.0, 4.0);
    EXPECT_EQ(winding_number(p, 0.0), 1);
    EXPECT_EQ(winding_number(p, 3.0), 0);
    EXPECT_EQ(winding_number(p, -3.0), 0);
}

TEST(Observables, WindingGapClosing)
{
    const EffectiveCouplings c{0.0, 1.0, 1.0};
    EXPECT_THROW(winding_number(c, 0.5), GapClosing);
}

TEST(Observables, IndicatorAgreesWithWinding)
{
    const auto p = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 2.0, 4.0);
    const auto c = effective_couplings(p);
    for (double w = -3.9; w < 4.0; w += 0.13) {
        const auto ind = topo_indicator_from_xi(correlation_data(solve_surface_gf(c, w), c));
        if (ind.boundary) continue;
        try {
            EXPECT_EQ(ind.value, winding_number(c, w)) << w;
        } catch (const GapClosing&) {
        }
    }
}

TEST(Observables, PhaseClassificationPoints)
{
    const auto top = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 2.0, 1.4);
    EXPECT_EQ(classify_point(top, 0.0, 40), Phase::topological_stable);
    const auto unstable = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 1.0, 1.4);
    EXPECT_EQ(classify_point(unstable, 0.0, 40), Phase::topological_unstable);
    const auto trivial = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 2.0, 0.2);
    EXPECT_EQ(classify_point(trivial, 0.0, 40), Phase::trivial_stable);
    EXPECT_STREQ(to_string(Phase::boundary), "boundary");
}

TEST(Observables, PhaseDiagramThreadDeterminism)
{
    const auto base = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 2.0, 1.4);
    std::vector<double> g, p;
    for (int k = 0; k < 9; ++k) g.push_back(0.2 + 0.4 * k);
    for (int k = 0; k < 7; ++k) p.push_back(0.15 + 0.5 * k);
    const auto a = phase_diagram(base, g, p, 0.0, 30, 1);
    const auto b = phase_diagram(base, g, p, 0.0, 30, 4);
    EXPECT_EQ(a.classification, b.classification);
    EXPECT_THROW(phase_diagram(base, {}, p, 0.0, 30), std::invalid_argument);
}

TEST(Observables, GainFactorization)
{
    auto p = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 4.0, 3.6);
    p.mirrored = true;
    const auto c = effective_couplings(p);
    const auto s = solve_surface_gf(c, 0.2);
    const auto corr = correlation_data(s, c);
    for (int j : {0, 3, 10}) {
        const double direct = p.gamma * p.gamma * std::norm(gf_pair(s, c, j, 0));
        EXPECT_LT(std::abs(gain(s, corr, p.gamma, j) - direct), 1e-10 * direct);
    }
    EXPECT_NEAR(gain_db(100.0), 20.0, 1e-14);
}

TEST(Observables, SingleSiteNoise)
{
    // one cavity: n_amp = gamma P |G|^2 / 2 and gain = gamma^2 |G|^2
    const std::vector<cplx> row{cplx(0.0, 2.0)};
    const auto r = added_noise(row, 0, 0.0, 0.6, 0.0, 1.5, 1.5 * 1.5 * 4.0);
    ASSERT_TRUE(r.n_add.has_value());
    EXPECT_NEAR(*r.n_add, 0.6 / (2.0 * 1.5), 1e-14);
    EXPECT_FALSE(added_noise(row, 0, 0.0, 0.6, 0.0, 1.5, 0.0).n_add.has_value());
}

TEST(Observables, NoiseTailTruncation)
{
    auto p = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 4.0, 3.6);
    p.mirrored = true;
    const auto r = added_noise(p, 0.3, 4);
    const auto c = effective_couplings(p);
    const auto s = solve_surface_gf(c, 0.3);
    std::vector<cplx> row(static_cast<std::size_t>(4 * r.row_length + 100));
    for (std::size_t l = 0; l < row.size(); ++l) row[l] = gf_pair_sum(s, c, 4, static_cast<int>(l));
    const double longer = noise_quadratic_form(row, p.pump, p.pump_nn, p.gamma);
    EXPECT_LT(std::abs(r.n_amp - longer), 1e-9 * longer);
    EXPECT_FALSE(r.capped);
}

TEST(Observables, AmplifyingRowApproachesDenseChain)
{
    // Far-edge corrections fall like exp((Re xi+ + Re xi-) N); longer chains are
    // numerically singular in double precision because of the directional gain.
    auto p = ChainParams::hatano_nelson(0.0, 1.0, pi / 2, 4.0, 3.6);
    p.mirrored = true;
    const auto c = effective_couplings(p);
    const auto s = solve_surface_gf(c, 0.3);
    auto worst = [&](int n) {
        const auto g = dense_gf(DynamicalMatrix::homogeneous(c, n), 0.3);
        double w = 0.0;
        for (int l = 0; l < 8; ++l) w = std::max(w, rel_diff(gf_pair(s, c, 4, l), g(4, l)));
        return w;
    };
    const double e16 = worst(16), e24 = worst(24);
    EXPECT_LT(e24, 1e-3);
    EXPECT_LT(e24, e16 / 10.0);
}
