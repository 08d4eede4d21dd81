#include <gtest/gtest.h>

#include <decim/oracle.hpp>

#include <numbers>

using namespace decim;

TEST(Oracle, ResolventInvertsShiftedMatrix)
{
    const EffectiveCouplings c{cplx(0.2, -0.3), cplx(1.0, 0.5), cplx(0.7, -0.1)};
    const auto d = DynamicalMatrix::homogeneous(c, 12);
    const cplx w(0.4, 0.05);
    const auto g = dense_gf(d, w);
    Eigen::MatrixXcd a = -d.dense();
    a.diagonal().array() += w;
    EXPECT_LT((a * g - Eigen::MatrixXcd::Identity(12, 12)).norm(), 1e-12);
}

TEST(Oracle, SingularAtEigenvalue)
{
    // Hermitian 3-site chain: eigenvalues 0 and +-sqrt(2).
    const auto d = DynamicalMatrix::homogeneous({0.0, 1.0, 1.0}, 3);
    EXPECT_THROW(dense_gf(d, 0.0), SingularResolvent);
    EXPECT_NO_THROW(dense_gf(d, 0.5));
}

TEST(Oracle, GridLayout)
{
    const auto d = DynamicalMatrix::homogeneous({cplx(0, -0.5), 1.0, 1.0}, 5);
    const auto grid = dense_gf_grid(d, {-1.0, 0.0, 1.0}, 0.1, {{0, 0}, {2, 3}});
    ASSERT_EQ(grid.values.size(), 6u);
    EXPECT_EQ(grid.at(1, 1), dense_gf(d, cplx(0.0, 0.1))(2, 3));
    EXPECT_THROW(dense_gf_grid(d, {0.0}, 0.1, {{0, 7}}), std::out_of_range);
}

TEST(Oracle, SingleSitePropagation)
{
    const cplx eps(0.3, -0.2);
    const auto d = DynamicalMatrix::homogeneous({eps, 0.0, 0.0}, 1);
    Eigen::VectorXcd seed(1);
    seed << 2.0;
    const auto tr = propagate(d, seed, {0.0, 1.0, 2.5});
    for (std::size_t k = 0; k < 3; ++k) {
        const double t = tr.t_grid[k];
        EXPECT_LT(std::abs(tr.amplitudes(static_cast<Eigen::Index>(k), 0) - 2.0 * std::exp(cplx(0, -1) * eps * t)),
                  1e-14);
    }
}

TEST(Oracle, PropagationMethodsAgree)
{
    const EffectiveCouplings c{cplx(0.1, -0.25), cplx(1.0, 0.3), cplx(0.6, 0.0)};
    const auto d = DynamicalMatrix::homogeneous(c, 10);
    Eigen::VectorXcd seed = Eigen::VectorXcd::Zero(10);
    seed(0) = 1.0;
    std::vector<double> t;
    for (int k = 0; k <= 40; ++k) t.push_back(0.25 * k);
    const auto a = propagate(d, seed, t, ExpmMethod::eigen_decomposition);
    const auto b = propagate(d, seed, t, ExpmMethod::scaling_squaring);
    EXPECT_LT((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Oracle, RejectsBadTimeGrids)
{
    const auto d = DynamicalMatrix::homogeneous({0.0, 1.0, 1.0}, 3);
    Eigen::VectorXcd seed = Eigen::VectorXcd::Zero(3);
    EXPECT_THROW(propagate(d, seed, {1.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(propagate(d, seed, {-1.0}), std::invalid_argument);
    EXPECT_THROW(propagate(d, Eigen::VectorXcd::Zero(2), {0.0}), std::invalid_argument);
}

TEST(Oracle, OverflowTruncatesTrajectory)
{
    const auto d = DynamicalMatrix::homogeneous({cplx(0, 50.0), 0.0, 0.0}, 1);
    Eigen::VectorXcd seed(1);
    seed << 1.0;
    const auto tr = propagate(d, seed, {1.0, 5.0, 20.0, 40.0});
    EXPECT_TRUE(tr.truncated);
    ASSERT_TRUE(tr.overflow_time.has_value());
    EXPECT_EQ(*tr.overflow_time, 20.0);
    EXPECT_EQ(tr.amplitudes.rows(), 2);
}
