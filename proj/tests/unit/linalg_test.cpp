#include "bifurcate/linalg.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>

using namespace bifurcate;

namespace {

Eigen::MatrixXd to_eigen(const SparseMatrix& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (const auto& e : a.row(i)) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.col)) = e.value;
    }
    return m;
}

SparseMatrix random_banded(std::mt19937& rng, std::size_t n, std::size_t kl, std::size_t ku) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SparseMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= kl ? i - kl : 0;
        const std::size_t hi = std::min(n - 1, i + ku);
        for (std::size_t j = lo; j <= hi; ++j) a.set(i, j, dist(rng));
        a.set(i, i, static_cast<double>(kl + ku + 2));  // diagonally dominant
    }
    return a;
}

// Swaps rows (0,1), (2,3), ... of a diagonally dominant banded matrix. The
// result stays well conditioned but has small diagonal entries, so the
// factorization must interchange rows.
SparseMatrix pair_swapped(const SparseMatrix& d) {
    SparseMatrix a(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t src = (i ^ 1u) < d.size() ? (i ^ 1u) : i;
        for (const auto& e : d.row(src)) a.set(i, e.col, e.value);
    }
    return a;
}

}  // namespace

TEST(SparseMatrix, AddSetAt) {
    SparseMatrix a(3);
    a.add(0, 2, 1.5);
    a.add(0, 2, 1.0);
    a.set(1, 1, -4.0);
    EXPECT_EQ(a.at(0, 2), 2.5);
    EXPECT_EQ(a.at(1, 1), -4.0);
    EXPECT_EQ(a.at(2, 0), 0.0);
    EXPECT_TRUE(a.has_entry(0, 2));
    EXPECT_FALSE(a.has_entry(2, 2));
    EXPECT_THROW(a.add(0, 3, 1.0), std::out_of_range);
    const auto bw = a.bandwidth();
    EXPECT_EQ(bw.first, 0u);
    EXPECT_EQ(bw.second, 2u);
}

TEST(SparseMatrix, InterleaveOrdering) {
    const auto order = interleave_ordering(2, 3);
    EXPECT_EQ(order, (std::vector<std::size_t>{0, 3, 1, 4, 2, 5}));
}

TEST(BandedLU, MatchesDenseOracle) {
    std::mt19937 rng(1234u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + rng() % 40;
        const std::size_t kl = rng() % 4, ku = rng() % 4;
        const auto a = random_banded(rng, n, kl, ku);
        std::vector<double> b(n);
        for (double& x : b) x = dist(rng);
        const BandedLU lu(a);
        EXPECT_EQ(lu.lower_bandwidth(), std::min(kl, n - 1));
        const auto x = lu.solve(b);
        const Eigen::VectorXd xe = to_eigen(a).fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(n)));
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], xe(static_cast<Eigen::Index>(i)), 1e-10 * (1.0 + std::abs(xe(static_cast<Eigen::Index>(i)))));
    }
}

TEST(BandedLU, PivotingKeepsBackwardErrorSmall) {
    std::mt19937 rng(4321u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + rng() % 40;
        const std::size_t kl = rng() % 4, ku = rng() % 4;
        const auto a = pair_swapped(random_banded(rng, n, kl, ku));
        std::vector<double> b(n);
        for (double& x : b) x = dist(rng);
        const auto x = BandedLU(a).solve(b);
        const auto ax = a.multiply(x);
        double xnorm = 0.0, rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xnorm = std::max(xnorm, std::abs(x[i]));
            rnorm = std::max(rnorm, std::abs(ax[i] - b[i]));
        }
        EXPECT_LE(rnorm, 1e-12 * static_cast<double>(kl + ku + 2) * (1.0 + xnorm));
    }
}

TEST(BandedLU, PermutedOrderingSolvesSameSystem) {
    std::mt19937 rng(5u);
    const std::size_t n = 20;
    // Two coupled tridiagonal blocks with diagonal coupling.
    SparseMatrix a(2 * n);
    for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = b * n + i;
            a.set(r, r, 4.0);
            if (i > 0) a.set(r, r - 1, -1.0);
            if (i + 1 < n) a.set(r, r + 1, -1.0);
        }
    }
    a.set(0, n, -0.5);
    a.set(n, 0, -0.7);
    a.set(n - 1, 2 * n - 1, -0.3);
    a.set(2 * n - 1, n - 1, -0.2);
    const auto order = interleave_ordering(2, n);
    const auto [kl, ku] = a.bandwidth(order);
    EXPECT_EQ(kl, 2u);
    EXPECT_EQ(ku, 2u);
    std::vector<double> rhs(2 * n);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : rhs) x = dist(rng);
    const auto x1 = solve(a, rhs, order);
    const auto x2 = solve(a, rhs);
    const auto ax = a.multiply(x1);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        EXPECT_NEAR(x1[i], x2[i], 1e-12);
        EXPECT_NEAR(ax[i], rhs[i], 1e-12);
    }
}

TEST(BandedLU, SingularThrows) {
    SparseMatrix a(3);
    a.set(0, 0, 1.0);
    a.set(1, 0, 1.0);
    a.set(2, 2, 1.0);
    EXPECT_THROW(BandedLU{a}, SingularMatrixError);
}

TEST(DenseInverse, MatchesEigen) {
    std::mt19937 rng(77u);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng() % 12;
        const auto a = random_banded(rng, n, n, n);
        const auto inv = dense_inverse(a);
        const Eigen::MatrixXd ref = to_eigen(a).inverse();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_NEAR(inv[i][j], ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                            1e-8 * (1.0 + std::abs(ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))));
            }
        }
    }
}
