#include "bifurcate/eigen.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "symmetric_oracle.hpp"

using namespace bifurcate;

namespace {
const double kTanhHalf = std::tanh(0.5);
}

TEST(Lambda1Single, KnownValues) {
    EXPECT_NEAR(lambda1_single(2.0).value(), 0.23105858, 5e-9);
    EXPECT_NEAR(lambda1_single(0.1).value(), 4.62117157, 5e-9);
    EXPECT_NEAR(lambda1_single(1.0).value(), 0.4621171573, 1e-10);
    EXPECT_NEAR(steklov_mu1(), kTanhHalf, 1e-15);
}

TEST(Lambda1Single, ZeroSlopeIsInfiniteNegativeThrows) {
    EXPECT_FALSE(lambda1_single(0.0).is_finite());
    EXPECT_THROW(lambda1_single(0.0).value(), std::logic_error);
    EXPECT_THROW(lambda1_single(-1.0), std::invalid_argument);
    EXPECT_THROW(lambda1_single(NAN), std::invalid_argument);
}

TEST(QuadraticRoots, ClosedFormsAndVieta) {
    const auto [lo, hi] = solve_for_lambda_quadratic(1.0);
    EXPECT_NEAR(lo, kTanhHalf, 1e-14);
    EXPECT_NEAR(hi, 1.0 / kTanhHalf, 1e-14);
    EXPECT_NEAR(hi, 2.16395, 1e-5);
    for (double d : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        const auto [a, b] = solve_for_lambda_quadratic(d);
        EXPECT_LT(a, b);
        EXPECT_NEAR(a * b, 1.0 / (d * d), 1e-12 / (d * d));
        EXPECT_LE(std::abs(single_characteristic(a, d)), 1e-10 * std::sinh(1.0));
        EXPECT_LE(std::abs(single_characteristic(b, d)), 1e-10 * std::sinh(1.0));
        EXPECT_DOUBLE_EQ(a, lambda1_single(d).value());
    }
    EXPECT_NEAR(solve_for_lambda_quadratic(2.0).first, 0.23105858, 5e-9);
    EXPECT_THROW(solve_for_lambda_quadratic(0.0), std::invalid_argument);
}

TEST(EigenfunctionSingle, EndpointsMidpointAndPositivity) {
    EXPECT_NEAR(eigenfunction_single(0.0), 1.0, 1e-15);
    EXPECT_NEAR(eigenfunction_single(1.0), 1.0, 1e-14);
    EXPECT_NEAR(eigenfunction_single(0.5), 1.0 / std::cosh(0.5), 1e-14);
    EXPECT_NEAR(eigenfunction_single(0.5), 0.886819, 1e-6);
    double mx = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = eigenfunction_single(i * 1e-3);
        EXPECT_GT(v, 0.0);
        mx = std::max(mx, v);
    }
    EXPECT_NEAR(mx, 1.0, 1e-14);
    EXPECT_NEAR(eigenfunction_single(0.3, 2.5), 2.5 * eigenfunction_single(0.3), 1e-15);
}

TEST(EigenfunctionSingle, SolvesContinuousEigenproblem) {
    // phi'' = phi, and -phi'(0) = mu phi(0), phi'(1) = mu phi(1) with mu = tanh(1/2).
    const double e = 1e-5;
    for (double x : {0.1, 0.4, 0.77}) {
        const double d2 = (eigenfunction_single(x + e) - 2 * eigenfunction_single(x) + eigenfunction_single(x - e)) / (e * e);
        EXPECT_NEAR(d2, eigenfunction_single(x), 1e-4);
    }
    const double d0 = (eigenfunction_single(e) - eigenfunction_single(-e)) / (2 * e);
    const double d1 = (eigenfunction_single(1 + e) - eigenfunction_single(1 - e)) / (2 * e);
    EXPECT_NEAR(-d0, kTanhHalf * eigenfunction_single(0.0), 1e-9);
    EXPECT_NEAR(d1, kTanhHalf * eigenfunction_single(1.0), 1e-9);
}

TEST(Lambda1System, QuarticReducesToSteklovValue) {
    for (double sigma : {0.01, 0.1, 1.0, 4.0, 100.0}) {
        const auto r = lambda1_system(std::sqrt(sigma), std::sqrt(sigma));
        const double l = r.lambda1.value();
        EXPECT_NEAR(l * std::sqrt(sigma), kTanhHalf, 1e-10) << sigma;
        EXPECT_NEAR(r.mu1, kTanhHalf, 1e-10);
        EXPECT_LE(std::abs(system_characteristic(l, sigma)), 1e-10);
        EXPECT_LT(l, system_lambda1_bound(sigma));
        // The other quartic root in l^2 is larger.
        const double t = 1.0 / kTanhHalf;
        EXPECT_NEAR(system_characteristic(t / std::sqrt(sigma), sigma), 0.0, 1e-9);
    }
}

TEST(Lambda1System, UnequalDerivativesDependOnlyOnProduct) {
    const auto a = lambda1_system(0.1, 1.0);
    const auto b = lambda1_system(1.0, 0.1);
    EXPECT_NEAR(a.lambda1.value(), b.lambda1.value(), 1e-14);
    EXPECT_NEAR(a.lambda1.value(), kTanhHalf / std::sqrt(0.1), 1e-10);
    EXPECT_NEAR(a.lambda1.value(), 1.46134240, 5e-7);
    EXPECT_NEAR(lambda1_system(0.1, 0.1).lambda1.value(), 4.6211716, 1e-7);
}

TEST(Lambda1System, CrossConsistencyWithSingle) {
    for (double c : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        EXPECT_NEAR(lambda1_system(c, c).lambda1.value(), lambda1_single(c).value(), 1e-10);
    }
    EXPECT_NEAR(lambda1_system(1.0, 1.0).lambda1.value(), 0.46211716, 5e-9);
}

TEST(Lambda1System, ZeroProductIsInfinite) {
    EXPECT_FALSE(lambda1_system(0.0, 0.0).lambda1.is_finite());
    EXPECT_FALSE(lambda1_system(1.0, 0.0).lambda1.is_finite());
    EXPECT_EQ(lambda1_system(0.0, 3.0).C, 0.0);
    EXPECT_THROW(lambda1_system(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(lambda1_system(1.0, -1.0), std::invalid_argument);
}

TEST(EigenfunctionSystem, ValuesAtZeroAndProportionality) {
    for (double fp : {0.1, 1.0, 2.0}) {
        for (double gp : {0.1, 1.0, 3.0}) {
            const auto r = lambda1_system(fp, gp, 1.0);
            const auto [phi0, psi0] = eigenfunction_system(0.0, r);
            EXPECT_NEAR(phi0, 1.0, 1e-15);
            EXPECT_NEAR(psi0, r.C, 1e-12);
            EXPECT_NEAR(r.C, std::sqrt(gp / fp), 1e-10);
        }
    }
    const auto r = lambda1_system(0.7, 0.7);
    for (int i = 0; i <= 10; ++i) {
        const auto [phi, psi] = eigenfunction_system(0.1 * i, r);
        EXPECT_NEAR(phi, psi, 1e-12);
    }
}

TEST(EigenfunctionSystem, PositiveOnInterval) {
    for (double sigma : {0.01, 0.1, 1.0, 4.0}) {
        for (double ratio : {1.0, 10.0}) {
            const double fp = std::sqrt(sigma / ratio), gp = std::sqrt(sigma * ratio);
            const auto r = lambda1_system(fp, gp);
            for (int i = 1; i < 1000; ++i) {
                const auto [phi, psi] = eigenfunction_system(i * 1e-3, r);
                ASSERT_GT(phi, 0.0);
                ASSERT_GT(psi, 0.0);
            }
        }
    }
}

TEST(EigenfunctionSystem, SolvesCoupledLinearization) {
    // phi'' = phi, psi'' = psi, -phi'(0) = l f' psi(0), -psi'(0) = l g' phi(0),
    // and the same with + at x = 1.
    const double fp = 0.4, gp = 2.5;
    const auto r = lambda1_system(fp, gp, 1.3);
    const double l = r.lambda1.value();
    const double e = 1e-6;
    auto d = [&](double x, int comp) {
        const auto p = eigenfunction_system(x + e, r), m = eigenfunction_system(x - e, r);
        return comp == 0 ? (p.first - m.first) / (2 * e) : (p.second - m.second) / (2 * e);
    };
    const auto at0 = eigenfunction_system(0.0, r), at1 = eigenfunction_system(1.0, r);
    EXPECT_NEAR(-d(0.0, 0), l * fp * at0.second, 1e-7);
    EXPECT_NEAR(-d(0.0, 1), l * gp * at0.first, 1e-7);
    EXPECT_NEAR(d(1.0, 0), l * fp * at1.second, 1e-7);
    EXPECT_NEAR(d(1.0, 1), l * gp * at1.first, 1e-7);
}

TEST(DiscreteSteklov, MatchesIndependentOracleAndConverges) {
    double prev_err = 1.0;
    for (std::size_t m : {11u, 21u, 41u, 81u, 161u}) {
        const auto g = unit_interval_grid(m);
        const double mu = discrete_steklov_mu1(*g);
        EXPECT_NEAR(mu, bifurcate::testing::symmetric_boundary_rate(m), 1e-10) << m;
        const double err = kTanhHalf - mu;
        EXPECT_GT(err, 0.0);
        EXPECT_LT(err, prev_err);
        if (m > 11) EXPECT_NEAR(prev_err / err, 2.0, 0.1) << m;
        prev_err = err;
    }
}

TEST(DiscreteSteklov, DiscreteBifurcationPoints) {
    const auto g = unit_interval_grid(101);
    const double mu = discrete_steklov_mu1(*g);
    EXPECT_NEAR(discrete_lambda1_single(*g, 0.1).value(), mu / 0.1, 1e-12);
    EXPECT_NEAR(discrete_lambda1_system(*g, 0.1, 1.0).value(), mu / std::sqrt(0.1), 1e-12);
    EXPECT_FALSE(discrete_lambda1_single(*g, 0.0).is_finite());
    EXPECT_FALSE(discrete_lambda1_system(*g, 1.0, 0.0).is_finite());
    const Grid g2 = build_grid(Domain({{0, 1}, {0, 1}}), {5, 5});
    EXPECT_THROW(discrete_steklov_mu1(g2), std::invalid_argument);
}
