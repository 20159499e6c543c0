#include "bifurcate/solve.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bifurcate/eigen.hpp"
#include "symmetric_oracle.hpp"

using namespace bifurcate;
namespace oracle = bifurcate::testing;

namespace {

std::vector<double> eigen_profile(const Grid& g, double amplitude) {
    std::vector<double> u(g.num_nodes());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = eigenfunction_single(g.coordinate(k, 0), amplitude);
    return u;
}

SingleProblem quadratic(std::size_t m, double lambda) {
    return SingleProblem{unit_interval_grid(m), Polynomial({0.0, 0.0, 1.0}), lambda, std::nullopt};
}

// Tight tolerances for comparisons against the oracle, which is exact.
NewtonConfig tight() {
    NewtonConfig c;
    c.residual_tol = 1e-10;
    c.step_tol = 1e-14;
    return c;
}

SingleProblem with_auto_cutoff(SingleProblem p, double rho) {
    const Grid& g = *p.grid;
    const double c = apriori_C(p.f, p.lambda, g.h_min());
    p.cutoff = CutoffParams{rho, c * g.h_max() / g.h_min(), p.lambda, g.h_max(), g.h_min()};
    return p;
}

}  // namespace

TEST(NewtonConfig, Validation) {
    NewtonConfig c;
    EXPECT_NO_THROW(c.validate());
    c.residual_tol = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.max_iters = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.backtrack_factor = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Newton, TrivialSolutionInZeroIterations) {
    const auto p = quadratic(101, 1.0);
    const std::vector<double> zero(101, 0.0);
    const auto o = newton_solve(p, zero, NewtonConfig{});
    EXPECT_EQ(o.status, SolveStatus::Converged);
    EXPECT_EQ(o.iters, 0u);
    EXPECT_EQ(o.final_residual_norm, 0.0);
    EXPECT_FALSE(o.certificates.positive);
    EXPECT_TRUE(o.certificates.max_on_boundary);
    EXPECT_EQ(o.certificates.apriori_ok, std::optional<bool>(true));
    EXPECT_TRUE(o.certificates.cutoff_inactive);
}

TEST(Newton, WrongLengthThrows) {
    const auto p = quadratic(20, 1.0);
    const std::vector<double> u(19, 1.0);
    EXPECT_THROW(newton_solve(p, u, NewtonConfig{}), std::invalid_argument);
}

TEST(Newton, QuadraticAtLambdaThreeMatchesOracle) {
    const std::size_t m = 151;
    const auto p = quadratic(m, 3.0);
    const auto o = newton_solve(p, eigen_profile(*p.grid, 1.0), NewtonConfig{});
    ASSERT_TRUE(o.converged()) << to_string(o.status);
    EXPECT_LE(max_norm(residual_single(p, o.solution)), 1e-6);
    EXPECT_TRUE(o.certificates.positive);
    EXPECT_TRUE(o.certificates.max_on_boundary);
    EXPECT_EQ(o.certificates.apriori_ok, std::optional<bool>(true));
    // a c = 3 a^2 gives a = c/3, and the profile is a times the unit-boundary solution.
    const auto s = oracle::unit_boundary_profile(m);
    const double a = oracle::symmetric_boundary_rate(m) / 3.0;
    for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(o.solution[k], a * s[k], 1e-7) << k;
    EXPECT_NEAR(max_norm(o.solution), 0.152929, 1e-6);
}

TEST(Newton, SymmetricUnderReflection) {
    for (double lambda : {0.05, 0.5, 3.0}) {
        const auto p = quadratic(101, lambda);
        const auto o = newton_solve(p, eigen_profile(*p.grid, 0.5 / lambda), NewtonConfig{});
        ASSERT_TRUE(o.converged());
        const double norm = max_norm(o.solution);
        for (std::size_t i = 0; i < 101; ++i) EXPECT_LE(std::abs(o.solution[i] - o.solution[100 - i]), 1e-8 * norm);
        EXPECT_TRUE(o.certificates.max_on_boundary);
        const auto it = std::max_element(o.solution.begin(), o.solution.end());
        const auto idx = static_cast<std::size_t>(it - o.solution.begin());
        EXPECT_TRUE(idx == 0 || idx == 100);
    }
}

TEST(Newton, AllCertificatesOnLowLambdaBranchPoint) {
    // Solution with max about 9 at lambda = 0.05; reached from the oracle level.
    const std::size_t m = 151;
    const auto p = quadratic(m, 0.05);
    const double a = oracle::symmetric_boundary_rate(m) / 0.05;
    const auto o = newton_solve(p, eigen_profile(*p.grid, 0.9 * a), NewtonConfig{});
    ASSERT_TRUE(o.converged());
    EXPECT_NEAR(max_norm(o.solution), a, 1e-7 * a);
    EXPECT_TRUE(o.certificates.positive);
    EXPECT_TRUE(o.certificates.max_on_boundary);
    EXPECT_EQ(o.certificates.apriori_ok, std::optional<bool>(true));
    EXPECT_TRUE(o.certificates.cutoff_inactive);
}

TEST(Newton, FailsBeyondTheFold) {
    // For f = 0.1s - 0.1s^2 + s^3 the symmetric branch folds at lambda = c/0.0975.
    const std::size_t m = 101;
    const double fold = oracle::symmetric_boundary_rate(m) / 0.0975;
    ASSERT_LT(fold, 4.75);
    SingleProblem p{unit_interval_grid(m), Polynomial({0.0, 0.1, -0.1, 1.0}), 4.75, std::nullopt};
    for (double amp : {0.001, 0.01, 0.05}) {
        const auto o = newton_solve(p, eigen_profile(*p.grid, amp), NewtonConfig{});
        EXPECT_FALSE(o.converged() && o.certificates.positive) << amp;
    }
}

TEST(Newton, SystemWithEqualNonlinearitiesStaysSymmetric) {
    const std::size_t m = 101;
    SystemProblem p{unit_interval_grid(m), Polynomial({0.0, 1.0, 1.0}), Polynomial({0.0, 1.0, 1.0}), 0.3,
                    std::nullopt};
    std::vector<double> w(2 * m);
    for (std::size_t k = 0; k < m; ++k) w[k] = w[m + k] = eigenfunction_single(p.grid->coordinate(k, 0), 0.5);
    const auto o = newton_solve(p, w, tight());
    ASSERT_TRUE(o.converged());
    double diff = 0.0, nu = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        diff = std::max(diff, std::abs(o.solution[k] - o.solution[m + k]));
        nu = std::max(nu, std::abs(o.solution[k]));
    }
    EXPECT_LE(diff, 1e-8 * nu);
    // u = v reduces to the single equation: a c = 0.3 (a + a^2).
    const double c = oracle::symmetric_boundary_rate(m);
    EXPECT_NEAR(nu, c / 0.3 - 1.0, 1e-7);
    EXPECT_TRUE(o.certificates.positive);
    EXPECT_TRUE(o.certificates.max_on_boundary);
    EXPECT_FALSE(o.certificates.apriori_ok.has_value());
}

TEST(Newton, DeflationAvoidsKnownRoot) {
    const std::size_t m = 101;
    const double c = oracle::symmetric_boundary_rate(m);
    const double lambda = 4.65;
    SingleProblem p{unit_interval_grid(m), Polynomial({0.0, 0.1, -0.1, 1.0}), lambda, std::nullopt};
    // a^2 - 0.1 a + 0.1 - c/lambda = 0 has two positive roots in the fold window.
    const double disc = std::sqrt(0.01 - 4.0 * (0.1 - c / lambda));
    const double upper = 0.5 * (0.1 + disc), lower = 0.5 * (0.1 - disc);
    const auto s = oracle::unit_boundary_profile(m);
    std::vector<double> guess(m);
    for (std::size_t k = 0; k < m; ++k) guess[k] = upper * s[k] * 1.01;
    const auto first = newton_solve(p, guess, tight());
    ASSERT_TRUE(first.converged());
    EXPECT_NEAR(max_norm(first.solution), upper, 1e-7);

    Deflation d;
    d.roots = {first.solution, std::vector<double>(m, 0.0)};
    for (std::size_t k = 0; k < m; ++k) guess[k] = 0.8 * upper * s[k];
    const auto second = newton_solve(p, guess, tight(), &d);
    ASSERT_TRUE(second.converged()) << to_string(second.status);
    EXPECT_NEAR(max_norm(second.solution), lower, 1e-7);
    EXPECT_LE(max_norm(residual_single(p, second.solution)), 1e-6);
}

TEST(Certificates, InteriorMaximumIsDetected) {
    const auto p = quadratic(11, 1.0);
    std::vector<double> u(11, 1.0);
    u[5] = 2.0;
    const auto c = verify_certificates(p, u, NewtonConfig{});
    EXPECT_TRUE(c.positive);
    EXPECT_FALSE(c.max_on_boundary);
    u[5] = 1.0;
    u[3] = -1e-3;
    EXPECT_FALSE(verify_certificates(p, u, NewtonConfig{}).positive);
}

TEST(Certificates, AprioriBoundViolation) {
    const auto p = quadratic(11, 1.0);
    const double bound = apriori_C(p.f, 1.0, p.grid->h_min());
    std::vector<double> u(11, bound + 1.0);
    EXPECT_EQ(verify_certificates(p, u, NewtonConfig{}).apriori_ok, std::optional<bool>(false));
    std::fill(u.begin(), u.end(), bound);
    EXPECT_EQ(verify_certificates(p, u, NewtonConfig{}).apriori_ok, std::optional<bool>(true));
}

TEST(Certificates, CutoffActivity) {
    const auto p = with_auto_cutoff(quadratic(11, 1.0), 0.0);
    std::vector<double> u(11, 0.5);
    EXPECT_TRUE(verify_certificates(p, u, NewtonConfig{}).cutoff_inactive);
    u[0] = 2.0 * p.cutoff->upper();
    EXPECT_FALSE(verify_certificates(p, u, NewtonConfig{}).cutoff_inactive);
}

TEST(FixedPoint, RequiresCutoff) {
    EXPECT_THROW(fixed_point_solve(quadratic(11, 1.0), NewtonConfig{}), std::invalid_argument);
}

TEST(FixedPoint, ZeroStartIsAFixedPoint) {
    const auto p = with_auto_cutoff(quadratic(101, 1.0), 0.0);
    FixedPointOptions opts;
    opts.start = FixedPointStart::Zero;
    const auto o = fixed_point_solve(p, NewtonConfig{}, opts);
    ASSERT_TRUE(o.converged());
    EXPECT_EQ(max_norm(o.solution), 0.0);
    EXPECT_LE(o.iters, 1u);
}

TEST(FixedPoint, MonotoneDecreaseFromSupersolutionWithinBracket) {
    const auto p = with_auto_cutoff(quadratic(101, 1.0), 0.0);
    const auto lv = supersolution_level(p.cutoff->K, 1, p.grid->h_min());
    std::vector<double> prev;
    bool monotone = true, bracketed = true;
    FixedPointOptions opts;
    opts.observer = [&](std::size_t, std::span<const double> w) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] < 0.0 || w[k] > lv.boundary * (1 + 1e-9)) bracketed = false;
            if (!prev.empty() && w[k] > prev[k] * (1 + 1e-12)) monotone = false;
        }
        prev.assign(w.begin(), w.end());
    };
    const auto o = fixed_point_solve(p, NewtonConfig{}, opts);
    ASSERT_TRUE(o.converged()) << to_string(o.status);
    EXPECT_TRUE(monotone);
    EXPECT_TRUE(bracketed);
    EXPECT_LE(max_norm(residual_single(p, o.solution)), 1e-6);
}

TEST(FixedPoint, PositiveLowerCutoffGivesPositiveLimit) {
    const auto p = with_auto_cutoff(quadratic(41, 1.0), 0.05);
    FixedPointOptions opts;
    opts.start = FixedPointStart::Zero;
    const auto o = fixed_point_solve(p, NewtonConfig{}, opts);
    ASSERT_TRUE(o.converged()) << to_string(o.status);
    for (double v : o.solution) EXPECT_GE(v, 1e-12);
    EXPECT_LE(max_norm(residual_single(p, o.solution)), 1e-6);
}

TEST(MaxNorm, NonFiniteIsInfinite) {
    const std::vector<double> v{1.0, NAN};
    EXPECT_TRUE(std::isinf(max_norm(v)));
    EXPECT_EQ(max_norm(std::vector<double>{-3.0, 2.0}), 3.0);
}
