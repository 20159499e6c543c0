#pragma once

#include <utility>

#include "bifurcate/grid.hpp"

namespace bifurcate {

/// Principal eigenvalue, or the explicit "no finite bifurcation point" state
/// that arises when the linearization at zero vanishes.
class PrincipalEigenvalue {
public:
    static PrincipalEigenvalue finite(double v);
    static PrincipalEigenvalue infinite() { return PrincipalEigenvalue(); }

    bool is_finite() const { return finite_; }
    /// Throws std::logic_error when infinite.
    double value() const;

    friend bool operator==(const PrincipalEigenvalue&, const PrincipalEigenvalue&) = default;

private:
    PrincipalEigenvalue() = default;
    bool finite_ = false;
    double value_ = 0.0;
};

/// tanh(1/2) = (cosh 1 - 1)/sinh 1, the principal Steklov eigenvalue of
/// -u'' + u on (0,1).
double steklov_mu1();

/// (cosh 1 - 1)/(f'(0) sinh 1). Infinite for f'(0) = 0; throws
/// std::invalid_argument for negative or non-finite input.
PrincipalEigenvalue lambda1_single(double fprime0);

/// Both roots of f'(0)^2 sinh(1) l^2 - 2 f'(0) cosh(1) l + sinh(1) = 0,
/// ascending: (cosh 1 -+ 1)/(f'(0) sinh 1). Requires f'(0) > 0.
std::pair<double, double> solve_for_lambda_quadratic(double fprime0);

/// Left side of the quadratic above, for residual checks.
double single_characteristic(double lambda, double fprime0);

/// phi(x) = A (cosh x - tanh(1/2) sinh x). With A = 1 the maximum over [0,1]
/// is 1, attained at both endpoints.
double eigenfunction_single(double x, double amplitude = 1.0);

struct SystemEigenResult {
    PrincipalEigenvalue lambda1;
    double sigma = 0.0;    ///< f'(0) g'(0)
    double fprime0 = 0.0;
    double gprime0 = 0.0;
    double A = 1.0;        ///< phi(0)
    double C = 0.0;        ///< psi(0); zero when lambda1 is infinite
    double mu1 = 0.0;      ///< lambda1 sqrt(sigma); zero when lambda1 is infinite
};

/// Smallest positive root of sigma^2 l^4 + (2 - 4/tanh^2 1) sigma l^2 + 1 = 0,
/// solved as a quadratic in l^2 with the small root taken from Vieta's
/// product (no cancellation). Infinite when sigma = 0.
SystemEigenResult lambda1_system(double fprime0, double gprime0, double amplitude = 1.0);

/// Left side of the quartic above.
double system_characteristic(double lambda, double sigma);

/// sqrt((2/tanh^2 1 - 1)/sigma), an upper bound for the system eigenvalue.
double system_lambda1_bound(double sigma);

/// (phi(x), psi(x)) for the principal system eigenpair, scaled by `amplitude`
/// relative to the coefficients stored in `res`. Requires a finite eigenvalue.
std::pair<double, double> eigenfunction_system(double x, const SystemEigenResult& res, double amplitude = 1.0);

/// Smallest eigenvalue mu_h of the discrete Steklov problem
///   A phi = mu phi on the boundary rows, A phi = 0 on interior rows,
/// on a 1D grid, computed from the 2x2 Schur complement onto the endpoints.
/// The discrete bifurcation points are mu_h/f'(0) and mu_h/sqrt(sigma).
double discrete_steklov_mu1(const Grid& grid);

PrincipalEigenvalue discrete_lambda1_single(const Grid& grid, double fprime0);
PrincipalEigenvalue discrete_lambda1_system(const Grid& grid, double fprime0, double gprime0);

}  // namespace bifurcate
