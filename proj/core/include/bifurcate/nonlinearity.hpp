#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bifurcate {

/// Real polynomial f(s) = sum_k c_k s^k, coefficients in ascending degree.
///
/// Boundary fluxes are polynomials throughout: every experiment uses one, the
/// derivative is exact, and growth metadata (p = degree, b = leading
/// coefficient) is read off directly.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    /// Trailing zero coefficients are dropped; an empty list is the zero polynomial.
    explicit Polynomial(std::vector<double> coeffs);

    double operator()(double s) const { return eval(s); }
    double eval(double s) const;
    double eval_deriv(double s) const;
    double derivative_at_zero() const { return coeffs_.size() > 1 ? coeffs_[1] : 0.0; }

    std::size_t degree() const { return coeffs_.size() - 1; }
    double leading() const { return coeffs_.back(); }
    const std::vector<double>& coeffs() const { return coeffs_; }

    Polynomial derivative() const;
    /// f(s) - slope * s
    Polynomial minus_linear(double slope) const;

    /// True when degree >= 2 with a positive leading coefficient, so f(s)/s -> infinity.
    bool superlinear() const { return degree() >= 2 && leading() > 0.0; }

    /// Real roots inside [lo, hi], ascending. Isolated through the critical
    /// points of the derivative, then refined by bisection; roots of even
    /// multiplicity are reported at the extremum.
    std::vector<double> real_roots(double lo, double hi) const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<double> coeffs_;
};

/// Cutoff band for the modified flux:
///   f~(s) = K/(lambda h*)  if f(s) > K/(lambda h*)
///         = rho/lambda     if f(s) < rho/lambda
///         = f(s)           otherwise.
struct CutoffParams {
    double rho = 0.0;
    double K = 1.0;
    double lambda = 1.0;
    double h_star_max = 1.0;
    double h_star_min = 1.0;

    double lower() const { return rho / lambda; }
    double upper() const { return K / (lambda * h_star_max); }

    /// Throws std::invalid_argument unless rho >= 0, K > 0, lambda > 0,
    /// 0 < h_* <= h^*, rho < K/h_* (when rho > 0) and rho/lambda <= K/(lambda h^*).
    void validate() const;
};

/// Throws std::domain_error for s < 0; f is only defined on [0, inf).
double cutoff_eval(const Polynomial& f, const CutoffParams& params, double s);
/// d f~/ds: f'(s) inside the band, 0 on clamped branches.
double cutoff_eval_deriv(const Polynomial& f, const CutoffParams& params, double s);

/// True iff f(s) == f~(s) at every supplied boundary value, i.e. a solution
/// of the cutoff problem also solves the unmodified one.
bool cutoff_inactive(const Polynomial& f, const CutoffParams& params, std::span<const double> u_boundary);

/// Smallest C >= 0 with f(s)/s > 1/(lambda h_*) for every s > C.
///
/// C is the largest point of (0, inf) where f(s) - s/(lambda h_*) <= 0,
/// located by bisection to relative tolerance 1e-12. Throws
/// std::invalid_argument unless f is superlinear and lambda, h_* > 0.
double apriori_C(const Polynomial& f, double lambda, double h_star_min);

/// Levels of the constant supersolution: M_K = 2 N K / h_*^2 in the interior
/// and M_K + K on the boundary.
struct SupersolutionLevels {
    double interior;
    double boundary;
};

SupersolutionLevels supersolution_level(double K, std::size_t dim, double h_star_min);

}  // namespace bifurcate
