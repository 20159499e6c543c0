#include "bifurcate/eigen.hpp"

#include <cmath>
#include <stdexcept>

#include "bifurcate/assembly.hpp"
#include "bifurcate/linalg.hpp"

namespace bifurcate {

namespace {

void require_nonnegative(double d, const char* name) {
    if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
}

double tanh1() { return std::tanh(1.0); }

}  // namespace

PrincipalEigenvalue PrincipalEigenvalue::finite(double v) {
    if (!std::isfinite(v) || !(v > 0.0)) throw std::invalid_argument("finite eigenvalue must be positive");
    PrincipalEigenvalue e;
    e.finite_ = true;
    e.value_ = v;
    return e;
}

double PrincipalEigenvalue::value() const {
    if (!finite_) throw std::logic_error("principal eigenvalue is infinite");
    return value_;
}

double steklov_mu1() { return (std::cosh(1.0) - 1.0) / std::sinh(1.0); }

PrincipalEigenvalue lambda1_single(double fprime0) {
    require_nonnegative(fprime0, "f'(0)");
    if (fprime0 == 0.0) return PrincipalEigenvalue::infinite();
    return PrincipalEigenvalue::finite((std::cosh(1.0) - 1.0) / (fprime0 * std::sinh(1.0)));
}

std::pair<double, double> solve_for_lambda_quadratic(double fprime0) {
    if (!std::isfinite(fprime0) || !(fprime0 > 0.0)) throw std::invalid_argument("f'(0) must be positive");
    const double s = std::sinh(1.0), c = std::cosh(1.0);
    return {(c - 1.0) / (fprime0 * s), (c + 1.0) / (fprime0 * s)};
}

double single_characteristic(double lambda, double fprime0) {
    return fprime0 * fprime0 * std::sinh(1.0) * lambda * lambda - 2.0 * fprime0 * std::cosh(1.0) * lambda +
           std::sinh(1.0);
}

double eigenfunction_single(double x, double amplitude) {
    return amplitude * (std::cosh(x) - steklov_mu1() * std::sinh(x));
}

SystemEigenResult lambda1_system(double fprime0, double gprime0, double amplitude) {
    require_nonnegative(fprime0, "f'(0)");
    require_nonnegative(gprime0, "g'(0)");
    SystemEigenResult r{PrincipalEigenvalue::infinite(), fprime0 * gprime0, fprime0, gprime0, amplitude, 0.0, 0.0};
    if (r.sigma == 0.0) return r;

    const double sigma = r.sigma;
    const double t2 = tanh1() * tanh1();
    // sigma^2 y^2 + b y + 1 = 0 with y = l^2 and b = (2 - 4/tanh^2 1) sigma < 0.
    const double b = (2.0 - 4.0 / t2) * sigma;
    const double disc = b * b - 4.0 * sigma * sigma;
    const double y_large = (-b + std::sqrt(disc)) / (2.0 * sigma * sigma);
    const double y_small = 1.0 / (sigma * sigma * y_large);
    const double lambda = std::sqrt(y_small);
    r.lambda1 = PrincipalEigenvalue::finite(lambda);
    r.mu1 = lambda * std::sqrt(sigma);
    r.C = amplitude * (1.0 + lambda * lambda * sigma) * tanh1() / (2.0 * lambda * fprime0);
    return r;
}

double system_characteristic(double lambda, double sigma) {
    const double l2 = lambda * lambda;
    return sigma * sigma * l2 * l2 + (2.0 - 4.0 / (tanh1() * tanh1())) * sigma * l2 + 1.0;
}

double system_lambda1_bound(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    return std::sqrt((2.0 / (tanh1() * tanh1()) - 1.0) / sigma);
}

std::pair<double, double> eigenfunction_system(double x, const SystemEigenResult& res, double amplitude) {
    const double lambda = res.lambda1.value();
    const double a = amplitude * res.A;
    const double k = (1.0 + lambda * lambda * res.sigma) * tanh1();
    const double phi = a * (std::cosh(x) - 0.5 * k * std::sinh(x));
    const double psi = a * (k / (2.0 * lambda * res.fprime0) * std::cosh(x) - lambda * res.gprime0 * std::sinh(x));
    return {phi, psi};
}

double discrete_steklov_mu1(const Grid& grid) {
    if (grid.dim() != 1) throw std::invalid_argument("discrete Steklov eigenvalue is implemented for 1D grids");
    const std::size_t m = grid.num_nodes();
    const SparseMatrix a = assemble_A(grid);
    // Interior block A_ii and the two boundary columns A_ib.
    const std::size_t ni = m - 2;
    SparseMatrix aii(ni);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        for (const auto& e : a.row(i)) {
            if (e.col >= 1 && e.col + 1 < m) aii.set(i - 1, e.col - 1, e.value);
        }
    }
    const BandedLU lu(aii);
    const std::size_t bnd[2] = {0, m - 1};
    double s[2][2];
    for (int c = 0; c < 2; ++c) {
        std::vector<double> col(ni, 0.0);
        for (std::size_t i = 1; i + 1 < m; ++i) col[i - 1] = a.at(i, bnd[c]);
        const auto y = lu.solve(col);  // A_ii^{-1} A_ib e_c
        for (int r = 0; r < 2; ++r) {
            double acc = a.at(bnd[r], bnd[c]);
            for (const auto& e : a.row(bnd[r])) {
                if (e.col >= 1 && e.col + 1 < m) acc -= e.value * y[e.col - 1];
            }
            s[r][c] = acc;
        }
    }
    const double tr = s[0][0] + s[1][1];
    const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return 0.5 * tr - disc;
}

PrincipalEigenvalue discrete_lambda1_single(const Grid& grid, double fprime0) {
    require_nonnegative(fprime0, "f'(0)");
    if (fprime0 == 0.0) return PrincipalEigenvalue::infinite();
    return PrincipalEigenvalue::finite(discrete_steklov_mu1(grid) / fprime0);
}

PrincipalEigenvalue discrete_lambda1_system(const Grid& grid, double fprime0, double gprime0) {
    require_nonnegative(fprime0, "f'(0)");
    require_nonnegative(gprime0, "g'(0)");
    const double sigma = fprime0 * gprime0;
    if (sigma == 0.0) return PrincipalEigenvalue::infinite();
    return PrincipalEigenvalue::finite(discrete_steklov_mu1(grid) / std::sqrt(sigma));
}

}  // namespace bifurcate
