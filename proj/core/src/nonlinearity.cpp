#include "bifurcate/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bifurcate {

namespace {

constexpr double kBisectionRelTol = 1e-12;

// Bisection for a sign change of p on [lo, hi] (p(lo) and p(hi) differ in sign
// or one of them is zero).
double bisect(const Polynomial& p, double lo, double hi) {
    double plo = p(lo);
    if (plo == 0.0) return lo;
    if (p(hi) == 0.0) return hi;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= kBisectionRelTol * std::max(1.0, std::abs(mid))) return mid;
        const double pm = p(mid);
        if (pm == 0.0) return mid;
        if ((pm < 0.0) == (plo < 0.0)) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Cauchy bound: every real root lies in [-R, R].
double root_bound(const std::vector<double>& c) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) m = std::max(m, std::abs(c[k] / c.back()));
    return 1.0 + m;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficients must be finite");
    }
}

double Polynomial::eval(double s) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Polynomial::eval_deriv(double s) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = acc * s + static_cast<double>(k) * coeffs_[k];
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() == 1) return Polynomial();
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::minus_linear(double slope) const {
    std::vector<double> c = coeffs_;
    if (c.size() < 2) c.resize(2, 0.0);
    c[1] -= slope;
    return Polynomial(std::move(c));
}

std::vector<double> Polynomial::real_roots(double lo, double hi) const {
    if (degree() == 0) return {};
    if (degree() == 1) {
        const double r = -coeffs_[0] / coeffs_[1];
        return (r >= lo && r <= hi) ? std::vector<double>{r} : std::vector<double>{};
    }
    // Between consecutive critical points the polynomial is monotone.
    std::vector<double> knots{lo};
    for (double c : derivative().real_roots(lo, hi)) {
        if (c > knots.back()) knots.push_back(c);
    }
    if (hi > knots.back()) knots.push_back(hi);

    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double a = knots[k], b = knots[k + 1];
        const double pa = eval(a), pb = eval(b);
        if (pa == 0.0) {
            if (roots.empty() || roots.back() != a) roots.push_back(a);
        } else if (pb != 0.0 && (pa < 0.0) != (pb < 0.0)) {
            roots.push_back(bisect(*this, a, b));
        }
    }
    if (eval(knots.back()) == 0.0 && (roots.empty() || roots.back() != knots.back())) {
        roots.push_back(knots.back());
    }
    // Even-multiplicity roots touch zero at a critical point without a sign
    // change; keep critical points whose value vanishes to rounding.
    for (std::size_t k = 1; k + 1 < knots.size(); ++k) {
        const double c = knots[k];
        double scale = 0.0;
        double pw = 1.0;
        for (double ck : coeffs_) {
            scale += std::abs(ck) * pw;
            pw *= std::abs(c);
        }
        if (std::abs(eval(c)) <= 64.0 * 2.220446049250313e-16 * scale &&
            std::none_of(roots.begin(), roots.end(),
                         [&](double r) { return std::abs(r - c) <= 1e-9 * std::max(1.0, std::abs(c)); })) {
            roots.push_back(c);
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

void CutoffParams::validate() const {
    if (!(rho >= 0.0)) throw std::invalid_argument("cutoff rho must be >= 0");
    if (!(K > 0.0)) throw std::invalid_argument("cutoff K must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("cutoff lambda must be > 0");
    if (!(h_star_min > 0.0) || !(h_star_max >= h_star_min)) {
        throw std::invalid_argument("cutoff spacings must satisfy 0 < h_* <= h^*");
    }
    if (rho > 0.0 && !(rho < K / h_star_min)) throw std::invalid_argument("cutoff requires rho < K/h_*");
    if (!(lower() <= upper())) throw std::invalid_argument("cutoff requires rho/lambda <= K/(lambda h^*)");
}

double cutoff_eval(const Polynomial& f, const CutoffParams& params, double s) {
    if (s < 0.0) throw std::domain_error("cutoff flux is defined on [0, inf) only");
    const double v = f(s);
    if (v > params.upper()) return params.upper();
    if (v < params.lower()) return params.lower();
    return v;
}

double cutoff_eval_deriv(const Polynomial& f, const CutoffParams& params, double s) {
    if (s < 0.0) throw std::domain_error("cutoff flux is defined on [0, inf) only");
    const double v = f(s);
    if (v > params.upper() || v < params.lower()) return 0.0;
    return f.eval_deriv(s);
}

bool cutoff_inactive(const Polynomial& f, const CutoffParams& params, std::span<const double> u_boundary) {
    return std::all_of(u_boundary.begin(), u_boundary.end(),
                       [&](double s) { return s >= 0.0 && cutoff_eval(f, params, s) == f(s); });
}

double apriori_C(const Polynomial& f, double lambda, double h_star_min) {
    if (!f.superlinear()) throw std::invalid_argument("a-priori bound requires superlinear growth");
    if (!(lambda > 0.0) || !(h_star_min > 0.0)) {
        throw std::invalid_argument("a-priori bound requires lambda > 0 and h_* > 0");
    }
    // q(s) = f(s) - s/(lambda h_*) is positive beyond its largest real root
    // because the leading coefficient is positive.
    const Polynomial q = f.minus_linear(1.0 / (lambda * h_star_min));
    const double bound = root_bound(q.coeffs());
    const auto roots = q.real_roots(0.0, bound);
    if (roots.empty()) return 0.0;
    return std::max(0.0, roots.back());
}

SupersolutionLevels supersolution_level(double K, std::size_t dim, double h_star_min) {
    if (!(K > 0.0)) throw std::invalid_argument("supersolution requires K > 0");
    if (dim == 0 || !(h_star_min > 0.0)) throw std::invalid_argument("supersolution requires N >= 1 and h_* > 0");
    const double mk = 2.0 * static_cast<double>(dim) * K / (h_star_min * h_star_min);
    return {mk, mk + K};
}

}  // namespace bifurcate
