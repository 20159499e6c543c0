#include "bifurcate/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bifurcate {

namespace {

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void check_cutoff(const CutoffParams& c, double lambda, const Grid& grid, const char* which) {
    c.validate();
    if (!same_value(c.lambda, lambda)) {
        throw std::invalid_argument(std::string(which) + " cutoff lambda differs from problem lambda");
    }
    if (!same_value(c.h_star_max, grid.h_max()) || !same_value(c.h_star_min, grid.h_min())) {
        throw std::invalid_argument(std::string(which) + " cutoff spacings differ from the grid");
    }
}

// Flat index of the neighbour one step inside along the normal axis.
std::size_t inward_neighbor(const Grid& grid, std::size_t k, const NodeClass& nc) {
    const std::size_t axis = nc.normal_axis();
    return *grid.neighbor(k, axis, -nc.outward_normal[axis]);
}

void check_length(std::size_t got, std::size_t want) {
    if (got != want) {
        throw std::invalid_argument("iterate length " + std::to_string(got) + " does not match " +
                                    std::to_string(want) + " unknowns");
    }
}

}  // namespace

void SingleProblem::validate() const {
    if (!grid) throw std::invalid_argument("problem requires a grid");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (cutoff) check_cutoff(*cutoff, lambda, *grid, "f");
}

void SystemProblem::validate() const {
    if (!grid) throw std::invalid_argument("problem requires a grid");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (cutoffs) {
        check_cutoff(cutoffs->first, lambda, *grid, "f");
        check_cutoff(cutoffs->second, lambda, *grid, "g");
    }
}

SparseMatrix assemble_A(const Grid& grid) {
    const std::size_t n = grid.num_nodes();
    SparseMatrix a(n);
    for (std::size_t k = 0; k < n; ++k) {
        const NodeClass nc = grid.classify(k);
        switch (nc.tag) {
            case NodeTag::Interior: {
                double diag = 1.0;
                for (std::size_t i = 0; i < grid.dim(); ++i) {
                    const double w = 1.0 / (grid.spacing(i) * grid.spacing(i));
                    diag += 2.0 * w;
                    a.add(k, *grid.neighbor(k, i, -1), -w);
                    a.add(k, *grid.neighbor(k, i, +1), -w);
                }
                a.add(k, k, diag);
                break;
            }
            case NodeTag::SmoothBoundary: {
                const double inv_h = 1.0 / grid.spacing(nc.normal_axis());
                a.add(k, k, inv_h);
                a.add(k, inward_neighbor(grid, k, nc), -inv_h);
                break;
            }
            case NodeTag::Corner: {
                std::size_t extremal = 0;
                for (int s : nc.outward_normal) extremal += (s != 0);
                const double w = 1.0 / static_cast<double>(extremal);
                a.add(k, k, 1.0);
                for (std::size_t i = 0; i < grid.dim(); ++i) {
                    if (nc.outward_normal[i] != 0) a.add(k, *grid.neighbor(k, i, -nc.outward_normal[i]), -w);
                }
                break;
            }
        }
    }
    return a;
}

double boundary_flux(const Polynomial& f, const std::optional<CutoffParams>& cutoff, double lambda, double s) {
    return lambda * (cutoff ? cutoff_eval(f, *cutoff, s) : f(s));
}

double boundary_flux_deriv(const Polynomial& f, const std::optional<CutoffParams>& cutoff, double lambda, double s) {
    return lambda * (cutoff ? cutoff_eval_deriv(f, *cutoff, s) : f.eval_deriv(s));
}

std::vector<double> residual_single(const SingleProblem& p, std::span<const double> u) {
    p.validate();
    const Grid& grid = *p.grid;
    check_length(u.size(), grid.num_nodes());
    auto r = assemble_A(grid).multiply(u);
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) {
        r[k] -= boundary_flux(p.f, p.cutoff, p.lambda, u[k]);
    }
    return r;
}

std::vector<double> residual_single(const SingleProblem& p, const GridFunction& u) {
    if (&u.grid() != p.grid.get() && u.grid().counts() != p.grid->counts()) {
        throw std::invalid_argument("grid function lives on a different grid");
    }
    return residual_single(p, u.values());
}

SparseMatrix jacobian_single(const SingleProblem& p, std::span<const double> u) {
    p.validate();
    const Grid& grid = *p.grid;
    check_length(u.size(), grid.num_nodes());
    SparseMatrix j = assemble_A(grid);
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) {
        j.add(k, k, -boundary_flux_deriv(p.f, p.cutoff, p.lambda, u[k]));
    }
    return j;
}

std::vector<double> residual_system(const SystemProblem& p, std::span<const double> w) {
    p.validate();
    const Grid& grid = *p.grid;
    const std::size_t n = grid.num_nodes();
    check_length(w.size(), 2 * n);
    const auto u = w.subspan(0, n);
    const auto v = w.subspan(n, n);
    const SparseMatrix a = assemble_A(grid);
    const auto au = a.multiply(u);
    const auto av = a.multiply(v);
    std::vector<double> r(2 * n);
    std::copy(au.begin(), au.end(), r.begin());
    std::copy(av.begin(), av.end(), r.begin() + static_cast<std::ptrdiff_t>(n));
    std::optional<CutoffParams> cf, cg;
    if (p.cutoffs) {
        cf = p.cutoffs->first;
        cg = p.cutoffs->second;
    }
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) {
        r[k] -= boundary_flux(p.f, cf, p.lambda, v[k]);
        r[n + k] -= boundary_flux(p.g, cg, p.lambda, u[k]);
    }
    return r;
}

SparseMatrix jacobian_system(const SystemProblem& p, std::span<const double> w) {
    p.validate();
    const Grid& grid = *p.grid;
    const std::size_t n = grid.num_nodes();
    check_length(w.size(), 2 * n);
    const SparseMatrix a = assemble_A(grid);
    SparseMatrix j(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& e : a.row(k)) {
            j.add(k, e.col, e.value);
            j.add(n + k, n + e.col, e.value);
        }
    }
    std::optional<CutoffParams> cf, cg;
    if (p.cutoffs) {
        cf = p.cutoffs->first;
        cg = p.cutoffs->second;
    }
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) {
        j.add(k, n + k, -boundary_flux_deriv(p.f, cf, p.lambda, w[n + k]));
        j.add(n + k, k, -boundary_flux_deriv(p.g, cg, p.lambda, w[k]));
    }
    return j;
}

std::vector<double> fixed_point_rhs(const SingleProblem& p, std::span<const double> v) {
    p.validate();
    if (!p.cutoff) throw std::invalid_argument("fixed-point map requires cutoff parameters");
    const Grid& grid = *p.grid;
    check_length(v.size(), grid.num_nodes());
    std::vector<double> b(v.size(), 0.0);
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) {
        b[k] = boundary_flux(p.f, p.cutoff, p.lambda, v[k]);
    }
    return b;
}

std::vector<std::size_t> system_ordering(const Grid& grid) { return interleave_ordering(2, grid.num_nodes()); }

}  // namespace bifurcate
