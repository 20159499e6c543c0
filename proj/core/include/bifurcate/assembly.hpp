#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bifurcate/grid.hpp"
#include "bifurcate/linalg.hpp"
#include "bifurcate/nonlinearity.hpp"

namespace bifurcate {

/// -Delta_h u + u = 0 inside, grad*_h u . n - lambda f(u) = 0 on the smooth
/// boundary. When `cutoff` is set, f is replaced by its clamped variant.
struct SingleProblem {
    std::shared_ptr<const Grid> grid;
    Polynomial f;
    double lambda = 1.0;
    std::optional<CutoffParams> cutoff;

    /// Throws std::invalid_argument on a missing grid, lambda <= 0, or cutoff
    /// parameters whose lambda or spacings disagree with the problem.
    void validate() const;
    std::size_t num_unknowns() const { return grid->num_nodes(); }
};

/// Coupled pair: the u-equation carries lambda f(v) on the boundary and the
/// v-equation carries lambda g(u). Unknowns are concatenated as w = (u; v).
struct SystemProblem {
    std::shared_ptr<const Grid> grid;
    Polynomial f;
    Polynomial g;
    double lambda = 1.0;
    /// (cutoff applied to f, cutoff applied to g)
    std::optional<std::pair<CutoffParams, CutoffParams>> cutoffs;

    void validate() const;
    std::size_t num_unknowns() const { return 2 * grid->num_nodes(); }
};

/// The linear operator shared by every residual: interior rows -Delta_h + I,
/// smooth-boundary rows grad*_h . n (one-sided difference along the normal
/// axis). Corner rows in N >= 2 close the system with
///   u(corner) - mean of its inward neighbours along each extremal axis = 0.
///
/// Row and column order follow the grid's flat node order. Every off-diagonal
/// entry is <= 0.
SparseMatrix assemble_A(const Grid& grid);

/// Boundary flux lambda f(s), or lambda f~(s) when a cutoff is supplied.
double boundary_flux(const Polynomial& f, const std::optional<CutoffParams>& cutoff, double lambda, double s);
double boundary_flux_deriv(const Polynomial& f, const std::optional<CutoffParams>& cutoff, double lambda, double s);

std::vector<double> residual_single(const SingleProblem& p, std::span<const double> u);
std::vector<double> residual_single(const SingleProblem& p, const GridFunction& u);
SparseMatrix jacobian_single(const SingleProblem& p, std::span<const double> u);

std::vector<double> residual_system(const SystemProblem& p, std::span<const double> w);
SparseMatrix jacobian_system(const SystemProblem& p, std::span<const double> w);

/// Right-hand side b(v) of the fixed-point map A w = b(v): zero on interior
/// and corner rows, lambda f~(v) on smooth-boundary rows.
std::vector<double> fixed_point_rhs(const SingleProblem& p, std::span<const double> v);

/// Unknown ordering that keeps the system Jacobian banded (u and v values of
/// each node adjacent).
std::vector<std::size_t> system_ordering(const Grid& grid);

}  // namespace bifurcate
