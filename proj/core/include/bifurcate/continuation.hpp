#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bifurcate/eigen.hpp"
#include "bifurcate/solve.hpp"

namespace bifurcate {

enum class Direction { Left, Right };

/// A * principal eigenfunction sampled on the grid. For systems with an
/// infinite eigenvalue the pair (A cosh x, A sinh x) is used instead.
struct EigenfunctionGuess {
    double amplitude = 1.0;
};
/// Every unknown set to `level`.
struct ConstantGuess {
    double level = 1.0;
};
/// A previously computed solution vector (length n, or 2n for systems).
struct StoredSolution {
    std::vector<double> values;
};
using InitialGuess = std::variant<EigenfunctionGuess, ConstantGuess, StoredSolution>;

/// Materializes a guess for the problem's grid: n values for a single
/// equation, (u; v) for a system. Eigenfunction guesses need a 1D grid.
std::vector<double> initial_vector(const SingleProblem& p, const InitialGuess& guess);
std::vector<double> initial_vector(const SystemProblem& p, const InitialGuess& guess);

struct SweepPlan {
    double lambda_start = 0.0;
    double lambda_end = 0.0;
    double delta_lambda = 1e-3;
    Direction direction = Direction::Left;
    InitialGuess guess = EigenfunctionGuess{};
    /// Keep the profile of every k-th point (first and last always kept).
    std::size_t profile_stride = 1;

    /// Throws std::invalid_argument unless delta_lambda > 0, both ends are
    /// positive, the stride is nonzero, and start/end agree with direction.
    void validate() const;
};

struct BranchPoint {
    double lambda = 0.0;
    double max_u = 0.0;
    std::optional<double> max_v;
    /// Solution values; empty when thinned by profile_stride.
    std::vector<double> profile;
    std::size_t iters = 0;
    double residual = 0.0;
    Certificates certificates;
};

enum class Termination {
    ReachedEnd,
    /// Newton failed at lambda_star; lambda_L is the last converged value.
    SolverFailed,
    /// Newton converged at `lambda` to a solution that is not positive: the
    /// branch ran into the trivial solution.
    BelowPositivityFloor,
};

std::string to_string(Termination t);

struct BranchEnd {
    Termination cause = Termination::ReachedEnd;
    std::optional<double> lambda_star;
    std::optional<double> lambda_L;
    /// Where the non-positive solution appeared (BelowPositivityFloor).
    std::optional<double> lambda;
    /// Status of the failed solve (SolverFailed).
    std::optional<SolveStatus> status;
};

struct Branch {
    std::string label;
    Direction direction = Direction::Left;
    std::vector<BranchPoint> points;
    BranchEnd end;
};

/// Thrown when the first solve of a sweep does not yield a positive solution.
class NoBranchFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Natural-parameter continuation. Solves at lambda_start from the plan's
/// guess, then steps lambda_k = lambda_start -+ k delta_lambda (computed
/// directly, not accumulated) towards lambda_end, seeding each solve with the
/// previous solution. Stops at lambda_end, at the first failed solve, or at
/// the first converged solution that is not positive.
Branch sweep(const SingleProblem& tmpl, const SweepPlan& plan, const NewtonConfig& cfg);
Branch sweep(const SystemProblem& tmpl, const SweepPlan& plan, const NewtonConfig& cfg);

enum class Regime { NoFiniteBifurcation, Subcritical, SupercriticalWithFold };

std::string to_string(Regime r);

struct TraceOptions {
    double lambda_min = 0.01;
    /// Start of the single sweep when the eigenvalue is infinite.
    double lambda0 = 3.0;
    double delta_lambda = 1e-3;
    /// Offset below the bifurcation point for the first solve; empty means
    /// max(delta_lambda, 1e-3).
    std::optional<double> delta_offset;
    InitialGuess guess = EigenfunctionGuess{};
    std::size_t profile_stride = 1;
    /// Upper limit for the right sweep that hunts the fold.
    std::optional<double> fold_search_max;
};

struct TraceResult {
    Regime regime = Regime::NoFiniteBifurcation;
    PrincipalEigenvalue lambda1 = PrincipalEigenvalue::infinite();
    /// Bifurcation point of the discretized problem (1D grids).
    std::optional<PrincipalEigenvalue> discrete_lambda1;
    /// Lambda where the first sweep starts.
    double anchor = 0.0;
    std::vector<Branch> branches;
};

/// Runs one of the three sweep protocols.
///
/// NoFiniteBifurcation: Left sweep over [lambda_min, lambda0].
/// Subcritical: Left sweep [lambda_min, anchor], then Right sweep from the
/// anchor solution towards lambda1.
/// SupercriticalWithFold: the same Left sweep, a Right sweep from the anchor
/// until Newton fails (the fold), then a Left sweep on the second branch
/// starting at lambda_L.
///
/// The anchor is min(lambda1, lambda1_h) - delta where lambda1_h is the
/// discrete bifurcation point, which lies slightly below lambda1 on coarse
/// grids. Throws std::invalid_argument when the regime does not match the
/// finiteness of lambda1.
TraceResult trace_full_curve(const SingleProblem& tmpl, Regime regime, const TraceOptions& opts,
                             const NewtonConfig& cfg);
TraceResult trace_full_curve(const SystemProblem& tmpl, Regime regime, const TraceOptions& opts,
                             const NewtonConfig& cfg);

/// Lambda at which `branch` reaches max_u = threshold, interpolating
/// linearly in log(max_u) between the bracketing points. A branch that ended
/// at BelowPositivityFloor contributes a virtual final point
/// (lambda, positivity_floor). Empty when the branch never drops below the
/// threshold.
std::optional<double> detect_bifurcation_lambda(const Branch& branch, double threshold = 1e-3,
                                                double positivity_floor = 1e-12);

}  // namespace bifurcate
