#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bifurcate/assembly.hpp"

namespace bifurcate {

struct NewtonConfig {
    double residual_tol = 1e-6;
    double step_tol = 1e-6;
    std::size_t max_iters = 100;
    double backtrack_factor = 0.5;
    double min_step_fraction = 0x1p-20;
    double positivity_floor = 1e-12;

    /// Throws std::invalid_argument when a tolerance is not positive,
    /// max_iters is zero, or the backtracking parameters leave (0, 1).
    void validate() const;
};

enum class SolveStatus {
    Converged,
    Diverged,
    MaxIters,
    LineSearchFailed,
    /// The accepted step fell below step_tol while the residual stayed above
    /// residual_tol and shrank by less than half.
    Stalled,
};

std::string_view to_string(SolveStatus s);

struct Certificates {
    /// Every node value is at least the positivity floor.
    bool positive = false;
    /// The largest node value is attained at a smooth-boundary node.
    bool max_on_boundary = false;
    /// max u <= apriori_C + 1e-8. Empty when the bound does not apply
    /// (coupled systems, or f without superlinear growth).
    std::optional<bool> apriori_ok;
    /// f(u) == f~(u) at every boundary node; true when no cutoff is used.
    bool cutoff_inactive = true;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Diverged;
    /// Final iterate: n values for a single equation, (u; v) for a system.
    std::vector<double> solution;
    std::size_t iters = 0;
    double final_residual_norm = 0.0;
    Certificates certificates;

    bool converged() const { return status == SolveStatus::Converged; }
};

/// Deflation of known solutions r_j. Newton is applied to
///   G(x) = m(x) F(x),  m(x) = prod_j (||x - r_j||_2^{-power} + shift),
/// which pushes iterates away from the listed roots.
struct Deflation {
    std::vector<std::vector<double>> roots;
    double power = 2.0;
    double shift = 1.0;
};

/// Damped Newton on F(u) = 0. The step is halved (by backtrack_factor) until
/// the max-norm of the residual strictly decreases; trial points where the
/// flux is undefined count as rejections. Stops with Converged once
/// ||F||_inf <= residual_tol and the next full Newton correction is at most
/// step_tol in max-norm; an exactly zero residual converges immediately. If
/// the residual is already within tolerance but the correction cannot be
/// taken (singular Jacobian, rejected line search, iteration limit), the
/// iterate is still reported as Converged. Non-convergence is reported
/// through `status`, never thrown. Certificates are filled for Converged
/// outcomes.
SolveOutcome newton_solve(const SingleProblem& p, std::span<const double> initial, const NewtonConfig& cfg,
                          const Deflation* deflation = nullptr);
SolveOutcome newton_solve(const SystemProblem& p, std::span<const double> initial, const NewtonConfig& cfg,
                          const Deflation* deflation = nullptr);

/// Where the monotone iteration starts.
enum class FixedPointStart {
    /// Constant supersolution: M_K inside, M_K + K on the boundary.
    Supersolution,
    /// The zero subsolution.
    Zero,
};

struct FixedPointOptions {
    FixedPointStart start = FixedPointStart::Supersolution;
    std::size_t max_iters = 10000;
    /// Called with (iteration index, iterate) for the start value (index 0)
    /// and every later iterate.
    std::function<void(std::size_t, std::span<const double>)> observer;
};

/// Thrown when a fixed-point iterate leaves the bracket [0, ū_h].
class BracketViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Iterates w_{k+1} = A^{-1} b(w_k) for a problem carrying cutoff parameters.
/// Stops once successive iterates differ by at most step_tol and the cutoff
/// residual is at most residual_tol. Every iterate is checked against the
/// bracket [0, M_K + K]; a violation throws BracketViolation.
SolveOutcome fixed_point_solve(const SingleProblem& p, const NewtonConfig& cfg, const FixedPointOptions& opts = {});

Certificates verify_certificates(const SingleProblem& p, std::span<const double> u, const NewtonConfig& cfg);
/// Positivity and boundary maximum must hold for both components.
Certificates verify_certificates(const SystemProblem& p, std::span<const double> w, const NewtonConfig& cfg);

/// Max-norm of a vector.
double max_norm(std::span<const double> v);

}  // namespace bifurcate
