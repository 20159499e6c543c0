#include "bifurcate/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace bifurcate {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::ReachedEnd: return "ReachedEnd";
        case Termination::SolverFailed: return "SolverFailed";
        case Termination::BelowPositivityFloor: return "BelowPositivityFloor";
    }
    return "Unknown";
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::NoFiniteBifurcation: return "NoFiniteBifurcation";
        case Regime::Subcritical: return "Subcritical";
        case Regime::SupercriticalWithFold: return "SupercriticalWithFold";
    }
    return "Unknown";
}

void SweepPlan::validate() const {
    if (!(delta_lambda > 0.0) || !std::isfinite(delta_lambda)) throw std::invalid_argument("delta_lambda must be positive");
    if (!(lambda_start > 0.0) || !(lambda_end > 0.0)) throw std::invalid_argument("sweep endpoints must be positive");
    if (profile_stride == 0) throw std::invalid_argument("profile_stride must be at least 1");
    if (direction == Direction::Left && lambda_end > lambda_start) {
        throw std::invalid_argument("left sweep requires lambda_end <= lambda_start");
    }
    if (direction == Direction::Right && lambda_end < lambda_start) {
        throw std::invalid_argument("right sweep requires lambda_end >= lambda_start");
    }
}

namespace {

std::vector<double> eigen_guess(const SingleProblem& p, double amplitude) {
    const Grid& g = *p.grid;
    std::vector<double> u(g.num_nodes());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = eigenfunction_single(g.coordinate(k, 0), amplitude);
    return u;
}

std::vector<double> eigen_guess(const SystemProblem& p, double amplitude) {
    const Grid& g = *p.grid;
    const std::size_t n = g.num_nodes();
    const auto res = lambda1_system(p.f.derivative_at_zero(), p.g.derivative_at_zero());
    std::vector<double> w(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = g.coordinate(k, 0);
        if (res.lambda1.is_finite()) {
            std::tie(w[k], w[n + k]) = eigenfunction_system(x, res, amplitude);
        } else {
            w[k] = amplitude * std::cosh(x);
            w[n + k] = amplitude * std::sinh(x);
        }
    }
    return w;
}

// Cutoff parameters carry their own lambda, which must follow the problem's.
void set_lambda(SingleProblem& p, double lambda) {
    p.lambda = lambda;
    if (p.cutoff) p.cutoff->lambda = lambda;
}

void set_lambda(SystemProblem& p, double lambda) {
    p.lambda = lambda;
    if (p.cutoffs) {
        p.cutoffs->first.lambda = lambda;
        p.cutoffs->second.lambda = lambda;
    }
}

template <typename Problem>
std::vector<double> make_guess(const Problem& p, const InitialGuess& guess) {
    const std::size_t n = p.num_unknowns();
    if (const auto* e = std::get_if<EigenfunctionGuess>(&guess)) {
        if (p.grid->dim() != 1) throw std::invalid_argument("eigenfunction guesses need a 1D grid");
        return eigen_guess(p, e->amplitude);
    }
    if (const auto* c = std::get_if<ConstantGuess>(&guess)) return std::vector<double>(n, c->level);
    const auto& stored = std::get<StoredSolution>(guess).values;
    if (stored.size() != n) throw std::invalid_argument("stored solution has wrong length");
    return stored;
}

BranchPoint make_point(const SingleProblem&, double lambda, const SolveOutcome& o) {
    BranchPoint bp;
    bp.lambda = lambda;
    bp.max_u = max_norm(o.solution);
    bp.profile = o.solution;
    bp.iters = o.iters;
    bp.residual = o.final_residual_norm;
    bp.certificates = o.certificates;
    return bp;
}

BranchPoint make_point(const SystemProblem& p, double lambda, const SolveOutcome& o) {
    const std::size_t n = p.grid->num_nodes();
    BranchPoint bp;
    bp.lambda = lambda;
    bp.max_u = max_norm(std::span<const double>(o.solution).subspan(0, n));
    bp.max_v = max_norm(std::span<const double>(o.solution).subspan(n, n));
    bp.profile = o.solution;
    bp.iters = o.iters;
    bp.residual = o.final_residual_norm;
    bp.certificates = o.certificates;
    return bp;
}

// lambda_k = start -+ k delta for k = 0..K, with the final value snapped to
// (or extended by) the end point.
std::vector<double> lambda_schedule(const SweepPlan& plan) {
    const double sign = plan.direction == Direction::Left ? -1.0 : 1.0;
    const double span = std::abs(plan.lambda_end - plan.lambda_start);
    const auto steps = static_cast<std::size_t>(std::floor(span / plan.delta_lambda + 1e-9));
    std::vector<double> out;
    out.reserve(steps + 2);
    for (std::size_t k = 0; k <= steps; ++k) out.push_back(plan.lambda_start + sign * static_cast<double>(k) * plan.delta_lambda);
    const double tol = 1e-9 * std::max(1.0, std::abs(plan.lambda_end));
    if (std::abs(out.back() - plan.lambda_end) <= tol) {
        out.back() = plan.lambda_end;
    } else {
        out.push_back(plan.lambda_end);
    }
    if (out.size() >= 2 && out[0] == out[1]) out.erase(out.begin() + 1);
    return out;
}

std::vector<double> residual_of(const SingleProblem& p, std::span<const double> u) { return residual_single(p, u); }
std::vector<double> residual_of(const SystemProblem& p, std::span<const double> w) { return residual_system(p, w); }

BandedLU factor_jacobian(const SingleProblem& p, std::span<const double> u) { return BandedLU(jacobian_single(p, u)); }
BandedLU factor_jacobian(const SystemProblem& p, std::span<const double> w) {
    return BandedLU(jacobian_system(p, w), system_ordering(*p.grid));
}

// Linear predictor from the solution u at `from`: u - J(u)^{-1} (F(u; to) - F(u; from)).
// Used only when seeding with the previous solution fails, which happens close to
// a bifurcation from the trivial solution, where u changes by O(1) relative to
// itself over one lambda step.
template <typename Problem>
std::optional<std::vector<double>> predict(const Problem& from, std::span<const double> u, double to) {
    Problem target = from;
    set_lambda(target, to);
    try {
        const auto f0 = residual_of(from, u);
        const auto f1 = residual_of(target, u);
        std::vector<double> rhs(u.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = f0[i] - f1[i];
        auto du = factor_jacobian(from, u).solve(rhs);
        for (std::size_t i = 0; i < du.size(); ++i) du[i] += u[i];
        if (!std::isfinite(max_norm(du))) return std::nullopt;
        return du;
    } catch (const SingularMatrixError&) {
        return std::nullopt;
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
}

// Not positive, or no farther from u = 0 than Newton can resolve: the branch
// has reached the trivial solution.
bool is_trivial(const SolveOutcome& o, const NewtonConfig& cfg) {
    return !o.certificates.positive || max_norm(o.solution) <= cfg.step_tol;
}

template <typename Problem>
Branch sweep_impl(const Problem& tmpl, const SweepPlan& plan, const NewtonConfig& cfg) {
    plan.validate();
    cfg.validate();
    const auto lambdas = lambda_schedule(plan);
    Branch branch;
    branch.direction = plan.direction;
    Problem p = tmpl;
    std::vector<double> current = make_guess(p, plan.guess);

    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        Problem previous = p;
        set_lambda(p, lambdas[k]);
        SolveOutcome o = newton_solve(p, current, cfg);
        if (k > 0 && (!o.converged() || is_trivial(o, cfg))) {
            if (const auto guess = predict(previous, current, lambdas[k])) {
                SolveOutcome retry = newton_solve(p, *guess, cfg);
                if (retry.converged() && !is_trivial(retry, cfg)) o = std::move(retry);
            }
        }
        if (k == 0 && (!o.converged() || is_trivial(o, cfg))) {
            throw NoBranchFound("no branch found from given initial guess at lambda = " + std::to_string(lambdas[k]) +
                                " (" + (o.converged() ? std::string("solution not positive")
                                                      : std::string(to_string(o.status))) +
                                ")");
        }
        if (!o.converged()) {
            branch.end.cause = Termination::SolverFailed;
            branch.end.lambda_star = lambdas[k];
            branch.end.lambda_L = branch.points.back().lambda;
            branch.end.status = o.status;
            break;
        }
        if (is_trivial(o, cfg)) {
            branch.end.cause = Termination::BelowPositivityFloor;
            branch.end.lambda = lambdas[k];
            branch.end.lambda_L = branch.points.back().lambda;
            break;
        }
        branch.points.push_back(make_point(p, lambdas[k], o));
        current = o.solution;
    }
    for (std::size_t k = 1; k + 1 < branch.points.size(); ++k) {
        if (k % plan.profile_stride != 0) {
            branch.points[k].profile.clear();
            branch.points[k].profile.shrink_to_fit();
        }
    }
    return branch;
}

PrincipalEigenvalue continuous_lambda1(const SingleProblem& p) { return lambda1_single(p.f.derivative_at_zero()); }
PrincipalEigenvalue continuous_lambda1(const SystemProblem& p) {
    return lambda1_system(p.f.derivative_at_zero(), p.g.derivative_at_zero()).lambda1;
}
PrincipalEigenvalue grid_lambda1(const SingleProblem& p) {
    return discrete_lambda1_single(*p.grid, p.f.derivative_at_zero());
}
PrincipalEigenvalue grid_lambda1(const SystemProblem& p) {
    return discrete_lambda1_system(*p.grid, p.f.derivative_at_zero(), p.g.derivative_at_zero());
}

// Finds a positive solution at lambda_L other than u_L. Natural continuation
// from u_L would only retrace the branch it came from, so Newton is run on
// the deflated residual (u_L and the trivial solution removed), seeded by
// extrapolating the last secant beyond the fold.
template <typename Problem>
std::optional<std::vector<double>> second_branch_seed(const Problem& tmpl, double lambda_L,
                                                      const std::vector<double>& u_L,
                                                      const std::vector<double>& u_prev, const NewtonConfig& cfg) {
    Problem p = tmpl;
    set_lambda(p, lambda_L);
    Deflation d;
    d.roots = {u_L, std::vector<double>(u_L.size(), 0.0)};
    std::vector<std::vector<double>> guesses;
    for (double c : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        std::vector<double> g(u_L.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = u_L[i] + c * (u_L[i] - u_prev[i]);
        guesses.push_back(std::move(g));
    }
    std::vector<double> half(u_L);
    for (double& x : half) x *= 0.5;
    guesses.push_back(std::move(half));

    const double scale = 1.0 + max_norm(u_L);
    for (const auto& g : guesses) {
        const auto o = newton_solve(p, g, cfg, &d);
        if (!o.converged() || is_trivial(o, cfg)) continue;
        double diff = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(o.solution[i] - u_L[i]));
        if (diff > 1e-6 * scale) return o.solution;
    }
    return std::nullopt;
}

template <typename Problem>
TraceResult trace_impl(const Problem& tmpl, Regime regime, const TraceOptions& opts, const NewtonConfig& cfg) {
    TraceResult out;
    out.regime = regime;
    out.lambda1 = continuous_lambda1(tmpl);
    const bool finite = out.lambda1.is_finite();
    if ((regime == Regime::NoFiniteBifurcation) == finite) {
        throw std::invalid_argument("regime " + to_string(regime) + " is inconsistent with lambda1 being " +
                                    (finite ? "finite" : "infinite"));
    }
    if (tmpl.grid->dim() == 1) out.discrete_lambda1 = grid_lambda1(tmpl);

    auto plan_for = [&](double start, double end, Direction dir, InitialGuess guess) {
        SweepPlan plan;
        plan.lambda_start = start;
        plan.lambda_end = end;
        plan.delta_lambda = opts.delta_lambda;
        plan.direction = dir;
        plan.guess = std::move(guess);
        plan.profile_stride = opts.profile_stride;
        return plan;
    };

    if (!finite) {
        out.anchor = opts.lambda0;
        Branch b = sweep_impl(tmpl, plan_for(opts.lambda0, opts.lambda_min, Direction::Left, opts.guess), cfg);
        b.label = "left";
        out.branches.push_back(std::move(b));
        return out;
    }

    const double delta = opts.delta_offset.value_or(std::max(opts.delta_lambda, 1e-3));
    double bif = out.lambda1.value();
    if (out.discrete_lambda1 && out.discrete_lambda1->is_finite()) bif = std::min(bif, out.discrete_lambda1->value());
    out.anchor = bif - delta;
    if (!(out.anchor > opts.lambda_min)) throw std::invalid_argument("bifurcation point lies below lambda_min");

    Branch left = sweep_impl(tmpl, plan_for(out.anchor, opts.lambda_min, Direction::Left, opts.guess), cfg);
    left.label = "left";
    const StoredSolution anchor_solution{left.points.front().profile};
    out.branches.push_back(std::move(left));

    if (regime == Regime::Subcritical) {
        Branch right = sweep_impl(tmpl, plan_for(out.anchor, out.lambda1.value(), Direction::Right, anchor_solution), cfg);
        right.label = "right";
        out.branches.push_back(std::move(right));
        return out;
    }

    const double search_max = opts.fold_search_max.value_or(2.0 * out.lambda1.value());
    Branch right = sweep_impl(tmpl, plan_for(out.anchor, search_max, Direction::Right, anchor_solution), cfg);
    right.label = "right";
    const bool fold_seen = right.end.cause != Termination::ReachedEnd && right.points.size() >= 2;
    std::optional<std::vector<double>> seed;
    double lambda_L = 0.0;
    if (fold_seen) {
        // Sweeps keep the last profile; the one before it may be thinned.
        const auto& last = right.points.back();
        lambda_L = last.lambda;
        Problem p = tmpl;
        std::vector<double> prev = right.points[right.points.size() - 2].profile;
        if (prev.empty()) {
            set_lambda(p, right.points[right.points.size() - 2].lambda);
            prev = newton_solve(p, last.profile, cfg).solution;
        }
        seed = second_branch_seed(tmpl, lambda_L, last.profile, prev, cfg);
    }
    out.branches.push_back(std::move(right));
    if (seed) {
        Branch back = sweep_impl(tmpl, plan_for(lambda_L, out.anchor, Direction::Left, StoredSolution{*seed}), cfg);
        back.label = "fold-return";
        out.branches.push_back(std::move(back));
    }
    return out;
}

}  // namespace

std::vector<double> initial_vector(const SingleProblem& p, const InitialGuess& guess) { return make_guess(p, guess); }
std::vector<double> initial_vector(const SystemProblem& p, const InitialGuess& guess) { return make_guess(p, guess); }

Branch sweep(const SingleProblem& tmpl, const SweepPlan& plan, const NewtonConfig& cfg) {
    return sweep_impl(tmpl, plan, cfg);
}

Branch sweep(const SystemProblem& tmpl, const SweepPlan& plan, const NewtonConfig& cfg) {
    return sweep_impl(tmpl, plan, cfg);
}

TraceResult trace_full_curve(const SingleProblem& tmpl, Regime regime, const TraceOptions& opts,
                             const NewtonConfig& cfg) {
    return trace_impl(tmpl, regime, opts, cfg);
}

TraceResult trace_full_curve(const SystemProblem& tmpl, Regime regime, const TraceOptions& opts,
                             const NewtonConfig& cfg) {
    return trace_impl(tmpl, regime, opts, cfg);
}

std::optional<double> detect_bifurcation_lambda(const Branch& branch, double threshold, double positivity_floor) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : branch.points) pts.emplace_back(p.lambda, p.max_u);
    if (branch.end.cause == Termination::BelowPositivityFloor && branch.end.lambda) {
        pts.emplace_back(*branch.end.lambda, std::max(positivity_floor, 1e-300));
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (pts[k].second >= threshold) continue;
        if (k == 0) return pts[0].first;
        const auto [l0, m0] = pts[k - 1];
        const auto [l1, m1] = pts[k];
        const double a = std::log(m0), b = std::log(std::max(m1, 1e-300));
        const double t = (std::log(threshold) - a) / (b - a);
        return l0 + t * (l1 - l0);
    }
    return std::nullopt;
}

}  // namespace bifurcate
