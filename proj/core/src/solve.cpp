#include "bifurcate/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bifurcate {

void NewtonConfig::validate() const {
    if (!(residual_tol > 0.0) || !(step_tol > 0.0)) throw std::invalid_argument("newton tolerances must be positive");
    if (max_iters == 0) throw std::invalid_argument("newton max_iters must be at least 1");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw std::invalid_argument("newton backtrack_factor must lie in (0, 1)");
    }
    if (!(min_step_fraction > 0.0 && min_step_fraction < 1.0)) {
        throw std::invalid_argument("newton min_step_fraction must lie in (0, 1)");
    }
    if (!(positivity_floor >= 0.0)) throw std::invalid_argument("positivity_floor must be nonnegative");
}

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::Diverged: return "Diverged";
        case SolveStatus::MaxIters: return "MaxIters";
        case SolveStatus::LineSearchFailed: return "LineSearchFailed";
        case SolveStatus::Stalled: return "Stalled";
    }
    return "Unknown";
}

double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

namespace {

struct DeflationValue {
    double m;
    std::vector<double> grad;
};

DeflationValue deflation_operator(const Deflation& d, std::span<const double> x) {
    DeflationValue out{1.0, std::vector<double>(x.size(), 0.0)};
    // m = prod_j m_j with m_j = d_j^{-p} + shift; grad m = m * sum_j grad m_j / m_j,
    // grad m_j = -p d_j^{-p-2} (x - r_j).
    for (const auto& r : d.roots) {
        if (r.size() != x.size()) throw std::invalid_argument("deflated root has wrong length");
        double dist2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - r[i]) * (x[i] - r[i]);
        const double dist = std::sqrt(dist2);
        const double mj = std::pow(dist, -d.power) + d.shift;
        const double coef = -d.power * std::pow(dist, -d.power - 2.0) / mj;
        for (std::size_t i = 0; i < x.size(); ++i) out.grad[i] += coef * (x[i] - r[i]);
        out.m *= mj;
    }
    for (double& g : out.grad) g *= out.m;
    return out;
}

double deflation_factor(const Deflation* d, std::span<const double> x) {
    return d ? deflation_operator(*d, x).m : 1.0;
}

template <typename ResidualFn, typename JacobianFn>
SolveOutcome newton_core(ResidualFn&& residual, JacobianFn&& jacobian, const std::vector<std::size_t>& order,
                         std::span<const double> initial, const NewtonConfig& cfg, const Deflation* deflation) {
    cfg.validate();
    SolveOutcome out;
    std::vector<double> x(initial.begin(), initial.end());
    std::vector<double> f;
    try {
        f = residual(x);
    } catch (const std::domain_error&) {
        out.status = SolveStatus::Diverged;
        out.solution = std::move(x);
        out.final_residual_norm = std::numeric_limits<double>::infinity();
        return out;
    }
    double fnorm = max_norm(f);
    auto finish = [&](SolveStatus s) {
        out.status = s;
        out.final_residual_norm = fnorm;
        out.solution = std::move(x);
        return out;
    };
    if (!std::isfinite(fnorm)) return finish(SolveStatus::Diverged);

    // Converged needs a small residual and a small Newton correction. The
    // residual test alone accepts any tiny u near a singular linearization,
    // where ||F|| is below tolerance long before u is near a solution.
    for (std::size_t it = 0;; ++it) {
        const bool small_residual = fnorm <= cfg.residual_tol;
        if (fnorm == 0.0) return finish(SolveStatus::Converged);
        if (it == cfg.max_iters) return finish(small_residual ? SolveStatus::Converged : SolveStatus::MaxIters);

        std::vector<double> step;
        try {
            std::vector<double> rhs(f.size());
            std::transform(f.begin(), f.end(), rhs.begin(), [](double v) { return -v; });
            step = BandedLU(jacobian(x), order).solve(rhs);
        } catch (const SingularMatrixError&) {
            return finish(small_residual ? SolveStatus::Converged : SolveStatus::LineSearchFailed);
        }
        if (!std::isfinite(max_norm(step))) return finish(SolveStatus::Diverged);
        if (small_residual && max_norm(step) <= cfg.step_tol) return finish(SolveStatus::Converged);

        const double previous = fnorm;
        double merit = fnorm;
        if (deflation) {
            const auto dv = deflation_operator(*deflation, x);
            double gdot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) gdot += dv.grad[i] * step[i];
            const double denom = 1.0 - gdot / dv.m;
            if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) return finish(SolveStatus::LineSearchFailed);
            for (double& s : step) s /= denom;
            merit = dv.m * fnorm;
        }

        bool accepted = false;
        double t = 1.0;
        std::vector<double> trial(x.size());
        while (t >= cfg.min_step_fraction) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * step[i];
            try {
                auto ft = residual(trial);
                const double nt = max_norm(ft);
                const double mt = deflation ? deflation_factor(deflation, trial) * nt : nt;
                if (std::isfinite(mt) && mt < merit) {
                    x.swap(trial);
                    f = std::move(ft);
                    fnorm = nt;
                    accepted = true;
                    break;
                }
            } catch (const std::domain_error&) {
                // Flux undefined at the trial point: shorten the step.
            }
            t *= cfg.backtrack_factor;
        }
        out.iters = it + 1;
        if (!accepted) return finish(small_residual ? SolveStatus::Converged : SolveStatus::LineSearchFailed);
        // A tiny step alone is not failure: with 1/h^2 scaled rows a step
        // far below step_tol can still cut the residual sharply. Stop only
        // when the residual has also stopped contracting.
        if (fnorm > cfg.residual_tol && t * max_norm(step) <= cfg.step_tol && fnorm > 0.5 * previous) return finish(SolveStatus::Stalled);
    }
}

void check_initial(std::size_t got, std::size_t want) {
    if (got != want) throw std::invalid_argument("initial guess has wrong length");
}

}  // namespace

SolveOutcome newton_solve(const SingleProblem& p, std::span<const double> initial, const NewtonConfig& cfg,
                          const Deflation* deflation) {
    p.validate();
    check_initial(initial.size(), p.num_unknowns());
    auto out = newton_core([&](std::span<const double> u) { return residual_single(p, u); },
                           [&](std::span<const double> u) { return jacobian_single(p, u); }, {}, initial, cfg,
                           deflation);
    if (out.converged()) out.certificates = verify_certificates(p, out.solution, cfg);
    return out;
}

SolveOutcome newton_solve(const SystemProblem& p, std::span<const double> initial, const NewtonConfig& cfg,
                          const Deflation* deflation) {
    p.validate();
    check_initial(initial.size(), p.num_unknowns());
    auto out = newton_core([&](std::span<const double> w) { return residual_system(p, w); },
                           [&](std::span<const double> w) { return jacobian_system(p, w); },
                           system_ordering(*p.grid), initial, cfg, deflation);
    if (out.converged()) out.certificates = verify_certificates(p, out.solution, cfg);
    return out;
}

SolveOutcome fixed_point_solve(const SingleProblem& p, const NewtonConfig& cfg, const FixedPointOptions& opts) {
    p.validate();
    cfg.validate();
    if (!p.cutoff) throw std::invalid_argument("fixed-point iteration requires cutoff parameters");
    const Grid& grid = *p.grid;
    const std::size_t n = grid.num_nodes();
    const auto level = supersolution_level(p.cutoff->K, grid.dim(), grid.h_min());

    std::vector<double> upper(n, level.interior);
    for (std::size_t k = 0; k < n; ++k) {
        if (grid.tag(k) != NodeTag::Interior) upper[k] = level.boundary;
    }
    std::vector<double> w = opts.start == FixedPointStart::Supersolution ? upper : std::vector<double>(n, 0.0);

    const double slack = 1e-9 * level.boundary;
    auto check_bracket = [&](std::span<const double> v, std::size_t iter) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!(v[k] >= -slack) || !(v[k] <= upper[k] + slack)) {
                throw BracketViolation("fixed-point iterate " + std::to_string(iter) + " leaves [0, M_K + K] at node " +
                                       std::to_string(k));
            }
        }
    };
    check_bracket(w, 0);
    if (opts.observer) opts.observer(0, w);

    const BandedLU lu(assemble_A(grid));
    SolveOutcome out;
    out.status = SolveStatus::MaxIters;
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        auto next = lu.solve(fixed_point_rhs(p, w));
        check_bracket(next, it);
        if (opts.observer) opts.observer(it, next);
        double diff = 0.0;
        for (std::size_t k = 0; k < n; ++k) diff = std::max(diff, std::abs(next[k] - w[k]));
        w = std::move(next);
        out.iters = it;
        if (diff <= cfg.step_tol) {
            out.final_residual_norm = max_norm(residual_single(p, w));
            if (out.final_residual_norm <= cfg.residual_tol) {
                out.status = SolveStatus::Converged;
                break;
            }
        }
    }
    if (out.status != SolveStatus::Converged) out.final_residual_norm = max_norm(residual_single(p, w));
    out.solution = std::move(w);
    if (out.converged()) out.certificates = verify_certificates(p, out.solution, cfg);
    return out;
}

namespace {

bool all_at_least(std::span<const double> u, double floor) {
    return std::all_of(u.begin(), u.end(), [floor](double x) { return x >= floor; });
}

bool max_attained_on_boundary(const Grid& grid, std::span<const double> u) {
    const double top = *std::max_element(u.begin(), u.end());
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) {
        if (u[k] == top) return true;
    }
    return false;
}

std::vector<double> boundary_values(const Grid& grid, std::span<const double> u) {
    std::vector<double> out;
    for (std::size_t k : grid.nodes_with_tag(NodeTag::SmoothBoundary)) out.push_back(u[k]);
    return out;
}

}  // namespace

Certificates verify_certificates(const SingleProblem& p, std::span<const double> u, const NewtonConfig& cfg) {
    p.validate();
    check_initial(u.size(), p.num_unknowns());
    const Grid& grid = *p.grid;
    Certificates c;
    c.positive = all_at_least(u, cfg.positivity_floor);
    c.max_on_boundary = max_attained_on_boundary(grid, u);
    if (p.f.superlinear()) {
        const double top = *std::max_element(u.begin(), u.end());
        c.apriori_ok = top <= apriori_C(p.f, p.lambda, grid.h_min()) + 1e-8;
    }
    if (p.cutoff) c.cutoff_inactive = cutoff_inactive(p.f, *p.cutoff, boundary_values(grid, u));
    return c;
}

Certificates verify_certificates(const SystemProblem& p, std::span<const double> w, const NewtonConfig& cfg) {
    p.validate();
    check_initial(w.size(), p.num_unknowns());
    const Grid& grid = *p.grid;
    const std::size_t n = grid.num_nodes();
    const auto u = w.subspan(0, n);
    const auto v = w.subspan(n, n);
    Certificates c;
    c.positive = all_at_least(w, cfg.positivity_floor);
    c.max_on_boundary = max_attained_on_boundary(grid, u) && max_attained_on_boundary(grid, v);
    if (p.cutoffs) {
        // f acts on v and g acts on u.
        c.cutoff_inactive = cutoff_inactive(p.f, p.cutoffs->first, boundary_values(grid, v)) &&
                            cutoff_inactive(p.g, p.cutoffs->second, boundary_values(grid, u));
    }
    return c;
}

}  // namespace bifurcate
