#include "bifurcate_cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bifurcate/assembly.hpp"
#include "bifurcate/eigen.hpp"
#include "bifurcate_cli/csv.hpp"

namespace bifurcate::cli {

namespace fs = std::filesystem;

namespace {

std::string na_or(const std::optional<bool>& b) {
    if (!b) return "na";
    return *b ? "1" : "0";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string("na"); }

std::string eigen_text(const PrincipalEigenvalue& e) { return e.is_finite() ? format_double(e.value()) : "infinite"; }

void write_certificates(CsvWriter& w, const Certificates& c) {
    w.cell(c.positive).cell(c.max_on_boundary).cell(std::string_view(na_or(c.apriori_ok))).cell(c.cutoff_inactive);
}

/// Columns x (or x0..x{N-1}), u and, for systems, v.
void write_profile(const fs::path& path, const Grid& grid, std::span<const double> values, bool system) {
    std::vector<std::string> header;
    if (grid.dim() == 1) {
        header.push_back("x");
    } else {
        for (std::size_t i = 0; i < grid.dim(); ++i) header.push_back("x" + std::to_string(i));
    }
    header.push_back("u");
    if (system) header.push_back("v");
    CsvWriter w(path, header);
    const std::size_t n = grid.num_nodes();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < grid.dim(); ++i) w.cell(grid.coordinate(k, i));
        w.cell(values[k]);
        if (system) w.cell(values[n + k]);
        w.end_row();
    }
    w.close();
}

void write_resolved(const RunConfig& cfg, const fs::path& out) {
    std::ofstream f(out / "config.resolved.json", std::ios::binary);
    f << resolved_json(cfg).dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write resolved config");
}

double fprime(const std::vector<double>& c) { return c.size() > 1 ? c[1] : 0.0; }

PrincipalEigenvalue problem_lambda1(const RunConfig& cfg) {
    if (cfg.problem == ProblemKind::Single) return lambda1_single(fprime(cfg.f_coeffs));
    return lambda1_system(fprime(cfg.f_coeffs), fprime(cfg.g_coeffs)).lambda1;
}

}  // namespace

int run_eigen(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    fs::create_directories(out);
    write_resolved(cfg, out);
    const auto grid = make_grid(cfg);
    const double fp = fprime(cfg.f_coeffs);
    CsvWriter summary(out / "eigen_summary.csv", {"quantity", "value"});
    auto row = [&](const std::string& k, const std::string& v) {
        summary.cell(std::string_view(k)).cell(std::string_view(v));
        summary.end_row();
        log << k << " = " << v << '\n';
    };

    if (cfg.problem == ProblemKind::Single) {
        const auto l1 = lambda1_single(fp);
        row("lambda1", eigen_text(l1));
        row("lambda1_discrete", eigen_text(discrete_lambda1_single(*grid, fp)));
        row("mu1", format_double(steklov_mu1()));
        if (l1.is_finite()) {
            row("A", format_double(1.0));
            row("B", format_double(-l1.value() * fp));
            CsvWriter w(out / "eigen.csv", {"x", "phi"});
            for (std::size_t i = 0; i < cfg.eigen_samples; ++i) {
                const double x = static_cast<double>(i) / static_cast<double>(cfg.eigen_samples - 1);
                w.cell(x).cell(eigenfunction_single(x));
                w.end_row();
            }
            w.close();
        }
    } else {
        const double gp = fprime(cfg.g_coeffs);
        const auto res = lambda1_system(fp, gp);
        row("lambda1", eigen_text(res.lambda1));
        row("lambda1_discrete", eigen_text(discrete_lambda1_system(*grid, fp, gp)));
        row("sigma", format_double(res.sigma));
        if (res.lambda1.is_finite()) {
            row("mu1", format_double(res.mu1));
            row("A", format_double(res.A));
            row("C", format_double(res.C));
            CsvWriter w(out / "eigen.csv", {"x", "phi", "psi"});
            for (std::size_t i = 0; i < cfg.eigen_samples; ++i) {
                const double x = static_cast<double>(i) / static_cast<double>(cfg.eigen_samples - 1);
                const auto [phi, psi] = eigenfunction_system(x, res);
                w.cell(x).cell(phi).cell(psi);
                w.end_row();
            }
            w.close();
        }
    }
    summary.close();
    return kSuccess;
}

int run_solve(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    fs::create_directories(out);
    write_resolved(cfg, out);
    const auto grid = make_grid(cfg);
    const bool system = cfg.problem == ProblemKind::System;
    SolveOutcome o;
    if (system) {
        const auto p = make_system(cfg, grid);
        o = newton_solve(p, initial_vector(p, make_guess(cfg)), cfg.newton);
    } else {
        const auto p = make_single(cfg, grid);
        if (cfg.method == SolveMethod::FixedPoint) {
            FixedPointOptions opts;
            opts.start = cfg.fixed_point_start;
            opts.max_iters = cfg.fixed_point_max_iters;
            o = fixed_point_solve(p, cfg.newton, opts);
        } else {
            o = newton_solve(p, initial_vector(p, make_guess(cfg)), cfg.newton);
        }
    }
    const std::size_t n = grid->num_nodes();
    const double max_u = max_norm(std::span<const double>(o.solution).subspan(0, n));
    std::vector<std::string> header{"status", "iters", "residual", "max_u"};
    if (system) header.push_back("max_v");
    for (const char* h : {"positive", "max_on_boundary", "apriori_ok", "cutoff_inactive"}) header.push_back(h);
    CsvWriter w(out / "solve.csv", header);
    w.cell(to_string(o.status)).cell(o.iters).cell(o.final_residual_norm).cell(max_u);
    if (system) w.cell(max_norm(std::span<const double>(o.solution).subspan(n, n)));
    write_certificates(w, o.certificates);
    w.end_row();
    w.close();
    write_profile(out / "profile.csv", *grid, o.solution, system);
    log << "status = " << to_string(o.status) << ", iters = " << o.iters
        << ", residual = " << format_double(o.final_residual_norm) << ", max_u = " << format_double(max_u) << '\n';
    return o.converged() ? kSuccess : kNumericalFailure;
}

namespace {

template <typename Problem>
TraceResult trace_problem(const Problem& p, const RunConfig& cfg) {
    TraceOptions opts;
    opts.lambda_min = cfg.sweep.lambda_min;
    opts.lambda0 = cfg.sweep.lambda_max;
    opts.delta_lambda = cfg.sweep.delta_lambda;
    opts.delta_offset = cfg.sweep.delta_offset;
    opts.guess = make_guess(cfg);
    opts.profile_stride = cfg.sweep.profile_stride;
    opts.fold_search_max = cfg.sweep.fold_search_max;
    return trace_full_curve(p, cfg.sweep.regime, opts, cfg.newton);
}

const std::vector<std::string> kTerminationHeader{"branch_id", "label",  "direction", "points",
                                                  "termination", "lambda_star", "lambda_L", "lambda",
                                                  "status",    "detected_lambda"};

}  // namespace

int run_trace(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    fs::create_directories(out);
    write_resolved(cfg, out);
    const auto grid = make_grid(cfg);
    const bool system = cfg.problem == ProblemKind::System;

    std::vector<std::string> curve_header{"branch_id", "lambda", "max_u"};
    if (system) curve_header.push_back("max_v");
    for (const char* h : {"iters", "residual", "positive", "max_on_boundary", "apriori_ok", "cutoff_inactive"}) {
        curve_header.push_back(h);
    }

    TraceResult result;
    try {
        if (problem_lambda1(cfg).is_finite() == (cfg.sweep.regime == Regime::NoFiniteBifurcation)) {
            throw ConfigError("sweep.regime", "regime " + to_string(cfg.sweep.regime) +
                                                  " does not match lambda1 = " + eigen_text(problem_lambda1(cfg)));
        }
        result = system ? trace_problem(make_system(cfg, grid), cfg) : trace_problem(make_single(cfg, grid), cfg);
    } catch (const NoBranchFound& e) {
        CsvWriter curve(out / "curve.csv", curve_header);
        curve.close();
        CsvWriter term(out / "termination.csv", kTerminationHeader);
        term.cell(std::string_view("-")).cell(std::string_view("-")).cell(std::string_view("-")).cell(std::size_t{0});
        term.cell(std::string_view("NoBranchFound"));
        for (int i = 0; i < 5; ++i) term.cell(std::string_view("na"));
        term.end_row();
        term.close();
        log << e.what() << '\n';
        return kNumericalFailure;
    }

    CsvWriter curve(out / "curve.csv", curve_header);
    CsvWriter term(out / "termination.csv", kTerminationHeader);
    if (cfg.sweep.write_profiles) fs::create_directories(out / "profiles");
    for (std::size_t b = 0; b < result.branches.size(); ++b) {
        const Branch& br = result.branches[b];
        for (std::size_t k = 0; k < br.points.size(); ++k) {
            const BranchPoint& pt = br.points[k];
            curve.cell(b).cell(pt.lambda).cell(pt.max_u);
            if (system) curve.cell(*pt.max_v);
            curve.cell(pt.iters).cell(pt.residual);
            write_certificates(curve, pt.certificates);
            curve.end_row();
            if (cfg.sweep.write_profiles && !pt.profile.empty()) {
                char name[64];
                std::snprintf(name, sizeof name, "branch%zu_%06zu.csv", b, k);
                write_profile(out / "profiles" / name, *grid, pt.profile, system);
            }
        }
        term.cell(b).cell(std::string_view(br.label));
        term.cell(std::string_view(br.direction == Direction::Left ? "Left" : "Right")).cell(br.points.size());
        term.cell(std::string_view(to_string(br.end.cause)));
        term.cell(std::string_view(optional_number(br.end.lambda_star)));
        term.cell(std::string_view(optional_number(br.end.lambda_L)));
        term.cell(std::string_view(optional_number(br.end.lambda)));
        term.cell(br.end.status ? to_string(*br.end.status) : std::string_view("na"));
        term.cell(std::string_view(optional_number(detect_bifurcation_lambda(br))));
        term.end_row();
        log << "branch " << b << " (" << br.label << "): " << br.points.size() << " points, "
            << to_string(br.end.cause) << '\n';
    }
    curve.close();
    term.close();

    CsvWriter summary(out / "summary.csv", {"quantity", "value"});
    auto row = [&](std::string_view k, const std::string& v) {
        summary.cell(k).cell(std::string_view(v));
        summary.end_row();
    };
    row("regime", to_string(result.regime));
    row("lambda1", eigen_text(result.lambda1));
    row("lambda1_discrete", result.discrete_lambda1 ? eigen_text(*result.discrete_lambda1) : "na");
    row("anchor", format_double(result.anchor));
    row("branches", std::to_string(result.branches.size()));
    summary.close();

    if (result.regime == Regime::SupercriticalWithFold && result.branches.size() < 3) {
        log << "no second solution found at lambda_L; fold branch incomplete\n";
        return kNumericalFailure;
    }
    return kSuccess;
}

void corrupt_stencil(SparseMatrix& a) {
    if (a.size() < 2) return;
    a.set(1, 0, std::abs(a.at(1, 0)) + 1.0);
}

std::vector<CheckItem> run_diagnostics(const RunConfig& cfg) {
    std::vector<CheckItem> items;
    char buf[160];

    // Matrix checks run on a small grid of the configured dimension.
    RunConfig small = cfg;
    small.counts.assign(cfg.domain.size(), cfg.check_M);
    const auto grid = make_grid(small);
    SparseMatrix a = assemble_A(*grid);
    if (cfg.corrupt_stencil) corrupt_stencil(a);
    const auto dense = a.to_dense();
    double worst_off = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        for (std::size_t j = 0; j < dense.size(); ++j) {
            if (i != j) worst_off = std::max(worst_off, dense[i][j]);
        }
    }
    std::snprintf(buf, sizeof buf, "largest off-diagonal entry %.17g", worst_off);
    items.push_back({"z_matrix", worst_off <= 0.0, buf});

    double min_inv = std::numeric_limits<double>::infinity();
    try {
        for (const auto& r : dense_inverse(a)) {
            for (double v : r) min_inv = std::min(min_inv, v);
        }
        std::snprintf(buf, sizeof buf, "smallest inverse entry %.17g", min_inv);
        items.push_back({"inverse_nonnegative", min_inv >= -1e-12, buf});
    } catch (const std::exception& e) {
        items.push_back({"inverse_nonnegative", false, e.what()});
    }

    // Truncation orders on u = cosh over (0,1).
    std::vector<double> e2, en;
    for (std::size_t m : {51u, 101u, 201u}) {
        const auto g = unit_interval_grid(m);
        const auto u = GridFunction::sample(g, [](std::span<const double> x) { return std::cosh(x[0]); });
        double a2 = 0.0;
        for (std::size_t k = 1; k + 1 < m; ++k) {
            a2 = std::max(a2, std::abs(second_diff(u, 0, {k}) - std::cosh(g->coordinate(k, 0))));
        }
        e2.push_back(a2);
        en.push_back(std::max(std::abs(normal_derivative(u, {0})), std::abs(normal_derivative(u, {m - 1}) - std::sinh(1.0))));
    }
    auto order_item = [&](const char* name, const std::vector<double>& e, double lo, double hi) {
        const double r1 = e[0] / e[1], r2 = e[1] / e[2];
        std::snprintf(buf, sizeof buf, "error ratios %.6f %.6f (expected in [%.1f; %.1f])", r1, r2, lo, hi);
        items.push_back({name, r1 >= lo && r1 <= hi && r2 >= lo && r2 <= hi, buf});
    };
    order_item("second_difference_order", e2, 3.6, 4.4);
    order_item("normal_derivative_order", en, 1.8, 2.2);

    // Reference solve at the configured lambda and grid.
    const auto full = make_grid(cfg);
    SolveOutcome o;
    double residual = 0.0;
    if (cfg.problem == ProblemKind::System) {
        const auto p = make_system(cfg, full);
        o = newton_solve(p, initial_vector(p, make_guess(cfg)), cfg.newton);
        residual = max_norm(residual_system(p, o.solution));
    } else {
        const auto p = make_single(cfg, full);
        o = newton_solve(p, initial_vector(p, make_guess(cfg)), cfg.newton);
        residual = max_norm(residual_single(p, o.solution));
    }
    std::snprintf(buf, sizeof buf, "%s in %zu iterations; recomputed residual %.3e", std::string(to_string(o.status)).c_str(),
                  o.iters, residual);
    items.push_back({"reference_solve", o.converged() && residual <= cfg.newton.residual_tol, buf});
    if (o.converged()) {
        items.push_back({"certificate_positive", o.certificates.positive, ""});
        items.push_back({"certificate_max_on_boundary", o.certificates.max_on_boundary, ""});
        if (o.certificates.apriori_ok) items.push_back({"certificate_apriori", *o.certificates.apriori_ok, ""});
        items.push_back({"certificate_cutoff_inactive", o.certificates.cutoff_inactive, ""});
    }
    return items;
}

int run_check(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    fs::create_directories(out);
    write_resolved(cfg, out);
    const auto items = run_diagnostics(cfg);
    CsvWriter w(out / "check.csv", {"check", "passed", "detail"});
    bool all = true;
    for (const auto& it : items) {
        w.cell(std::string_view(it.name)).cell(it.passed).cell(std::string_view(it.detail));
        w.end_row();
        log << (it.passed ? "PASS " : "FAIL ") << it.name << (it.detail.empty() ? "" : ": ") << it.detail << '\n';
        all = all && it.passed;
    }
    w.close();
    return all ? kSuccess : kNumericalFailure;
}

int main_entry(int argc, char** argv, std::ostream& log, std::ostream& err) {
    CLI::App app{"Finite-difference bifurcation solver for -u'' + u = 0 with nonlinear boundary flux"};
    std::string mode_text;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    app.add_option("mode", mode_text, "solve, trace, eigen or check")
        ->required()
        ->check(CLI::IsMember({"solve", "trace", "eigen", "check"}));
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--set", overrides, "Override a field: dotted.key=value (repeatable)");
    app.add_option("--out", out_dir, "Output directory")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        log << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kConfigError;
    }

    try {
        const Mode mode = parse_mode(mode_text);
        auto doc = load_json(config_path);
        for (const auto& s : overrides) apply_override(doc, s);
        const RunConfig cfg = parse_config(doc, mode);
        switch (mode) {
            case Mode::Eigen: return run_eigen(cfg, out_dir, log);
            case Mode::Solve: return run_solve(cfg, out_dir, log);
            case Mode::Trace: return run_trace(cfg, out_dir, log);
            case Mode::Check: return run_check(cfg, out_dir, log);
        }
    } catch (const ConfigError& e) {
        err << "config error in field '" << e.field() << "': " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kNumericalFailure;
}

}  // namespace bifurcate::cli
