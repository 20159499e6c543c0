#include "bifurcate_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace bifurcate::cli {

using nlohmann::json;

Mode parse_mode(const std::string& s) {
    if (s == "solve") return Mode::Solve;
    if (s == "trace") return Mode::Trace;
    if (s == "eigen") return Mode::Eigen;
    if (s == "check") return Mode::Check;
    throw ConfigError("mode", "expected one of solve, trace, eigen, check (got '" + s + "')");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Solve: return "solve";
        case Mode::Trace: return "trace";
        case Mode::Eigen: return "eigen";
        case Mode::Check: return "check";
    }
    return "unknown";
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(key, "empty path component");
        if (!node->is_object()) throw ConfigError(key, "path crosses a non-object value");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
    for (const auto& [k, v] : obj.items()) {
        if (!known.count(k)) throw ConfigError(join(prefix, k), "unknown field");
    }
}

const json& section(const json& doc, const std::string& key, const std::set<std::string>& known) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const json& s = doc.at(key);
    if (!s.is_object()) throw ConfigError(key, "must be an object");
    reject_unknown(s, key, known);
    return s;
}

double number(const json& obj, const std::string& prefix, const std::string& key, std::optional<double> fallback) {
    const std::string field = join(prefix, key);
    if (!obj.contains(key) || obj.at(key).is_null()) {
        if (!fallback) throw ConfigError(field, "required field is missing");
        return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
    return d;
}

double positive(const json& obj, const std::string& prefix, const std::string& key, std::optional<double> fallback) {
    const double d = number(obj, prefix, key, fallback);
    if (!(d > 0.0)) throw ConfigError(join(prefix, key), "must be positive");
    return d;
}

std::optional<double> optional_positive(const json& obj, const std::string& prefix, const std::string& key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return positive(obj, prefix, key, std::nullopt);
}

std::size_t count(const json& obj, const std::string& prefix, const std::string& key, std::optional<std::size_t> fallback,
                  std::size_t min_value) {
    const std::string field = join(prefix, key);
    if (!obj.contains(key) || obj.at(key).is_null()) {
        if (!fallback) throw ConfigError(field, "required field is missing");
        return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value)) {
        throw ConfigError(field, "must be an integer >= " + std::to_string(min_value));
    }
    return v.get<std::size_t>();
}

bool boolean(const json& obj, const std::string& prefix, const std::string& key, bool fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    if (!obj.at(key).is_boolean()) throw ConfigError(join(prefix, key), "must be true or false");
    return obj.at(key).get<bool>();
}

std::string text(const json& obj, const std::string& prefix, const std::string& key, std::optional<std::string> fallback) {
    const std::string field = join(prefix, key);
    if (!obj.contains(key) || obj.at(key).is_null()) {
        if (!fallback) throw ConfigError(field, "required field is missing");
        return *fallback;
    }
    if (!obj.at(key).is_string()) throw ConfigError(field, "must be a string");
    return obj.at(key).get<std::string>();
}

std::vector<double> coefficients(const json& doc, const std::string& key) {
    if (!doc.contains(key) || doc.at(key).is_null()) throw ConfigError(key, "required field is missing");
    const json& v = doc.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(key, "must be a non-empty array of numbers (ascending degree)");
    std::vector<double> out;
    for (const auto& c : v) {
        if (!c.is_number() || !std::isfinite(c.get<double>())) throw ConfigError(key, "entries must be finite numbers");
        out.push_back(c.get<double>());
    }
    if (out[0] != 0.0) throw ConfigError(key, "constant coefficient must be 0 so that u = 0 solves the problem");
    return out;
}

std::vector<Interval> parse_domain(const json& doc) {
    if (!doc.contains("domain")) return {{0.0, 1.0}};
    const json& d = doc.at("domain");
    auto interval = [](const json& j) -> std::optional<Interval> {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) return std::nullopt;
        const Interval iv{j[0].get<double>(), j[1].get<double>()};
        if (!(iv.hi > iv.lo)) return std::nullopt;
        return iv;
    };
    if (auto iv = interval(d)) return {*iv};
    std::vector<Interval> out;
    if (d.is_array() && !d.empty()) {
        for (const auto& j : d) {
            auto iv = interval(j);
            if (!iv) break;
            out.push_back(*iv);
        }
        if (out.size() == d.size()) return out;
    }
    throw ConfigError("domain", "must be [lo, hi] or a list of [lo, hi] with lo < hi");
}

std::vector<std::size_t> parse_counts(const json& doc, std::size_t dim, bool required) {
    if (!doc.contains("M") || doc.at("M").is_null()) {
        if (required) throw ConfigError("M", "required field is missing");
        return std::vector<std::size_t>(dim, 101);
    }
    const json& m = doc.at("M");
    std::vector<std::size_t> out;
    auto one = [](const json& j) {
        if (!j.is_number_integer() || j.get<long long>() < 4) throw ConfigError("M", "node counts must be integers >= 4");
        return j.get<std::size_t>();
    };
    if (m.is_array()) {
        for (const auto& j : m) out.push_back(one(j));
    } else {
        out.assign(dim, one(m));
    }
    if (out.size() != dim) throw ConfigError("M", "needs one node count per domain axis");
    return out;
}

Regime parse_regime(const std::string& s) {
    if (s == "NoFiniteBifurcation") return Regime::NoFiniteBifurcation;
    if (s == "Subcritical") return Regime::Subcritical;
    if (s == "SupercriticalWithFold") return Regime::SupercriticalWithFold;
    throw ConfigError("sweep.regime", "expected NoFiniteBifurcation, Subcritical or SupercriticalWithFold");
}

}  // namespace

RunConfig parse_config(const json& doc, Mode mode) {
    if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
    reject_unknown(doc, "",
                   {"mode", "problem", "domain", "M", "f_coeffs", "g_coeffs", "lambda", "sweep", "guess", "newton",
                    "cutoff", "solve", "eigen", "check", "description"});
    RunConfig cfg;
    cfg.mode = mode;
    if (doc.contains("mode") && parse_mode(text(doc, "", "mode", std::nullopt)) != mode) {
        throw ConfigError("mode", "config is for mode '" + doc.at("mode").get<std::string>() + "' but '" +
                                      to_string(mode) + "' was requested");
    }
    const std::string problem = text(doc, "", "problem", std::string("single"));
    if (problem == "single") {
        cfg.problem = ProblemKind::Single;
    } else if (problem == "system") {
        cfg.problem = ProblemKind::System;
    } else {
        throw ConfigError("problem", "expected 'single' or 'system'");
    }
    cfg.domain = parse_domain(doc);
    cfg.counts = parse_counts(doc, cfg.domain.size(), mode == Mode::Solve || mode == Mode::Trace);
    cfg.f_coeffs = coefficients(doc, "f_coeffs");
    if (cfg.problem == ProblemKind::System) {
        cfg.g_coeffs = coefficients(doc, "g_coeffs");
    } else if (doc.contains("g_coeffs")) {
        throw ConfigError("g_coeffs", "only valid when problem is 'system'");
    }
    const bool needs_lambda = mode == Mode::Solve || mode == Mode::Check;
    cfg.lambda = positive(doc, "", "lambda", needs_lambda ? std::nullopt : std::optional<double>(1.0));

    const json& newton = section(doc, "newton", {"residual_tol", "step_tol", "max_iters", "positivity_floor"});
    cfg.newton.residual_tol = positive(newton, "newton", "residual_tol", cfg.newton.residual_tol);
    cfg.newton.step_tol = positive(newton, "newton", "step_tol", cfg.newton.step_tol);
    cfg.newton.max_iters = count(newton, "newton", "max_iters", cfg.newton.max_iters, 1);
    cfg.newton.positivity_floor = positive(newton, "newton", "positivity_floor", cfg.newton.positivity_floor);

    const json& guess = section(doc, "guess", {"type", "amplitude", "level"});
    cfg.guess.type = text(guess, "guess", "type", cfg.guess.type);
    if (cfg.guess.type != "eigenfunction" && cfg.guess.type != "constant") {
        throw ConfigError("guess.type", "expected 'eigenfunction' or 'constant'");
    }
    cfg.guess.amplitude = positive(guess, "guess", "amplitude", cfg.guess.amplitude);
    cfg.guess.level = number(guess, "guess", "level", cfg.guess.level);
    if (cfg.guess.type == "eigenfunction" && cfg.domain.size() != 1) {
        throw ConfigError("guess.type", "eigenfunction guesses need a 1D domain");
    }

    const json& sweep = section(doc, "sweep", {"regime", "lambda_min", "lambda_max", "delta_lambda", "delta_offset",
                                              "fold_search_max", "profile_stride", "write_profiles"});
    if (mode == Mode::Trace) cfg.sweep.regime = parse_regime(text(sweep, "sweep", "regime", std::nullopt));
    cfg.sweep.lambda_min = positive(sweep, "sweep", "lambda_min", cfg.sweep.lambda_min);
    cfg.sweep.lambda_max = positive(sweep, "sweep", "lambda_max", cfg.sweep.lambda_max);
    if (mode == Mode::Trace && cfg.sweep.regime == Regime::NoFiniteBifurcation &&
        !(cfg.sweep.lambda_max > cfg.sweep.lambda_min)) {
        throw ConfigError("sweep.lambda_max", "must exceed lambda_min");
    }
    cfg.sweep.delta_lambda = positive(sweep, "sweep", "delta_lambda", cfg.sweep.delta_lambda);
    cfg.sweep.delta_offset = optional_positive(sweep, "sweep", "delta_offset");
    cfg.sweep.fold_search_max = optional_positive(sweep, "sweep", "fold_search_max");
    cfg.sweep.profile_stride = count(sweep, "sweep", "profile_stride", cfg.sweep.profile_stride, 1);
    cfg.sweep.write_profiles = boolean(sweep, "sweep", "write_profiles", cfg.sweep.write_profiles);

    const json& cutoff = section(doc, "cutoff", {"enabled", "rho", "K"});
    cfg.cutoff.enabled = boolean(cutoff, "cutoff", "enabled", false);
    cfg.cutoff.rho = number(cutoff, "cutoff", "rho", 0.0);
    if (cfg.cutoff.rho < 0.0) throw ConfigError("cutoff.rho", "must be >= 0");
    if (cutoff.contains("K") && !(cutoff.at("K").is_string() && cutoff.at("K").get<std::string>() == "auto")) {
        cfg.cutoff.K = positive(cutoff, "cutoff", "K", std::nullopt);
    }
    if (cfg.cutoff.enabled && mode == Mode::Trace) {
        throw ConfigError("cutoff.enabled", "the cutoff problem is supported in solve and check modes only");
    }

    const json& solve = section(doc, "solve", {"method", "start", "max_iters"});
    const std::string method = text(solve, "solve", "method", std::string("newton"));
    if (method == "newton") {
        cfg.method = SolveMethod::Newton;
    } else if (method == "fixed_point") {
        cfg.method = SolveMethod::FixedPoint;
        if (!cfg.cutoff.enabled) throw ConfigError("solve.method", "fixed_point requires cutoff.enabled = true");
        if (cfg.problem != ProblemKind::Single) throw ConfigError("solve.method", "fixed_point supports single problems");
    } else {
        throw ConfigError("solve.method", "expected 'newton' or 'fixed_point'");
    }
    const std::string start = text(solve, "solve", "start", std::string("supersolution"));
    if (start == "supersolution") {
        cfg.fixed_point_start = FixedPointStart::Supersolution;
    } else if (start == "zero") {
        cfg.fixed_point_start = FixedPointStart::Zero;
    } else {
        throw ConfigError("solve.start", "expected 'supersolution' or 'zero'");
    }
    cfg.fixed_point_max_iters = count(solve, "solve", "max_iters", cfg.fixed_point_max_iters, 1);

    const json& eigen = section(doc, "eigen", {"samples"});
    cfg.eigen_samples = count(eigen, "eigen", "samples", cfg.eigen_samples, 2);

    const json& check = section(doc, "check", {"M", "corrupt_stencil"});
    cfg.check_M = count(check, "check", "M", cfg.check_M, 4);
    if (cfg.check_M > 64) throw ConfigError("check.M", "inverse-based checks are limited to M <= 64");
    cfg.corrupt_stencil = boolean(check, "check", "corrupt_stencil", false);

    if (mode == Mode::Eigen || mode == Mode::Trace) {
        if (cfg.f_coeffs.size() > 1 && cfg.f_coeffs[1] < 0.0) throw ConfigError("f_coeffs", "f'(0) must be >= 0");
        if (cfg.g_coeffs.size() > 1 && cfg.g_coeffs[1] < 0.0) throw ConfigError("g_coeffs", "g'(0) must be >= 0");
    }
    if (mode == Mode::Eigen && (cfg.domain.size() != 1 || cfg.domain[0].lo != 0.0 || cfg.domain[0].hi != 1.0)) {
        throw ConfigError("domain", "eigen mode is defined on (0,1)");
    }
    try {
        cfg.newton.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("newton", e.what());
    }
    return cfg;
}

std::shared_ptr<const Grid> make_grid(const RunConfig& cfg) {
    return std::make_shared<const Grid>(Domain(cfg.domain), cfg.counts);
}

CutoffParams resolve_cutoff(const RunConfig& cfg, const Polynomial& f, const Grid& grid, const std::string& field) {
    CutoffParams p;
    p.rho = cfg.cutoff.rho;
    p.lambda = cfg.lambda;
    p.h_star_max = grid.h_max();
    p.h_star_min = grid.h_min();
    if (cfg.cutoff.K) {
        p.K = *cfg.cutoff.K;
    } else {
        if (!f.superlinear()) throw ConfigError("cutoff.K", "'auto' needs superlinear " + field);
        p.K = apriori_C(f, cfg.lambda, grid.h_min()) * grid.h_max() / grid.h_min();
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("cutoff", e.what());
    }
    return p;
}

SingleProblem make_single(const RunConfig& cfg, std::shared_ptr<const Grid> grid) {
    SingleProblem p{std::move(grid), Polynomial(cfg.f_coeffs), cfg.lambda, std::nullopt};
    if (cfg.cutoff.enabled) p.cutoff = resolve_cutoff(cfg, p.f, *p.grid, "f");
    return p;
}

SystemProblem make_system(const RunConfig& cfg, std::shared_ptr<const Grid> grid) {
    SystemProblem p{std::move(grid), Polynomial(cfg.f_coeffs), Polynomial(cfg.g_coeffs), cfg.lambda, std::nullopt};
    if (cfg.cutoff.enabled) {
        p.cutoffs = std::pair{resolve_cutoff(cfg, p.f, *p.grid, "f"), resolve_cutoff(cfg, p.g, *p.grid, "g")};
    }
    return p;
}

InitialGuess make_guess(const RunConfig& cfg) {
    if (cfg.guess.type == "constant") return ConstantGuess{cfg.guess.level};
    return EigenfunctionGuess{cfg.guess.amplitude};
}

json resolved_json(const RunConfig& cfg) {
    json j;
    j["mode"] = to_string(cfg.mode);
    j["problem"] = cfg.problem == ProblemKind::Single ? "single" : "system";
    json domain = json::array();
    for (const auto& iv : cfg.domain) domain.push_back({iv.lo, iv.hi});
    j["domain"] = domain;
    j["M"] = cfg.counts;
    j["f_coeffs"] = cfg.f_coeffs;
    if (cfg.problem == ProblemKind::System) j["g_coeffs"] = cfg.g_coeffs;
    j["lambda"] = cfg.lambda;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j["sweep"] = {{"regime", to_string(cfg.sweep.regime)},
                  {"lambda_min", cfg.sweep.lambda_min},
                  {"lambda_max", cfg.sweep.lambda_max},
                  {"delta_lambda", cfg.sweep.delta_lambda},
                  {"delta_offset", cfg.sweep.delta_offset.value_or(std::max(cfg.sweep.delta_lambda, 1e-3))},
                  {"fold_search_max", opt(cfg.sweep.fold_search_max)},
                  {"profile_stride", cfg.sweep.profile_stride},
                  {"write_profiles", cfg.sweep.write_profiles}};
    j["guess"] = {{"type", cfg.guess.type}, {"amplitude", cfg.guess.amplitude}, {"level", cfg.guess.level}};
    j["newton"] = {{"residual_tol", cfg.newton.residual_tol},
                   {"step_tol", cfg.newton.step_tol},
                   {"max_iters", cfg.newton.max_iters},
                   {"backtrack_factor", cfg.newton.backtrack_factor},
                   {"min_step_fraction", cfg.newton.min_step_fraction},
                   {"positivity_floor", cfg.newton.positivity_floor}};
    json cutoff = {{"enabled", cfg.cutoff.enabled}, {"rho", cfg.cutoff.rho}};
    if (cfg.cutoff.enabled && cfg.mode != Mode::Eigen) {
        const auto grid = make_grid(cfg);
        const auto kf = resolve_cutoff(cfg, Polynomial(cfg.f_coeffs), *grid, "f").K;
        cutoff["K"] = cfg.cutoff.K ? json(*cfg.cutoff.K) : json("auto");
        cutoff["K_resolved_f"] = kf;
        if (cfg.problem == ProblemKind::System) {
            cutoff["K_resolved_g"] = resolve_cutoff(cfg, Polynomial(cfg.g_coeffs), *grid, "g").K;
        }
    } else {
        cutoff["K"] = cfg.cutoff.K ? json(*cfg.cutoff.K) : json("auto");
    }
    j["cutoff"] = cutoff;
    j["solve"] = {{"method", cfg.method == SolveMethod::Newton ? "newton" : "fixed_point"},
                  {"start", cfg.fixed_point_start == FixedPointStart::Supersolution ? "supersolution" : "zero"},
                  {"max_iters", cfg.fixed_point_max_iters}};
    j["eigen"] = {{"samples", cfg.eigen_samples}};
    j["check"] = {{"M", cfg.check_M}, {"corrupt_stencil", cfg.corrupt_stencil}};
    return j;
}

}  // namespace bifurcate::cli
