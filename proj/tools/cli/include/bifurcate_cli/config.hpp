#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bifurcate/continuation.hpp"
#include "bifurcate/grid.hpp"
#include "bifurcate/solve.hpp"

namespace bifurcate::cli {

/// Invalid or missing configuration value. `field` is the dotted key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Mode { Solve, Trace, Eigen, Check };
enum class ProblemKind { Single, System };
enum class SolveMethod { Newton, FixedPoint };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct GuessConfig {
    /// "eigenfunction" or "constant".
    std::string type = "eigenfunction";
    double amplitude = 1.0;
    double level = 1.0;
};

struct CutoffConfig {
    bool enabled = false;
    double rho = 0.0;
    /// Empty means "auto": K = apriori_C * h^* / h_*, resolved per nonlinearity.
    std::optional<double> K;
};

struct SweepConfig {
    Regime regime = Regime::NoFiniteBifurcation;
    double lambda_min = 0.01;
    /// Start of the sweep when lambda1 is infinite.
    double lambda_max = 3.0;
    double delta_lambda = 1e-3;
    std::optional<double> delta_offset;
    std::optional<double> fold_search_max;
    std::size_t profile_stride = 1;
    bool write_profiles = false;
};

struct RunConfig {
    Mode mode = Mode::Solve;
    ProblemKind problem = ProblemKind::Single;
    std::vector<Interval> domain{{0.0, 1.0}};
    std::vector<std::size_t> counts{101};
    std::vector<double> f_coeffs;
    std::vector<double> g_coeffs;
    double lambda = 1.0;
    SweepConfig sweep;
    GuessConfig guess;
    NewtonConfig newton;
    CutoffConfig cutoff;
    SolveMethod method = SolveMethod::Newton;
    FixedPointStart fixed_point_start = FixedPointStart::Supersolution;
    std::size_t fixed_point_max_iters = 10000;
    std::size_t eigen_samples = 101;
    std::size_t check_M = 10;
    bool corrupt_stencil = false;
};

/// Reads a JSON file; a missing file or parse failure is a ConfigError on "config".
nlohmann::json load_json(const std::filesystem::path& path);

/// Applies "a.b.c=value". The value is parsed as JSON when possible
/// (numbers, booleans, arrays, null) and stored as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Validates every field the mode uses. Throws ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc, Mode mode);

std::shared_ptr<const Grid> make_grid(const RunConfig& cfg);

/// Cutoff parameters for nonlinearity `f` at the config's lambda, with "auto"
/// K resolved. Throws ConfigError when auto K is requested for an f without
/// superlinear growth.
CutoffParams resolve_cutoff(const RunConfig& cfg, const Polynomial& f, const Grid& grid, const std::string& field);

SingleProblem make_single(const RunConfig& cfg, std::shared_ptr<const Grid> grid);
SystemProblem make_system(const RunConfig& cfg, std::shared_ptr<const Grid> grid);
InitialGuess make_guess(const RunConfig& cfg);

/// Every field with defaults filled in and "auto" values resolved.
nlohmann::json resolved_json(const RunConfig& cfg);

}  // namespace bifurcate::cli
