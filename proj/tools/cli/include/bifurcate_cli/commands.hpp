#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "bifurcate/linalg.hpp"
#include "bifurcate_cli/config.hpp"

namespace bifurcate::cli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kConfigError = 2 };

/// Runs one command, writing its files under `out` and a short report to `log`.
/// Returns kSuccess or kNumericalFailure; configuration problems surface as
/// ConfigError.
int run_eigen(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_trace(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_check(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Full command-line entry: `<mode> --config <path> [--set k=v ...] --out <dir>`.
int main_entry(int argc, char** argv, std::ostream& log, std::ostream& err);

/// Flips the sign of the first sub-diagonal entry so the matrix is no longer
/// a Z-matrix. Test hook for the check command's negative control.
void corrupt_stencil(SparseMatrix& a);

struct CheckItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// The diagnostics of run_check, without file output.
std::vector<CheckItem> run_diagnostics(const RunConfig& cfg);

}  // namespace bifurcate::cli
