#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "bifurcate/linalg.hpp"

namespace bifurcate::testing {

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;

/// Dense Jacobian by central differences with a fixed absolute step.
inline std::vector<std::vector<double>> central_difference_jacobian(const ResidualFn& residual,
                                                                    std::span<const double> x, double step) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
    std::vector<double> xp(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double saved = xp[j];
        xp[j] = saved + step;
        const auto rp = residual(xp);
        xp[j] = saved - step;
        const auto rm = residual(xp);
        xp[j] = saved;
        for (std::size_t i = 0; i < n; ++i) jac[i][j] = (rp[i] - rm[i]) / (2.0 * step);
    }
    return jac;
}

/// Largest entrywise error |J - J_fd|, scaled by max(1, |J_ij|) so that
/// zero entries are compared absolutely.
inline double max_relative_entry_error(const SparseMatrix& analytic, const std::vector<std::vector<double>>& fd) {
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        for (std::size_t j = 0; j < fd.size(); ++j) {
            const double a = analytic.at(i, j);
            worst = std::max(worst, std::abs(a - fd[i][j]) / std::max(1.0, std::abs(a)));
        }
    }
    return worst;
}

}  // namespace bifurcate::testing
