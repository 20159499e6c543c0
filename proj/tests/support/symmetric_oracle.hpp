#pragma once

// Independent oracle for symmetric solutions of the 1D problem on (0,1).
//
// Interior rows are linear, so a solution with equal boundary values a is
// a * s, where s solves the interior equations with s_0 = s_{M-1} = 1. The
// boundary row then reduces to the scalar equation a * c = lambda f(a) with
// c = (1 - s_1)/h. The interior system is built from the stencil formula and
// solved with Eigen, sharing no code with the library.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace bifurcate::testing {

inline std::vector<double> unit_boundary_profile(std::size_t m) {
    const double h = 1.0 / static_cast<double>(m - 1);
    const double off = -1.0 / (h * h);
    const double diag = 2.0 / (h * h) + 1.0;
    const auto ni = static_cast<Eigen::Index>(m - 2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ni, ni);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        a(i, i) = diag;
        if (i > 0) a(i, i - 1) = off;
        if (i + 1 < ni) a(i, i + 1) = off;
    }
    rhs(0) -= off;
    rhs(ni - 1) -= off;
    const Eigen::VectorXd s = a.partialPivLu().solve(rhs);
    std::vector<double> out(m, 1.0);
    for (Eigen::Index i = 0; i < ni; ++i) out[static_cast<std::size_t>(i) + 1] = s(i);
    return out;
}

/// c in a * c = lambda f(a); equals the discrete Steklov eigenvalue.
inline double symmetric_boundary_rate(std::size_t m) {
    const double h = 1.0 / static_cast<double>(m - 1);
    return (1.0 - unit_boundary_profile(m)[1]) / h;
}

}  // namespace bifurcate::testing
