#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace bifurcate {

/// Closed interval [lo, hi] along one coordinate axis.
struct Interval {
    double lo;
    double hi;
};

/// N-rectangle (a_1,b_1) x ... x (a_N,b_N).
class Domain {
public:
    explicit Domain(std::vector<Interval> bounds);

    /// Unit interval (0,1), the setting of every 1D experiment.
    static Domain unit_interval() { return Domain({{0.0, 1.0}}); }

    std::size_t dim() const { return bounds_.size(); }
    const Interval& axis(std::size_t i) const { return bounds_.at(i); }
    const std::vector<Interval>& bounds() const { return bounds_; }

private:
    std::vector<Interval> bounds_;
};

enum class NodeTag { Interior, SmoothBoundary, Corner };

struct NodeClass {
    NodeTag tag;
    /// One entry per axis in {-1, 0, +1}. All zero for interior nodes; for
    /// corners the nonzero entries mark every axis on which the node is extremal.
    std::vector<int> outward_normal;

    /// Axis carrying the single nonzero normal entry of a smooth-boundary node.
    std::size_t normal_axis() const;
};

/// Zero-based multi-index. Component i ranges over [0, m_i).
using MultiIndex = std::vector<std::size_t>;

/// Uniform tensor grid over a Domain.
///
/// Nodes are stored in lexicographic multi-index order with the last axis
/// varying fastest:
///
///     flat(alpha) = sum_i alpha_i * stride_i,  stride_{N-1} = 1,
///     stride_i = m_{i+1} * stride_{i+1}.
///
/// multi_index() is the inverse of flat_index(). Node alpha sits at
/// a_i + alpha_i * h_i on axis i.
class Grid {
public:
    /// Requires counts[i] >= 4 on every axis.
    Grid(Domain domain, std::vector<std::size_t> counts);

    const Domain& domain() const { return domain_; }
    std::size_t dim() const { return counts_.size(); }
    std::size_t count(std::size_t axis) const { return counts_.at(axis); }
    const std::vector<std::size_t>& counts() const { return counts_; }
    double spacing(std::size_t axis) const { return spacings_.at(axis); }
    const std::vector<double>& spacings() const { return spacings_; }
    /// h^* = max_i h_i
    double h_max() const { return h_max_; }
    /// h_* = min_i h_i
    double h_min() const { return h_min_; }
    std::size_t num_nodes() const { return num_nodes_; }
    std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

    std::size_t flat_index(const MultiIndex& alpha) const;
    MultiIndex multi_index(std::size_t flat) const;

    double coordinate(std::size_t flat, std::size_t axis) const;
    /// Node coordinates along one axis, a_i + k h_i for k = 0..m_i-1.
    std::vector<double> axis_coordinates(std::size_t axis) const;

    NodeClass classify(std::size_t flat) const;
    NodeTag tag(std::size_t flat) const;

    /// Flat index of alpha + offset * e_axis, or nullopt when it leaves the grid.
    std::optional<std::size_t> neighbor(std::size_t flat, std::size_t axis, int offset) const;

    /// Flat indices of all nodes carrying the given tag, ascending.
    std::vector<std::size_t> nodes_with_tag(NodeTag tag) const;

private:
    Domain domain_;
    std::vector<std::size_t> counts_;
    std::vector<double> spacings_;
    std::vector<std::size_t> strides_;
    std::size_t num_nodes_ = 0;
    double h_max_ = 0.0;
    double h_min_ = 0.0;
};

Grid build_grid(Domain domain, std::vector<std::size_t> counts);

/// Uniform grid on (0,1) with m nodes.
std::shared_ptr<const Grid> unit_interval_grid(std::size_t m);

/// Node-indexed values over a shared, immutable Grid.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values);
    explicit GridFunction(std::shared_ptr<const Grid> grid);

    /// Samples fn at every node: fn receives the node's coordinates.
    template <typename Fn>
    static GridFunction sample(std::shared_ptr<const Grid> grid, Fn&& fn) {
        std::vector<double> values(grid->num_nodes());
        std::vector<double> x(grid->dim());
        for (std::size_t k = 0; k < values.size(); ++k) {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = grid->coordinate(k, i);
            values[k] = fn(std::span<const double>(x));
        }
        return GridFunction(std::move(grid), std::move(values));
    }

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t flat) const { return values_[flat]; }
    double at(const MultiIndex& alpha) const { return values_[grid_->flat_index(alpha)]; }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

// Difference operators. Each throws std::out_of_range when the stencil would
// read a node outside the grid.

/// (u(alpha + e_i) - u(alpha)) / h_i
double diff_forward(const GridFunction& u, std::size_t axis, const MultiIndex& node);
/// (u(alpha) - u(alpha - e_i)) / h_i
double diff_backward(const GridFunction& u, std::size_t axis, const MultiIndex& node);
/// (u(alpha + e_i) - u(alpha - e_i)) / (2 h_i)
double diff_central(const GridFunction& u, std::size_t axis, const MultiIndex& node);
/// (u(alpha + e_i) - 2 u(alpha) + u(alpha - e_i)) / h_i^2
double second_diff(const GridFunction& u, std::size_t axis, const MultiIndex& node);

/// Sum of second_diff over all axes. Requires an Interior node.
double discrete_laplacian(const GridFunction& u, const MultiIndex& node);

/// Discrete outward normal derivative at a SmoothBoundary node.
///
/// Sum over axes of n_i times a one-sided difference: delta^- where n_i > 0,
/// delta^+ where n_i < 0. Tangential axes carry n_i = 0 and contribute
/// nothing, so only nodes inside the grid are read. In 1D this is
/// (u_1 - u_2)/h at the left end and (u_M - u_{M-1})/h at the right end.
///
/// Throws std::domain_error at Corner nodes (normal undefined) and at
/// Interior nodes.
double normal_derivative(const GridFunction& u, const MultiIndex& node);

}  // namespace bifurcate
