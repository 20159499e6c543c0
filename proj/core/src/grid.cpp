#include "bifurcate/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bifurcate {

Domain::Domain(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
    if (bounds_.empty()) throw std::invalid_argument("domain must have at least one axis");
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
        const auto& [lo, hi] = bounds_[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
            throw std::invalid_argument("degenerate interval on axis " + std::to_string(i));
        }
    }
}

std::size_t NodeClass::normal_axis() const {
    if (tag != NodeTag::SmoothBoundary) {
        throw std::domain_error("outward normal undefined at nonsmooth boundary point");
    }
    for (std::size_t i = 0; i < outward_normal.size(); ++i) {
        if (outward_normal[i] != 0) return i;
    }
    throw std::logic_error("smooth boundary node without normal");
}

Grid::Grid(Domain domain, std::vector<std::size_t> counts)
    : domain_(std::move(domain)), counts_(std::move(counts)) {
    if (counts_.size() != domain_.dim()) {
        throw std::invalid_argument("counts must have one entry per domain axis");
    }
    const std::size_t n = counts_.size();
    spacings_.resize(n);
    strides_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts_[i] < 4) {
            throw std::invalid_argument("grid resolution too coarse: m_" + std::to_string(i) +
                                        " = " + std::to_string(counts_[i]) + " < 4");
        }
        const auto& iv = domain_.axis(i);
        spacings_[i] = (iv.hi - iv.lo) / static_cast<double>(counts_[i] - 1);
    }
    std::size_t stride = 1;
    for (std::size_t i = n; i-- > 0;) {
        strides_[i] = stride;
        stride *= counts_[i];
    }
    num_nodes_ = stride;
    h_max_ = *std::max_element(spacings_.begin(), spacings_.end());
    h_min_ = *std::min_element(spacings_.begin(), spacings_.end());
}

std::size_t Grid::flat_index(const MultiIndex& alpha) const {
    if (alpha.size() != dim()) throw std::out_of_range("multi-index has wrong dimension");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] >= counts_[i]) throw std::out_of_range("multi-index outside grid");
        flat += alpha[i] * strides_[i];
    }
    return flat;
}

MultiIndex Grid::multi_index(std::size_t flat) const {
    if (flat >= num_nodes_) throw std::out_of_range("flat index outside grid");
    MultiIndex alpha(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        alpha[i] = flat / strides_[i];
        flat %= strides_[i];
    }
    return alpha;
}

double Grid::coordinate(std::size_t flat, std::size_t axis) const {
    const std::size_t k = (flat / strides_.at(axis)) % counts_[axis];
    return domain_.axis(axis).lo + static_cast<double>(k) * spacings_[axis];
}

std::vector<double> Grid::axis_coordinates(std::size_t axis) const {
    std::vector<double> x(count(axis));
    const double lo = domain_.axis(axis).lo;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = lo + static_cast<double>(k) * spacings_[axis];
    x.back() = domain_.axis(axis).hi;
    return x;
}

NodeClass Grid::classify(std::size_t flat) const {
    const MultiIndex alpha = multi_index(flat);
    NodeClass nc{NodeTag::Interior, std::vector<int>(dim(), 0)};
    std::size_t extremal = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (alpha[i] == 0) {
            nc.outward_normal[i] = -1;
            ++extremal;
        } else if (alpha[i] + 1 == counts_[i]) {
            nc.outward_normal[i] = +1;
            ++extremal;
        }
    }
    if (extremal == 1) {
        nc.tag = NodeTag::SmoothBoundary;
    } else if (extremal >= 2) {
        nc.tag = NodeTag::Corner;
    }
    return nc;
}

NodeTag Grid::tag(std::size_t flat) const {
    std::size_t extremal = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const std::size_t k = (flat / strides_[i]) % counts_[i];
        if (k == 0 || k + 1 == counts_[i]) ++extremal;
    }
    if (extremal == 0) return NodeTag::Interior;
    return extremal == 1 ? NodeTag::SmoothBoundary : NodeTag::Corner;
}

std::optional<std::size_t> Grid::neighbor(std::size_t flat, std::size_t axis, int offset) const {
    const std::size_t k = (flat / strides_.at(axis)) % counts_[axis];
    const auto target = static_cast<long long>(k) + offset;
    if (target < 0 || target >= static_cast<long long>(counts_[axis])) return std::nullopt;
    return static_cast<std::size_t>(static_cast<long long>(flat) +
                                    static_cast<long long>(offset) * static_cast<long long>(strides_[axis]));
}

std::vector<std::size_t> Grid::nodes_with_tag(NodeTag t) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < num_nodes_; ++k) {
        if (tag(k) == t) out.push_back(k);
    }
    return out;
}

Grid build_grid(Domain domain, std::vector<std::size_t> counts) {
    return Grid(std::move(domain), std::move(counts));
}

std::shared_ptr<const Grid> unit_interval_grid(std::size_t m) {
    return std::make_shared<const Grid>(Domain::unit_interval(), std::vector<std::size_t>{m});
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("grid function requires a grid");
    if (values_.size() != grid_->num_nodes()) {
        throw std::invalid_argument("grid function length " + std::to_string(values_.size()) +
                                    " does not match node count " + std::to_string(grid_->num_nodes()));
    }
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid)
    : GridFunction(grid, std::vector<double>(grid ? grid->num_nodes() : 0, 0.0)) {}

namespace {

double value_at(const GridFunction& u, std::size_t flat, std::size_t axis, int offset) {
    const auto nb = u.grid().neighbor(flat, axis, offset);
    if (!nb) throw std::out_of_range("difference stencil leaves the grid");
    return u[*nb];
}

}  // namespace

double diff_forward(const GridFunction& u, std::size_t axis, const MultiIndex& node) {
    const std::size_t k = u.grid().flat_index(node);
    return (value_at(u, k, axis, +1) - u[k]) / u.grid().spacing(axis);
}

double diff_backward(const GridFunction& u, std::size_t axis, const MultiIndex& node) {
    const std::size_t k = u.grid().flat_index(node);
    return (u[k] - value_at(u, k, axis, -1)) / u.grid().spacing(axis);
}

double diff_central(const GridFunction& u, std::size_t axis, const MultiIndex& node) {
    const std::size_t k = u.grid().flat_index(node);
    return (value_at(u, k, axis, +1) - value_at(u, k, axis, -1)) / (2.0 * u.grid().spacing(axis));
}

double second_diff(const GridFunction& u, std::size_t axis, const MultiIndex& node) {
    const std::size_t k = u.grid().flat_index(node);
    const double h = u.grid().spacing(axis);
    return (value_at(u, k, axis, +1) - 2.0 * u[k] + value_at(u, k, axis, -1)) / (h * h);
}

double discrete_laplacian(const GridFunction& u, const MultiIndex& node) {
    const std::size_t k = u.grid().flat_index(node);
    if (u.grid().tag(k) != NodeTag::Interior) {
        throw std::domain_error("discrete Laplacian requires an interior node");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < u.grid().dim(); ++i) sum += second_diff(u, i, node);
    return sum;
}

double normal_derivative(const GridFunction& u, const MultiIndex& node) {
    const std::size_t k = u.grid().flat_index(node);
    const NodeClass nc = u.grid().classify(k);
    if (nc.tag == NodeTag::Interior) {
        throw std::domain_error("normal derivative requires a boundary node");
    }
    const std::size_t axis = nc.normal_axis();  // throws for corners
    const int n = nc.outward_normal[axis];
    return n > 0 ? diff_backward(u, axis, node) : -diff_forward(u, axis, node);
}

}  // namespace bifurcate
