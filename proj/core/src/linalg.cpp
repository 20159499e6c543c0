#include "bifurcate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bifurcate {

void SparseMatrix::add(std::size_t i, std::size_t j, double value) {
    auto& r = rows_.at(i);
    if (j >= rows_.size()) throw std::out_of_range("sparse matrix column out of range");
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    if (it != r.end() && it->col == j) {
        it->value += value;
    } else {
        r.insert(it, Entry{j, value});
    }
}

void SparseMatrix::set(std::size_t i, std::size_t j, double value) {
    auto& r = rows_.at(i);
    if (j >= rows_.size()) throw std::out_of_range("sparse matrix column out of range");
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    if (it != r.end() && it->col == j) {
        it->value = value;
    } else {
        r.insert(it, Entry{j, value});
    }
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto& r = rows_.at(i);
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    return (it != r.end() && it->col == j) ? it->value : 0.0;
}

bool SparseMatrix::has_entry(std::size_t i, std::size_t j) const {
    const auto& r = rows_.at(i);
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    return it != r.end() && it->col == j;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != size()) throw std::invalid_argument("matrix-vector dimension mismatch");
    std::vector<double> y(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        double acc = 0.0;
        for (const auto& e : rows_[i]) acc += e.value * x[e.col];
        y[i] = acc;
    }
    return y;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
    std::vector<std::vector<double>> d(size(), std::vector<double>(size(), 0.0));
    for (std::size_t i = 0; i < size(); ++i) {
        for (const auto& e : rows_[i]) d[i][e.col] = e.value;
    }
    return d;
}

namespace {

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> order, std::size_t n) {
    std::vector<std::size_t> pos(n);
    if (order.empty()) {
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        return pos;
    }
    if (order.size() != n) throw std::invalid_argument("ordering length does not match matrix size");
    std::vector<bool> seen(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (order[k] >= n || seen[order[k]]) throw std::invalid_argument("ordering is not a permutation");
        seen[order[k]] = true;
        pos[order[k]] = k;
    }
    return pos;
}

}  // namespace

std::pair<std::size_t, std::size_t> SparseMatrix::bandwidth(std::span<const std::size_t> order) const {
    const auto pos = inverse_permutation(order, size());
    std::size_t kl = 0, ku = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (const auto& e : rows_[i]) {
            const std::size_t r = pos[i], c = pos[e.col];
            if (r > c) kl = std::max(kl, r - c);
            if (c > r) ku = std::max(ku, c - r);
        }
    }
    return {kl, ku};
}

std::vector<std::size_t> interleave_ordering(std::size_t blocks, std::size_t block_size) {
    std::vector<std::size_t> order(blocks * block_size);
    for (std::size_t k = 0; k < block_size; ++k) {
        for (std::size_t b = 0; b < blocks; ++b) order[k * blocks + b] = b * block_size + k;
    }
    return order;
}

BandedLU::BandedLU(const SparseMatrix& a, std::vector<std::size_t> order)
    : n_(a.size()), order_(std::move(order)) {
    if (order_.empty()) {
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    }
    const auto pos = inverse_permutation(order_, n_);
    std::tie(kl_, ku_) = a.bandwidth(order_);
    // Row interchanges can push the upper band out by kl.
    const std::size_t ku_fill = ku_ + kl_;
    ldab_ = 2 * kl_ + ku_ + 1;
    diag_ = kl_ + ku_;
    ab_.assign(ldab_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (const auto& e : a.row(i)) band(pos[i], pos[e.col]) = e.value;
    }

    pivots_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t last_row = std::min(n_ - 1, j + kl_);
        std::size_t p = j;
        double best = std::abs(band(j, j));
        for (std::size_t i = j + 1; i <= last_row; ++i) {
            const double v = std::abs(band(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) {
            throw SingularMatrixError("zero pivot in column " + std::to_string(j));
        }
        pivots_[j] = p;
        const std::size_t last_col = std::min(n_ - 1, j + ku_fill);
        if (p != j) {
            for (std::size_t c = j; c <= last_col; ++c) std::swap(band(j, c), band(p, c));
        }
        const double pivot = band(j, j);
        for (std::size_t i = j + 1; i <= last_row; ++i) {
            const double l = band(i, j) / pivot;
            band(i, j) = l;
            if (l == 0.0) continue;
            for (std::size_t c = j + 1; c <= last_col; ++c) band(i, c) -= l * band(j, c);
        }
    }
    ku_ = ku_fill;
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("right-hand side has wrong length");
    std::vector<double> y(n_);
    for (std::size_t k = 0; k < n_; ++k) y[k] = rhs[order_[k]];
    for (std::size_t j = 0; j < n_; ++j) {
        if (pivots_[j] != j) std::swap(y[j], y[pivots_[j]]);
        const std::size_t last_row = std::min(n_ - 1, j + kl_);
        for (std::size_t i = j + 1; i <= last_row; ++i) y[i] -= band(i, j) * y[j];
    }
    for (std::size_t j = n_; j-- > 0;) {
        const std::size_t last_col = std::min(n_ - 1, j + ku_);
        double acc = y[j];
        for (std::size_t c = j + 1; c <= last_col; ++c) acc -= band(j, c) * y[c];
        y[j] = acc / band(j, j);
    }
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < n_; ++k) x[order_[k]] = y[k];
    return x;
}

std::vector<double> solve(const SparseMatrix& a, std::span<const double> rhs, std::vector<std::size_t> order) {
    return BandedLU(a, std::move(order)).solve(rhs);
}

std::vector<std::vector<double>> dense_inverse(const SparseMatrix& a) {
    const std::size_t n = a.size();
    auto m = a.to_dense();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t p = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[p][col])) p = r;
        }
        if (!(std::abs(m[p][col]) > 0.0)) throw SingularMatrixError("matrix is singular");
        std::swap(m[p], m[col]);
        std::swap(inv[p], inv[col]);
        const double d = m[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            m[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m[r][col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                m[r][c] -= f * m[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

}  // namespace bifurcate
