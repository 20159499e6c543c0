#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bifurcate {

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Square matrix stored as sorted (column, value) lists per row.
class SparseMatrix {
public:
    struct Entry {
        std::size_t col;
        double value;
    };

    SparseMatrix() = default;
    explicit SparseMatrix(std::size_t n) : rows_(n) {}

    std::size_t size() const { return rows_.size(); }

    /// Adds value to entry (i, j), creating it if absent.
    void add(std::size_t i, std::size_t j, double value);
    void set(std::size_t i, std::size_t j, double value);
    /// Zero for entries outside the pattern.
    double at(std::size_t i, std::size_t j) const;
    bool has_entry(std::size_t i, std::size_t j) const;

    std::span<const Entry> row(std::size_t i) const { return rows_.at(i); }

    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<std::vector<double>> to_dense() const;

    /// Lower and upper bandwidth after renumbering unknowns by `order`
    /// (order[new] = old). Empty order means identity.
    std::pair<std::size_t, std::size_t> bandwidth(std::span<const std::size_t> order = {}) const;

private:
    std::vector<std::vector<Entry>> rows_;
};

/// Ordering that interleaves `blocks` equally sized blocks of a concatenated
/// vector: (u_0, v_0, u_1, v_1, ...). Keeps coupled systems banded.
std::vector<std::size_t> interleave_ordering(std::size_t blocks, std::size_t block_size);

/// LU factorization with partial pivoting of a banded matrix, LAPACK gbtrf
/// style: the upper band widens by kl to hold pivoting fill-in.
class BandedLU {
public:
    /// Factorizes `a` with unknowns renumbered by `order` (order[new] = old).
    /// Throws SingularMatrixError on an exactly zero or non-finite pivot.
    explicit BandedLU(const SparseMatrix& a, std::vector<std::size_t> order = {});

    std::vector<double> solve(std::span<const double> rhs) const;

    std::size_t size() const { return n_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }

private:
    double& band(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (diag_ + i - j)]; }
    double band(std::size_t i, std::size_t j) const { return ab_[j * ldab_ + (diag_ + i - j)]; }

    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::size_t ldab_ = 0;
    std::size_t diag_ = 0;
    std::vector<double> ab_;
    std::vector<std::size_t> pivots_;
    std::vector<std::size_t> order_;
};

/// Solves a x = rhs by banded LU.
std::vector<double> solve(const SparseMatrix& a, std::span<const double> rhs, std::vector<std::size_t> order = {});

/// Dense inverse by Gauss-Jordan elimination with partial pivoting. Intended
/// for small diagnostic matrices.
std::vector<std::vector<double>> dense_inverse(const SparseMatrix& a);

}  // namespace bifurcate
