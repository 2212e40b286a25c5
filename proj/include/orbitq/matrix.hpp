#pragma once

#include "orbitq/fraction.hpp"
#include "orbitq/multipoly.hpp"
#include "orbitq/rational.hpp"

#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

namespace orbitq {

/// Dense row-major matrix over an exact ring T (Rational, MultiPoly,
/// FractionElement). Values are immutable in spirit: operations return new
/// matrices.
template <typename T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t rows, size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(size_t n, const T& zero, const T& one) {
        Matrix m(n, n, zero);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = one;
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    T& at(size_t i, size_t j) { return data_[i * cols_ + j]; }
    const T& at(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix r = *this;
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] += o.data_[k];
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix r = *this;
        for (size_t k = 0; k < data_.size(); ++k) r.data_[k] -= o.data_[k];
        return r;
    }
    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
        Matrix r(rows_, o.cols_, zero_like());
        for (size_t i = 0; i < rows_; ++i) {
            for (size_t k = 0; k < cols_; ++k) {
                const T& a = at(i, k);
                if (a.is_zero()) continue;
                for (size_t j = 0; j < o.cols_; ++j) {
                    const T& b = o.at(k, j);
                    if (b.is_zero()) continue;
                    r.at(i, j) += a * b;
                }
            }
        }
        return r;
    }
    Matrix scaled(const T& c) const {
        Matrix r = *this;
        for (auto& x : r.data_) x = x * c;
        return r;
    }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!x.is_zero()) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (size_t k = 0; k < data_.size(); ++k)
            if (!(data_[k] == o.data_[k])) return false;
        return true;
    }

    Matrix submatrix(size_t row_count, size_t col_count) const {
        Matrix r(row_count, col_count, zero_like());
        for (size_t i = 0; i < row_count; ++i)
            for (size_t j = 0; j < col_count; ++j) r.at(i, j) = at(i, j);
        return r;
    }

    template <typename U, typename F>
    Matrix<U> map(const U& zero, F&& f) const {
        Matrix<U> r(rows_, cols_, zero);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r.at(i, j) = f(at(i, j));
        return r;
    }

private:
    T zero_like() const {
        if (!data_.empty()) {
            T z = data_[0];
            z -= data_[0];
            return z;
        }
        return T{};
    }
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch");
    }

    size_t rows_, cols_;
    std::vector<T> data_;
};

using RatMatrix = Matrix<Rational>;
using PolyMatrix = Matrix<FractionElement>;

/// Incremental row reduction over Q. Feeds rows one at a time; reports
/// whether each enlarges the span. Deterministic (first-come pivots).
class RowReducer {
public:
    /// Returns true when the row is independent of those accepted so far.
    bool add(std::vector<Rational> row) {
        reduce(row);
        int p = pivot_of(row);
        if (p < 0) return false;
        Rational inv = row[p].inverse();
        for (auto& x : row) x *= inv;
        rows_.push_back(std::move(row));
        pivots_.push_back(p);
        return true;
    }

    /// Reduces a row against the basis without inserting it.
    bool in_span(std::vector<Rational> row) const {
        reduce(row);
        return pivot_of(row) < 0;
    }

    size_t rank() const { return rows_.size(); }

private:
    void reduce(std::vector<Rational>& row) const {
        for (size_t k = 0; k < rows_.size(); ++k) {
            const Rational& c = row[pivots_[k]];
            if (c.is_zero()) continue;
            Rational f = c;
            const auto& b = rows_[k];
            for (size_t j = 0; j < row.size(); ++j) {
                if (!b[j].is_zero()) row[j] -= f * b[j];
            }
        }
    }
    static int pivot_of(const std::vector<Rational>& row) {
        for (size_t j = 0; j < row.size(); ++j)
            if (!row[j].is_zero()) return static_cast<int>(j);
        return -1;
    }

    std::vector<std::vector<Rational>> rows_;
    std::vector<int> pivots_;
};

/// Rank of a rational matrix by Gaussian elimination.
inline size_t rank(const RatMatrix& m) {
    RowReducer rr;
    for (size_t i = 0; i < m.rows(); ++i) {
        std::vector<Rational> row(m.cols());
        for (size_t j = 0; j < m.cols(); ++j) row[j] = m.at(i, j);
        rr.add(std::move(row));
    }
    return rr.rank();
}

/// Basis of the right kernel of a rational matrix.
std::vector<std::vector<Rational>> kernel_basis(const RatMatrix& m);

/// Right-kernel basis over any exact field T (is_zero / inverse / *, -).
template <typename T>
std::vector<std::vector<T>> kernel_basis_field(const Matrix<T>& m, const T& zero, const T& one) {
    size_t nr = m.rows(), nc = m.cols();
    std::vector<std::vector<T>> rows;
    rows.reserve(nr);
    for (size_t i = 0; i < nr; ++i) {
        std::vector<T> r;
        r.reserve(nc);
        for (size_t j = 0; j < nc; ++j) r.push_back(m.at(i, j));
        rows.push_back(std::move(r));
    }
    std::vector<int> pivot_col;
    size_t rank_rows = 0;
    for (size_t col = 0; col < nc && rank_rows < nr; ++col) {
        size_t sel = rank_rows;
        while (sel < nr && rows[sel][col].is_zero()) ++sel;
        if (sel == nr) continue;
        std::swap(rows[sel], rows[rank_rows]);
        T inv = rows[rank_rows][col].inverse();
        for (auto& x : rows[rank_rows]) x = x * inv;
        for (size_t i = 0; i < nr; ++i) {
            if (i == rank_rows) continue;
            T f = rows[i][col];
            if (f.is_zero()) continue;
            for (size_t j = col; j < nc; ++j) rows[i][j] = rows[i][j] - f * rows[rank_rows][j];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++rank_rows;
    }
    std::vector<bool> is_pivot(nc, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<T>> basis;
    for (size_t freec = 0; freec < nc; ++freec) {
        if (is_pivot[freec]) continue;
        std::vector<T> v(nc, zero);
        v[freec] = one;
        for (size_t k = 0; k < pivot_col.size(); ++k) v[pivot_col[k]] = zero - rows[k][freec];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves m * x = b exactly; returns false when inconsistent.
bool solve(const RatMatrix& m, const std::vector<Rational>& b, std::vector<Rational>& x);

/// Fraction-free (Bareiss) rank of a polynomial matrix, with smallest-entry
/// pivot selection. Exact over any ring with exact division.
size_t bareiss_rank(Matrix<MultiPoly> m);

/// Bareiss determinant of a square polynomial matrix.
MultiPoly bareiss_det(Matrix<MultiPoly> m);

struct FractionRankOptions {
    uint64_t precheck_seed = 1;  ///< seed for the random-specialization lower-bound pass
};

/// Rank of a matrix over the fraction field of its polynomial ring.
/// Strategy: clear denominators row-wise, then
///   - matrices in <= 1 effective variable, or two variables with all entries
///     homogeneous of one total degree, are handled by evaluation at more
///     points than any minor's degree bound (deterministic, exact);
///   - otherwise fraction-free elimination, after a random-specialization
///     lower-bound pre-check that allows early exit at full rank.
size_t rank_over_fractions(const PolyMatrix& m, const FractionRankOptions& opts = {});

/// Substitutes values for every variable; throws std::domain_error naming the
/// entry when a denominator vanishes.
RatMatrix specialize(const PolyMatrix& m, const std::vector<Rational>& assignment);

}  // namespace orbitq
