#pragma once

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nctest/scalar.hpp"

namespace nctest {

/// Dense row-major matrix over an exact or approximate scalar.
/// Zero-row and zero-column matrices are valid and flow through every operation.
template <class S>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

    Matrix(std::initializer_list<std::initializer_list<S>> init)
    {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("ragged initializer");
            for (const auto& x : row) data_.push_back(x);
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    static Matrix from_rows(std::vector<std::vector<S>> rows)
    {
        Matrix m;
        m.rows_ = rows.size();
        m.cols_ = rows.empty() ? 0 : rows.front().size();
        m.data_.reserve(m.rows_ * m.cols_);
        for (const auto& r : rows) {
            if (r.size() != m.cols_) throw std::invalid_argument("ragged rows");
            for (const auto& x : r) m.data_.push_back(x);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<S> row(std::size_t i) const
    {
        return std::vector<S>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
    }

    std::vector<S> col(std::size_t j) const
    {
        std::vector<S> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_row(std::size_t i, const std::vector<S>& r)
    {
        if (r.size() != cols_) throw std::invalid_argument("row length mismatch");
        std::copy(r.begin(), r.end(), data_.begin() + i * cols_);
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matmul dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const S& aik = a(i, k);
                if (aik == S(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b)
    {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("matrix sum dimension mismatch");
        Matrix c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
        return c;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b)
    {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("matrix difference dimension mismatch");
        Matrix c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
        return c;
    }

    friend Matrix operator*(const S& s, const Matrix& a)
    {
        Matrix c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = s * a.data_[i];
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    Matrix vstack(const Matrix& below) const
    {
        if (cols_ != below.cols_ && rows_ != 0 && below.rows_ != 0)
            throw std::invalid_argument("vstack width mismatch");
        Matrix out;
        out.rows_ = rows_ + below.rows_;
        out.cols_ = rows_ == 0 ? below.cols_ : cols_;
        out.data_ = data_;
        out.data_.insert(out.data_.end(), below.data_.begin(), below.data_.end());
        return out;
    }

private:
    std::size_t rows_, cols_;
    std::vector<S> data_;
};

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("dot dimension mismatch");
    S acc(0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

/// M·v for a row-major matrix and a column vector.
template <class S>
std::vector<S> mat_vec(const Matrix<S>& m, const std::vector<S>& v)
{
    if (m.cols() != v.size()) throw std::invalid_argument("apply dimension mismatch");
    std::vector<S> out(m.rows(), S(0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

/// v·M for a row vector.
template <class S>
std::vector<S> vec_mat(const std::vector<S>& v, const Matrix<S>& m)
{
    if (m.rows() != v.size()) throw std::invalid_argument("apply dimension mismatch");
    std::vector<S> out(m.cols(), S(0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (v[i] == S(0)) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
    }
    return out;
}

template <class S>
double max_abs(const Matrix<S>& m)
{
    double best = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            best = std::max(best, std::fabs(scalar_traits<S>::to_double(m(i, j))));
    return best;
}

namespace detail {

// Reduced row echelon form over the leading `lead_cols` columns; remaining
// columns ride along (augmented systems). Pivot choice: first nonzero row in
// exact mode, largest magnitude in approximate mode.
template <class S>
std::vector<std::size_t> rref_in_place(Matrix<S>& a, std::size_t lead_cols, const Tol& tol)
{
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < lead_cols && r < a.rows(); ++c) {
        std::size_t piv = a.rows();
        if constexpr (scalar_traits<S>::exact) {
            for (std::size_t i = r; i < a.rows(); ++i)
                if (sign_of(a(i, c), tol) != 0) { piv = i; break; }
        } else {
            double best = tol.eps;
            for (std::size_t i = r; i < a.rows(); ++i) {
                double mag = std::fabs(scalar_traits<S>::to_double(a(i, c)));
                if (mag > best) { best = mag; piv = i; }
            }
        }
        if (piv == a.rows()) continue;
        if (piv != r)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(r, j));
        S inv = S(1) / a(r, c);
        for (std::size_t j = 0; j < a.cols(); ++j) a(r, j) = a(r, j) * inv;
        a(r, c) = S(1);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r) continue;
            S f = a(i, c);
            if (f == S(0)) continue;
            for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
            a(i, c) = S(0);
        }
        pivot_cols.push_back(c);
        ++r;
    }
    return pivot_cols;
}

}  // namespace detail

template <class S>
std::size_t rank(const Matrix<S>& v, const Tol& tol = Tol{})
{
    Matrix<S> a = v;
    return detail::rref_in_place(a, a.cols(), tol).size();
}

/// Full-row-rank matrix with the same row space as V. Deterministic: the
/// reduced row echelon form under the mode's pivot rule.
template <class S>
Matrix<S> row_space_basis(const Matrix<S>& v, const Tol& tol = Tol{})
{
    Matrix<S> a = v;
    std::vector<std::size_t> pivots = detail::rref_in_place(a, a.cols(), tol);
    Matrix<S> basis(pivots.size(), v.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t j = 0; j < v.cols(); ++j) basis(i, j) = a(i, j);
    return basis;
}

/// Inverse of a square matrix via Gauss-Jordan on [A | I].
template <class S>
Matrix<S> inverse(const Matrix<S>& m, const Tol& tol = Tol{})
{
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
    std::size_t n = m.rows();
    Matrix<S> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = S(1);
    }
    std::vector<std::size_t> pivots = detail::rref_in_place(aug, n, tol);
    if (pivots.size() != n) throw std::invalid_argument("singular matrix");
    Matrix<S> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

/// One solution x of A·x = b, or nullopt if inconsistent.
template <class S>
std::optional<std::vector<S>> solve_linear(const Matrix<S>& a, const std::vector<S>& b,
                                           const Tol& tol = Tol{})
{
    if (a.rows() != b.size()) throw std::invalid_argument("solve dimension mismatch");
    Matrix<S> aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    std::vector<std::size_t> pivots = detail::rref_in_place(aug, a.cols(), tol);
    for (std::size_t i = pivots.size(); i < a.rows(); ++i)
        if (sign_of(aug(i, a.cols()), tol) != 0) return std::nullopt;
    std::vector<S> x(a.cols(), S(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug(i, a.cols());
    return x;
}

/// Inclusion / projection pair splitting the idempotent onto the row space of V.
/// P·I = identity(rank); I·P is the orthogonal idempotent fixing every row of V.
template <class S>
struct IdempotentSplit {
    Matrix<S> inclusion;   // ambient_dim x k
    Matrix<S> projection;  // k x ambient_dim
};

template <class S>
IdempotentSplit<S> split_idempotent(const Matrix<S>& v, std::size_t ambient_dim,
                                    const Tol& tol = Tol{})
{
    if (v.cols() != ambient_dim)
        throw std::invalid_argument("rows of V must live in the ambient space");
    Matrix<S> basis = row_space_basis(v, tol);
    Matrix<S> incl = basis.transpose();
    // Moore-Penrose pseudoinverse of the inclusion; basis has full row rank.
    Matrix<S> gram = basis * incl;
    Matrix<S> proj = inverse(gram, tol) * basis;
    return {std::move(incl), std::move(proj)};
}

}  // namespace nctest
