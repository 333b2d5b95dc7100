#pragma once

// Exact integer-matrix algebra: Smith normal form, unimodular complements of
// the support lattice, standard-form diagnostics and torsion removal.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace sphom {

using Integer = boost::multiprecision::cpp_int;

inline long long to_ll(const Integer& v)
{
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw error(errc::bad_shape, "integer entry does not fit in 64 bits: " + v.str());
    return static_cast<long long>(v);
}

inline int to_int(const Integer& v)
{
    if (v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min())
        throw error(errc::bad_shape, "exponent does not fit in int: " + v.str());
    return static_cast<int>(v);
}

class IntMatrix {
public:
    IntMatrix() = default;

    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw error(errc::bad_shape, "ragged matrix literal");
            for (long long v : r)
                data_.emplace_back(v);
        }
    }

    static IntMatrix identity(std::size_t n)
    {
        IntMatrix I(n, n);
        for (std::size_t i = 0; i < n; ++i)
            I(i, i) = 1;
        return I;
    }

    static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows)
    {
        IntMatrix M(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < M.rows_; ++i) {
            if (rows[i].size() != M.cols_)
                throw error(errc::bad_shape, "ragged matrix rows");
            for (std::size_t j = 0; j < M.cols_; ++j)
                M(i, j) = rows[i][j];
        }
        return M;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<long long> column(std::size_t j) const
    {
        std::vector<long long> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = to_ll((*this)(i, j));
        return c;
    }

    IntMatrix transpose() const
    {
        IntMatrix T(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                T(j, i) = (*this)(i, j);
        return T;
    }

    /// Rows [r0, r1) as a new matrix.
    IntMatrix row_block(std::size_t r0, std::size_t r1) const
    {
        IntMatrix B(r1 - r0, cols_);
        for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                B(i - r0, j) = (*this)(i, j);
        return B;
    }

    /// Columns [c0, c1) as a new matrix.
    IntMatrix col_block(std::size_t c0, std::size_t c1) const
    {
        IntMatrix B(rows_, c1 - c0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = c0; j < c1; ++j)
                B(i, j - c0) = (*this)(i, j);
        return B;
    }

    IntMatrix select_cols(const std::vector<std::size_t>& idx) const
    {
        IntMatrix B(rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                B(i, j) = (*this)(i, idx[j]);
        return B;
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
    }

    friend bool operator==(const IntMatrix& a, const IntMatrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b)
    {
        if (a.cols_ != b.rows_)
            throw error(errc::bad_shape, "matrix product dimension mismatch");
        IntMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Integer& aik = a(i, k);
                if (aik == 0)
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m)
    {
        os << '[';
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? "; " : "");
            for (std::size_t j = 0; j < m.cols_; ++j)
                os << (j ? " " : "") << m(i, j);
        }
        return os << ']';
    }

    // elementary operations used by the normal-form reductions
    void add_row_multiple(std::size_t dst, std::size_t src, const Integer& c)
    {
        for (std::size_t j = 0; j < cols_; ++j)
            (*this)(dst, j) += c * (*this)(src, j);
    }
    void add_col_multiple(std::size_t dst, std::size_t src, const Integer& c)
    {
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, dst) += c * (*this)(i, src);
    }
    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t j = 0; j < cols_; ++j)
            std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t i = 0; i < rows_; ++i)
            std::swap((*this)(i, a), (*this)(i, b));
    }
    void negate_row(std::size_t r)
    {
        for (std::size_t j = 0; j < cols_; ++j)
            (*this)(r, j) = -(*this)(r, j);
    }
    void negate_col(std::size_t c)
    {
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, c) = -(*this)(i, c);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

inline IntMatrix vstack(const IntMatrix& top, const IntMatrix& bottom)
{
    if (top.cols() != bottom.cols())
        throw error(errc::bad_shape, "vstack column mismatch");
    IntMatrix S(top.rows() + bottom.rows(), top.cols());
    for (std::size_t i = 0; i < top.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j)
            S(i, j) = top(i, j);
    for (std::size_t i = 0; i < bottom.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j)
            S(top.rows() + i, j) = bottom(i, j);
    return S;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(const IntMatrix& A)
{
    const std::size_t n = A.rows();
    if (n != A.cols())
        throw error(errc::bad_shape, "determinant of a non-square matrix");
    if (n == 0)
        return 1;
    IntMatrix M = A;
    Integer sign = 1;
    Integer prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && M(p, k) == 0)
                ++p;
            if (p == n)
                return 0;
            M.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
        prev = M(k, k);
    }
    return sign * M(n - 1, n - 1);
}

struct SmithDecomposition {
    IntMatrix P;     ///< n×n unimodular, row operations
    IntMatrix Q;     ///< m×m unimodular, column operations
    IntMatrix P_inv; ///< exact inverse of P
    IntMatrix Q_inv; ///< exact inverse of Q
    std::vector<Integer> invariant_factors; ///< d_1 | d_2 | ... | d_r, all positive
    std::size_t rank = 0;

    /// The n×m matrix diag(d_1..d_r, 0..0), i.e. P·A·Q.
    IntMatrix diagonal() const
    {
        IntMatrix D(P.rows(), Q.rows());
        for (std::size_t i = 0; i < rank; ++i)
            D(i, i) = invariant_factors[i];
        return D;
    }
};

namespace detail {

// Tracks W = P·A·Q while elementary operations are applied to W.
struct SmithState {
    IntMatrix W, P, P_inv, Q, Q_inv;

    void row_add(std::size_t dst, std::size_t src, const Integer& c)
    {
        W.add_row_multiple(dst, src, c);
        P.add_row_multiple(dst, src, c);
        P_inv.add_col_multiple(src, dst, -c);
    }
    void col_add(std::size_t dst, std::size_t src, const Integer& c)
    {
        W.add_col_multiple(dst, src, c);
        Q.add_col_multiple(dst, src, c);
        Q_inv.add_row_multiple(src, dst, -c);
    }
    void row_swap(std::size_t a, std::size_t b)
    {
        W.swap_rows(a, b);
        P.swap_rows(a, b);
        P_inv.swap_cols(a, b);
    }
    void col_swap(std::size_t a, std::size_t b)
    {
        W.swap_cols(a, b);
        Q.swap_cols(a, b);
        Q_inv.swap_rows(a, b);
    }
    void row_negate(std::size_t r)
    {
        W.negate_row(r);
        P.negate_row(r);
        P_inv.negate_col(r);
    }
};

} // namespace detail

/// Smith normal form by elementary row/column reduction. The pivot is the
/// nonzero entry of least magnitude in the trailing block (ties: lowest row,
/// then lowest column), so the result is deterministic for a fixed input.
inline SmithDecomposition smith_normal_form(const IntMatrix& A)
{
    const std::size_t n = A.rows();
    const std::size_t m = A.cols();
    detail::SmithState st{A, IntMatrix::identity(n), IntMatrix::identity(n), IntMatrix::identity(m),
                          IntMatrix::identity(m)};
    IntMatrix& W = st.W;

    std::size_t s = 0;
    const std::size_t limit = std::min(n, m);
    while (s < limit) {
        // pivot search over the trailing block
        std::size_t pi = n, pj = m;
        Integer best = 0;
        for (std::size_t i = s; i < n; ++i)
            for (std::size_t j = s; j < m; ++j) {
                if (W(i, j) == 0)
                    continue;
                Integer mag = abs(W(i, j));
                if (pi == n || mag < best) {
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        if (pi == n)
            break;
        st.row_swap(s, pi);
        st.col_swap(s, pj);

        bool clean = true;
        for (std::size_t i = s + 1; i < n; ++i) {
            if (W(i, s) == 0)
                continue;
            Integer q = W(i, s) / W(s, s);
            st.row_add(i, s, -q);
            if (W(i, s) != 0)
                clean = false;
        }
        for (std::size_t j = s + 1; j < m; ++j) {
            if (W(s, j) == 0)
                continue;
            Integer q = W(s, j) / W(s, s);
            st.col_add(j, s, -q);
            if (W(s, j) != 0)
                clean = false;
        }
        if (!clean)
            continue;

        // divisibility: fold an offending row into the pivot row and redo
        bool divides = true;
        for (std::size_t i = s + 1; i < n && divides; ++i)
            for (std::size_t j = s + 1; j < m; ++j)
                if (W(i, j) % W(s, s) != 0) {
                    st.row_add(s, i, 1);
                    divides = false;
                    break;
                }
        if (!divides)
            continue;

        if (W(s, s) < 0)
            st.row_negate(s);
        ++s;
    }

    SmithDecomposition out;
    out.rank = s;
    for (std::size_t i = 0; i < s; ++i)
        out.invariant_factors.push_back(W(i, i));
    out.P = std::move(st.P);
    out.P_inv = std::move(st.P_inv);
    out.Q = std::move(st.Q);
    out.Q_inv = std::move(st.Q_inv);
    return out;
}

inline std::size_t rank(const IntMatrix& A) { return smith_normal_form(A).rank; }

/// Inverse of a unimodular matrix, exact.
inline IntMatrix unimodular_inverse(const IntMatrix& U)
{
    if (U.rows() != U.cols())
        throw error(errc::bad_shape, "inverse of a non-square matrix");
    auto snf = smith_normal_form(U);
    if (snf.rank != U.rows() ||
        std::any_of(snf.invariant_factors.begin(), snf.invariant_factors.end(),
                    [](const Integer& d) { return d != 1; }))
        throw error(errc::not_torsion_free, "matrix is not unimodular");
    // P U Q = I  =>  U^{-1} = Q P
    return snf.Q * snf.P;
}

struct KernelComplement {
    IntMatrix B; ///< m×(m−n), columns span ker A
    IntMatrix C; ///< (m−n)×m with C·B = I and [C; A] unimodular
};

/// Kernel basis B of a torsion-free full-row-rank A together with a
/// complement C making [C; A] unimodular.
inline KernelComplement kernel_complement(const IntMatrix& A)
{
    const std::size_t n = A.rows();
    const std::size_t m = A.cols();
    if (n >= m)
        throw error(errc::bad_shape, "kernel complement needs more columns than rows");
    auto snf = smith_normal_form(A);
    if (snf.rank < n)
        throw error(errc::rank_deficient, "support matrix rank " + std::to_string(snf.rank) +
                                              " < " + std::to_string(n));
    for (const auto& d : snf.invariant_factors)
        if (d != 1)
            throw error(errc::not_torsion_free, "invariant factor " + d.str());
    return {snf.Q.col_block(n, m), snf.Q_inv.row_block(n, m)};
}

struct StandardFormReport {
    bool enough_monomials = false; ///< m > n + 1
    bool has_zero_column = false;
    bool full_row_rank = false;
    bool torsion_free = false;     ///< every nonzero invariant factor is 1

    bool all() const { return enough_monomials && has_zero_column && full_row_rank && torsion_free; }
};

inline StandardFormReport standard_form_report(const IntMatrix& A)
{
    StandardFormReport r;
    r.enough_monomials = A.cols() > A.rows() + 1;
    for (std::size_t j = 0; j < A.cols() && !r.has_zero_column; ++j) {
        bool zero = true;
        for (std::size_t i = 0; i < A.rows(); ++i)
            zero = zero && A(i, j) == 0;
        r.has_zero_column = zero;
    }
    auto snf = smith_normal_form(A);
    r.full_row_rank = snf.rank == A.rows();
    r.torsion_free = std::all_of(snf.invariant_factors.begin(), snf.invariant_factors.end(),
                                 [](const Integer& d) { return d == 1; });
    return r;
}

struct LatticeReduction {
    IntMatrix L;       ///< n×n with L·A_tilde = A
    IntMatrix A_tilde; ///< n×m, torsion free
    Integer cover_degree = 1; ///< |det L| = d_1···d_n
};

/// Factor A = L·Ã with Ã torsion free. The substitution y = x^L turns a
/// system supported on A into one supported on Ã, and is a
/// cover_degree-fold cover of the torus.
inline LatticeReduction lattice_reduce(const IntMatrix& A)
{
    const std::size_t n = A.rows();
    auto snf = smith_normal_form(A);
    if (snf.rank < n)
        throw error(errc::rank_deficient, "lattice reduction requires full row rank");
    IntMatrix D(n, n);
    Integer degree = 1;
    for (std::size_t i = 0; i < n; ++i) {
        D(i, i) = snf.invariant_factors[i];
        degree *= snf.invariant_factors[i];
    }
    LatticeReduction out;
    out.L = snf.P_inv * D * snf.P;
    out.A_tilde = snf.P_inv * snf.Q_inv.row_block(0, n);
    out.cover_degree = degree;
    return out;
}

} // namespace sphom
