#pragma once

// Laurent polynomial systems over the torus: representation, evaluation,
// Jacobians, and the coefficient-level rewrites (randomized unmixing, toric
// slicing, squareization).

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "lattice.hpp"

namespace sphom {

using complex = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using Exponent = std::vector<long long>;

struct LaurentPolynomial {
    std::vector<Exponent> support;
    std::vector<complex> coeffs;
};

struct LaurentSystem {
    std::size_t num_vars = 0;
    std::vector<std::string> var_names;
    std::vector<LaurentPolynomial> polys;

    std::size_t size() const noexcept { return polys.size(); }
};

/// Throws bad_shape on any violated invariant: exponent lengths, distinct
/// support points, nonzero coefficients, at least one nonempty polynomial.
inline void validate(const LaurentSystem& F)
{
    if (F.polys.empty())
        throw error(errc::bad_shape, "system has no polynomials");
    for (std::size_t i = 0; i < F.polys.size(); ++i) {
        const auto& f = F.polys[i];
        if (f.support.empty())
            throw error(errc::bad_shape, "polynomial " + std::to_string(i) + " is identically zero");
        if (f.support.size() != f.coeffs.size())
            throw error(errc::bad_shape, "support/coefficient count mismatch");
        std::vector<Exponent> sorted = f.support;
        for (const auto& e : sorted)
            if (e.size() != F.num_vars)
                throw error(errc::bad_shape, "exponent length differs from variable count");
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw error(errc::bad_shape, "duplicate exponent in polynomial " + std::to_string(i));
        for (const auto& c : f.coeffs)
            if (c == complex(0.0))
                throw error(errc::bad_shape, "zero coefficient in polynomial " + std::to_string(i));
    }
}

/// Common-support system f_i(x) = c_i · x^A.
class UnmixedSystem {
public:
    UnmixedSystem() = default;

    UnmixedSystem(IntMatrix A, cmat C) : A_(std::move(A)), C_(std::move(C))
    {
        if (static_cast<std::size_t>(C_.cols()) != A_.cols())
            throw error(errc::bad_shape, "coefficient columns differ from support size");
        for (Eigen::Index i = 0; i < C_.rows(); ++i)
            if (C_.cols() > 0 && C_.row(i).cwiseAbs().maxCoeff() == 0.0)
                throw error(errc::bad_shape, "coefficient row " + std::to_string(i) + " is identically zero");
        exps_.resize(A_.cols());
        for (std::size_t j = 0; j < A_.cols(); ++j) {
            exps_[j].resize(A_.rows());
            for (std::size_t i = 0; i < A_.rows(); ++i)
                exps_[j][i] = to_int(A_(i, j));
        }
        auto sorted = exps_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw error(errc::bad_shape, "support columns must be distinct");
    }

    const IntMatrix& A() const noexcept { return A_; }
    const cmat& C() const noexcept { return C_; }
    std::size_t num_vars() const noexcept { return A_.rows(); }
    std::size_t num_terms() const noexcept { return A_.cols(); }
    std::size_t num_polys() const noexcept { return static_cast<std::size_t>(C_.rows()); }
    const std::vector<std::vector<int>>& exponents() const noexcept { return exps_; }

    UnmixedSystem with_coefficients(cmat C) const { return UnmixedSystem(A_, std::move(C)); }

private:
    IntMatrix A_;
    cmat C_;
    std::vector<std::vector<int>> exps_; // column-wise copy of A
};

inline complex ipow(complex z, long long e)
{
    if (e < 0) {
        z = 1.0 / z;
        e = -e;
    }
    complex r = 1.0;
    while (e) {
        if (e & 1)
            r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

inline void check_torus(const std::vector<std::vector<int>>& exps, const cvec& x)
{
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] != complex(0.0))
            continue;
        for (const auto& a : exps)
            if (a[j] < 0)
                throw error(errc::zero_coordinate, "x" + std::to_string(j + 1) +
                                                       " = 0 with a negative exponent");
    }
}

/// x^A for the columns of A.
inline cvec monomials(const std::vector<std::vector<int>>& exps, const cvec& x)
{
    check_torus(exps, x);
    cvec v(static_cast<Eigen::Index>(exps.size()));
    for (std::size_t k = 0; k < exps.size(); ++k) {
        complex p = 1.0;
        for (std::size_t j = 0; j < exps[k].size(); ++j)
            p *= ipow(x[static_cast<Eigen::Index>(j)], exps[k][j]);
        v[static_cast<Eigen::Index>(k)] = p;
    }
    return v;
}

/// m×n matrix of partial derivatives ∂(x^a_k)/∂x_j.
inline cmat monomial_jacobian(const std::vector<std::vector<int>>& exps, const cvec& x)
{
    check_torus(exps, x);
    const auto n = x.size();
    cmat D = cmat::Zero(static_cast<Eigen::Index>(exps.size()), n);
    for (std::size_t k = 0; k < exps.size(); ++k) {
        const auto& a = exps[k];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (a[j] == 0)
                continue;
            complex p = static_cast<double>(a[j]);
            for (Eigen::Index l = 0; l < n; ++l)
                p *= ipow(x[l], a[l] - (l == j ? 1 : 0));
            D(static_cast<Eigen::Index>(k), j) = p;
        }
    }
    return D;
}

inline cvec evaluate(const UnmixedSystem& F, const cvec& x)
{
    if (static_cast<std::size_t>(x.size()) != F.num_vars())
        throw error(errc::bad_shape, "point dimension differs from variable count");
    return F.C() * monomials(F.exponents(), x);
}

inline cmat jacobian(const UnmixedSystem& F, const cvec& x)
{
    if (static_cast<std::size_t>(x.size()) != F.num_vars())
        throw error(errc::bad_shape, "point dimension differs from variable count");
    return F.C() * monomial_jacobian(F.exponents(), x);
}

/// Row-wise backward error max_i |f_i(x)| / Σ_a |c_ia||x^a|.
inline double relative_residual(const cmat& C, const cvec& mono)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
        complex v = 0.0;
        double scale = 0.0;
        for (Eigen::Index a = 0; a < C.cols(); ++a) {
            v += C(i, a) * mono[a];
            scale += std::abs(C(i, a)) * std::abs(mono[a]);
        }
        worst = std::max(worst, scale > 0.0 ? std::abs(v) / scale : std::abs(v));
    }
    return worst;
}

inline double relative_residual(const UnmixedSystem& F, const cvec& x)
{
    return relative_residual(F.C(), monomials(F.exponents(), x));
}

namespace detail {

inline IntMatrix support_matrix(const std::vector<Exponent>& cols, std::size_t n)
{
    IntMatrix A(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < n; ++i)
            A(i, j) = cols[j][i];
    return A;
}

} // namespace detail

/// Sorted union of all supports of F.
inline std::vector<Exponent> union_support(const LaurentSystem& F)
{
    std::vector<Exponent> all;
    for (const auto& f : F.polys)
        all.insert(all.end(), f.support.begin(), f.support.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

inline bool is_unmixed(const LaurentSystem& F)
{
    auto first = F.polys.front().support;
    std::sort(first.begin(), first.end());
    for (const auto& f : F.polys) {
        auto s = f.support;
        std::sort(s.begin(), s.end());
        if (s != first)
            return false;
    }
    return true;
}

/// F written over the union support, missing terms padded with zeros. Used
/// to evaluate the original (possibly mixed) system.
inline UnmixedSystem padded_unmixed(const LaurentSystem& F)
{
    validate(F);
    auto cols = union_support(F);
    std::map<Exponent, Eigen::Index> index;
    for (std::size_t j = 0; j < cols.size(); ++j)
        index.emplace(cols[j], static_cast<Eigen::Index>(j));
    cmat C = cmat::Zero(static_cast<Eigen::Index>(F.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < F.size(); ++i)
        for (std::size_t k = 0; k < F.polys[i].support.size(); ++k)
            C(static_cast<Eigen::Index>(i), index.at(F.polys[i].support[k])) = F.polys[i].coeffs[k];
    return UnmixedSystem(detail::support_matrix(cols, F.num_vars), std::move(C));
}

/// R·F over the union support. Exact cancellation in a coefficient can only
/// come from a non-generic R; see count_zero_coefficients.
inline UnmixedSystem randomize_unmix(const LaurentSystem& F, const cmat& R)
{
    const auto q = static_cast<Eigen::Index>(F.size());
    if (R.rows() != q || R.cols() != q)
        throw error(errc::bad_shape, "randomizer must be q×q");
    Eigen::FullPivLU<cmat> lu(R);
    if (!lu.isInvertible())
        throw error(errc::singular_randomizer, "randomizing matrix is singular");
    UnmixedSystem padded = padded_unmixed(F);
    return padded.with_coefficients(R * padded.C());
}

inline std::size_t count_zero_coefficients(const UnmixedSystem& F)
{
    std::size_t z = 0;
    for (Eigen::Index i = 0; i < F.C().rows(); ++i)
        for (Eigen::Index j = 0; j < F.C().cols(); ++j)
            z += F.C()(i, j) == complex(0.0);
    return z;
}

/// F^(d): the q rows of F followed by d slicing rows on the same support.
struct SlicedSystem {
    UnmixedSystem system;
    std::size_t q = 0;
    std::size_t d = 0;
};

inline SlicedSystem toric_slice(const UnmixedSystem& F, std::size_t d, const std::vector<cvec>& slices)
{
    const std::size_t n = F.num_vars();
    const auto m = static_cast<Eigen::Index>(F.num_terms());
    if (d > n)
        throw error(errc::bad_dimension, "slice rank " + std::to_string(d) + " exceeds n = " + std::to_string(n));
    if (slices.size() != d)
        throw error(errc::bad_dimension, "expected " + std::to_string(d) + " slicing vectors");
    const auto q = static_cast<Eigen::Index>(F.num_polys());
    cmat C(q + static_cast<Eigen::Index>(d), m);
    C.topRows(q) = F.C();
    for (std::size_t k = 0; k < d; ++k) {
        if (slices[k].size() != m)
            throw error(errc::bad_dimension, "slicing vector length differs from support size");
        for (Eigen::Index j = 0; j < m; ++j)
            if (slices[k][j] == complex(0.0))
                throw error(errc::bad_dimension, "slicing vectors must have nonzero entries");
        C.row(q + static_cast<Eigen::Index>(k)) = slices[k].transpose();
    }
    return {F.with_coefficients(std::move(C)), F.num_polys(), d};
}

/// Square n-row system from F^(d): rows i ≤ q are c_i + Σ_{k>r} λ_{i,k} c*_k,
/// rows q+i (i ≤ r) are c*_i + Σ_{k>r} λ_{q+i,k} c*_k, with r = n − q. Column
/// j of Λ multiplies slice r+1+j.
inline UnmixedSystem squareize(const SlicedSystem& Fd, const cmat& Lambda)
{
    const std::size_t n = Fd.system.num_vars();
    if (Fd.q > n)
        throw error(errc::bad_shape, "squareization needs q <= n");
    const std::size_t r = n - Fd.q;
    if (Fd.d < r)
        throw error(errc::bad_shape, "slice rank below n - q");
    const auto extra = static_cast<Eigen::Index>(Fd.d - r);
    if (Lambda.rows() != static_cast<Eigen::Index>(n) || Lambda.cols() != extra)
        throw error(errc::bad_shape, "mixing matrix must be n×(d−r)");
    for (Eigen::Index i = 0; i < Lambda.rows(); ++i)
        for (Eigen::Index j = 0; j < Lambda.cols(); ++j)
            if (Lambda(i, j) == complex(0.0))
                throw error(errc::bad_shape, "mixing matrix must be dense");
    const cmat& C = Fd.system.C();
    const auto base = static_cast<Eigen::Index>(n);
    cmat S = C.topRows(base);
    if (extra > 0)
        S += Lambda * C.bottomRows(extra);
    return Fd.system.with_coefficients(std::move(S));
}

} // namespace sphom
