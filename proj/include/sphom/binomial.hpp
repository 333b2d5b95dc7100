#pragma once

// Binomial systems x^A = b and simplex systems (n equations, n+1 common
// monomials), both solved exactly up to floating point via the Smith form.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "error.hpp"
#include "lattice.hpp"
#include "laurent.hpp"

namespace sphom {

struct BinomialSystem {
    IntMatrix A; ///< n×n, columns are exponent vectors
    cvec b;
};

namespace detail {

inline complex exp_wrapped(complex z)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return std::polar(std::exp(z.real()), std::remainder(z.imag(), two_pi));
}

// x ← x ∘ exp(Δu) with Aᵀ Δu = −log(x^A / b), i.e. Newton in logarithmic
// coordinates, where x^A = b is linear.
inline void polish_binomial(const std::vector<std::vector<int>>& exps, const Eigen::MatrixXd& At_lu_src,
                            const cvec& b, cvec& x, int rounds)
{
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(At_lu_src.cast<complex>());
    for (int it = 0; it < rounds; ++it) {
        cvec mono = monomials(exps, x);
        cvec e(b.size());
        for (Eigen::Index i = 0; i < b.size(); ++i)
            e[i] = std::log(mono[i] / b[i]);
        if (e.cwiseAbs().maxCoeff() < 1e-15)
            break;
        cvec du = lu.solve(-e);
        for (Eigen::Index j = 0; j < x.size(); ++j)
            x[j] *= std::exp(du[j]);
    }
}

} // namespace detail

/// All |det A| torus solutions of x^A = b. With P·A·Q = D the system becomes
/// y_i^{d_i} = (b^Q)_i in y = x^{P⁻¹}; every combination of d_i-th roots is
/// mapped back by x = y^P and polished by Newton in log coordinates.
inline std::vector<cvec> solve_binomial(const BinomialSystem& sys)
{
    const std::size_t n = sys.A.rows();
    if (sys.A.cols() != n || static_cast<std::size_t>(sys.b.size()) != n)
        throw error(errc::bad_shape, "binomial system must be square");
    if (determinant(sys.A) == 0)
        throw error(errc::singular_exponent, "exponent matrix is singular");
    for (Eigen::Index i = 0; i < sys.b.size(); ++i)
        if (sys.b[i] == complex(0.0))
            throw error(errc::zero_rhs, "right-hand side has a zero entry");

    const auto snf = smith_normal_form(sys.A);
    const auto N = static_cast<Eigen::Index>(n);
    cvec logb(N);
    for (Eigen::Index j = 0; j < N; ++j)
        logb[j] = std::log(sys.b[j]);

    // log of (b^Q)_i = Σ_j Q_ji log b_j
    cvec logc = cvec::Zero(N);
    std::vector<long long> degree(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            logc[static_cast<Eigen::Index>(i)] += static_cast<double>(to_ll(snf.Q(j, i))) * logb[static_cast<Eigen::Index>(j)];
        degree[i] = to_ll(snf.invariant_factors[i]);
    }

    Eigen::MatrixXd P(N, N), At(N, N);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(to_ll(snf.P(i, j)));
            At(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = static_cast<double>(to_ll(sys.A(i, j)));
        }
    std::vector<std::vector<int>> exps(n, std::vector<int>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            exps[k][i] = to_int(sys.A(i, k));

    std::vector<cvec> out;
    std::vector<long long> root(n, 0);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    while (true) {
        cvec logy(N);
        for (std::size_t i = 0; i < n; ++i) {
            const auto I = static_cast<Eigen::Index>(i);
            logy[I] = (logc[I] + complex(0.0, two_pi * static_cast<double>(root[i]))) /
                      static_cast<double>(degree[i]);
        }
        cvec logx = P.transpose().cast<complex>() * logy; // log x_j = Σ_i P_ij log y_i
        cvec x(N);
        for (Eigen::Index j = 0; j < N; ++j)
            x[j] = detail::exp_wrapped(logx[j]);
        detail::polish_binomial(exps, At, sys.b, x, 3);
        out.push_back(std::move(x));

        std::size_t k = 0;
        while (k < n && ++root[k] == degree[k])
            root[k++] = 0;
        if (k == n)
            break;
    }
    return out;
}

struct SimplexSystem {
    IntMatrix cell_support; ///< n×(n+1)
    cmat cell_coeffs;       ///< n×(n+1)
};

/// Kernel vector of the n×(n+1) coefficient matrix, from the SVD.
inline cvec simplex_kernel(const cmat& coeffs)
{
    const auto n = coeffs.rows();
    Eigen::JacobiSVD<cmat> svd(coeffs, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s.size() != n || s[0] == 0.0 || s[n - 1] / s[0] < 1e-12)
        throw error(errc::degenerate_kernel, "coefficient kernel is not one-dimensional");
    cvec v = svd.matrixV().col(n);
    const double scale = v.norm();
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (std::abs(v[j]) < 1e-12 * scale)
            throw error(errc::degenerate_kernel, "kernel vector has a zero entry");
    return v;
}

/// All solutions of a simplex system. The monomial vector must be a multiple
/// of the kernel vector v; dividing by the anchor (lexicographically
/// smallest exponent) leaves the binomial system x^{a_j − a_0} = v_j / v_0.
inline std::vector<cvec> solve_simplex(const SimplexSystem& S)
{
    const std::size_t n = S.cell_support.rows();
    if (S.cell_support.cols() != n + 1 || S.cell_coeffs.rows() != static_cast<Eigen::Index>(n) ||
        S.cell_coeffs.cols() != static_cast<Eigen::Index>(n + 1))
        throw error(errc::bad_shape, "simplex system must be n×(n+1)");

    std::vector<Exponent> cols(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        cols[j] = S.cell_support.column(j);
    std::size_t anchor = 0;
    for (std::size_t j = 1; j <= n; ++j)
        if (cols[j] < cols[anchor])
            anchor = j;

    const cvec v = simplex_kernel(S.cell_coeffs);
    BinomialSystem B{IntMatrix(n, n), cvec(static_cast<Eigen::Index>(n))};
    std::size_t k = 0;
    for (std::size_t j = 0; j <= n; ++j) {
        if (j == anchor)
            continue;
        for (std::size_t i = 0; i < n; ++i)
            B.A(i, k) = S.cell_support(i, j) - S.cell_support(i, anchor);
        B.b[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(j)] / v[static_cast<Eigen::Index>(anchor)];
        ++k;
    }
    if (determinant(B.A) == 0)
        throw error(errc::singular_exponent, "cell is not a full-dimensional simplex");
    return solve_binomial(B);
}

} // namespace sphom
