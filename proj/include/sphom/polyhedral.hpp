#pragma once

// Generic liftings, the regular triangulation they induce (projected lower
// hull of the lifted support), normalized volume and the damping constant M.
// Every hull decision is made in exact integer/rational arithmetic.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"
#include "lattice.hpp"
#include "random.hpp"

namespace sphom {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::int64_t lifting_denominator = std::int64_t{1} << 20;
inline constexpr int max_lifting_draws = 32;
inline constexpr double default_suppression = 1e-8;

struct Lifting {
    std::vector<Rational> values; ///< one per support column, in (0, 1)
};

inline Lifting draw_lifting(std::size_t m, Rng::engine& g)
{
    if (m == 0)
        throw error(errc::bad_shape, "lifting of an empty support");
    Lifting w;
    w.values.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto num = 1 + static_cast<std::int64_t>(g() % static_cast<std::uint64_t>(lifting_denominator - 1));
        w.values.emplace_back(num, lifting_denominator);
    }
    return w;
}

struct LowerFacet {
    std::vector<Rational> normal;   ///< α, the facet's inner normal is (α, 1)
    std::vector<std::size_t> cell;  ///< n+1 support column indices, ascending
    Rational level;                 ///< h = min_a ⟨α, a⟩ + ω(a)
    Integer volume;                 ///< |det[a_1 − a_0 … a_n − a_0]|
};

struct RegularTriangulation {
    std::vector<LowerFacet> facets;
    Integer normalized_volume = 0;
};

inline Integer normalized_volume(const RegularTriangulation& T)
{
    Integer v = 0;
    for (const auto& f : T.facets)
        v += f.volume;
    return v;
}

namespace detail {

inline Integer lcm(const Integer& a, const Integer& b) { return a / boost::multiprecision::gcd(a, b) * b; }

// Boost 1.74 rejects a negative cpp_int denominator.
inline Rational ratio(Integer num, Integer den)
{
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(num, den);
}

template <class F>
void for_each_combination(std::size_t m, std::size_t k, F&& visit)
{
    if (k > m)
        return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    while (true) {
        visit(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + i - 1)
            --i;
        if (i == 0)
            return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

/// Projected lower hull of {(a, ω(a))} by brute force over (n+1)-subsets:
/// each affinely independent subset determines the unique (α, h) with
/// ⟨α, a⟩ + ω(a) = h on the subset; it is a facet when every other point
/// lies strictly above. A point exactly on a facet hyperplane means the
/// lifting is not generic and degenerate_lifting is thrown.
inline RegularTriangulation lower_hull(const IntMatrix& S, const Lifting& w)
{
    const std::size_t n = S.rows();
    const std::size_t m = S.cols();
    if (w.values.size() != m)
        throw error(errc::bad_shape, "lifting size differs from support size");
    if (rank(vstack(S, [&] {
            IntMatrix ones(1, m);
            for (std::size_t j = 0; j < m; ++j)
                ones(0, j) = 1;
            return ones;
        }())) != n + 1)
        throw error(errc::bad_shape, "support is not full dimensional");

    // integer lifting W = ω·den
    Integer den = 1;
    for (const auto& v : w.values)
        den = detail::lcm(den, denominator(v));
    std::vector<Integer> W(m);
    for (std::size_t j = 0; j < m; ++j)
        W[j] = numerator(w.values[j]) * (den / denominator(w.values[j]));

    RegularTriangulation T;
    IntMatrix E(n, n);
    detail::for_each_combination(m, n + 1, [&](const std::vector<std::size_t>& cell) {
        const std::size_t a0 = cell[0];
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t i = 0; i < n; ++i)
                E(r, i) = S(i, cell[r + 1]) - S(i, a0);
        const Integer det = determinant(E);
        if (det == 0)
            return;
        // Cramer: α·den·det = N with E·(α·den) = (W_0 − W_j)_j
        std::vector<Integer> N(n);
        for (std::size_t c = 0; c < n; ++c) {
            IntMatrix Ec = E;
            for (std::size_t r = 0; r < n; ++r)
                Ec(r, c) = W[a0] - W[cell[r + 1]];
            N[c] = determinant(Ec);
        }
        const int sgn = det > 0 ? 1 : -1;
        bool on_facet = false;
        std::size_t next = 0;
        for (std::size_t k = 0; k < m; ++k) {
            if (next < cell.size() && cell[next] == k) {
                ++next;
                continue;
            }
            Integer v = det * (W[k] - W[a0]);
            for (std::size_t i = 0; i < n; ++i)
                v += N[i] * (S(i, k) - S(i, a0));
            if (sgn < 0)
                v = -v;
            if (v < 0)
                return;
            if (v == 0)
                on_facet = true;
        }
        if (on_facet)
            throw error(errc::degenerate_lifting, "lower facet with more than n+1 points");

        LowerFacet f;
        f.cell = cell;
        f.volume = abs(det);
        f.normal.resize(n);
        Rational h = w.values[a0];
        const Integer scale = det * den;
        for (std::size_t i = 0; i < n; ++i) {
            f.normal[i] = detail::ratio(N[i], scale);
            h += f.normal[i] * Rational(S(i, a0));
        }
        f.level = h;
        T.normalized_volume += f.volume;
        T.facets.push_back(std::move(f));
    });
    return T;
}

/// Exact lifted heights above each facet: ⟨α, a⟩ + ω(a) − h for every column.
/// Zero on the cell, positive elsewhere.
inline std::vector<Rational> facet_slacks(const IntMatrix& S, const Lifting& w, const LowerFacet& f)
{
    std::vector<Rational> out(S.cols());
    for (std::size_t k = 0; k < S.cols(); ++k) {
        Rational v = w.values[k] - f.level;
        for (std::size_t i = 0; i < S.rows(); ++i)
            v += f.normal[i] * Rational(S(i, k));
        out[k] = v;
    }
    return out;
}

/// Smallest positive slack over all facets; 1 when no support point lies
/// off a cell (a single simplex).
inline Rational hull_gap(const IntMatrix& S, const Lifting& w, const RegularTriangulation& T)
{
    bool any = false;
    Rational gap = 1;
    for (const auto& f : T.facets)
        for (const auto& s : facet_slacks(S, w, f))
            if (s > 0 && (!any || s < gap)) {
                gap = s;
                any = true;
            }
    return gap;
}

/// M = ln(1/suppression)/gap, so at t₀ = 1 every term off a cell is damped
/// by at most `suppression` relative to the cell terms.
inline double compute_M(const IntMatrix& S, const RegularTriangulation& T, const Lifting& w,
                        double suppression = default_suppression)
{
    if (!(suppression > 0.0 && suppression < 1.0))
        throw error(errc::bad_shape, "suppression must lie in (0, 1)");
    return std::log(1.0 / suppression) / static_cast<double>(hull_gap(S, w, T));
}

struct GenericTriangulation {
    Lifting lifting;
    RegularTriangulation triangulation;
    int draws = 0;
};

/// Draws liftings from successive streams until the induced subdivision is
/// a triangulation.
inline GenericTriangulation generic_triangulation(const IntMatrix& S, const Rng& rng)
{
    for (int attempt = 0; attempt < max_lifting_draws; ++attempt) {
        auto g = rng.stream("lifting", static_cast<std::uint64_t>(attempt));
        Lifting w = draw_lifting(S.cols(), g);
        try {
            return {w, lower_hull(S, w), attempt + 1};
        } catch (const error& e) {
            if (e.code() != errc::degenerate_lifting)
                throw;
        }
    }
    throw error(errc::genericity_exhausted,
                "no generic lifting after " + std::to_string(max_lifting_draws) + " draws");
}

} // namespace sphom
