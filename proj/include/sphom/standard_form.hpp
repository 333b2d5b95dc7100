#pragma once

// Rewriting a general Laurent system into standard unmixed form, and carrying
// solutions of the rewritten system back to the original coordinates.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "binomial.hpp"
#include "error.hpp"
#include "lattice.hpp"
#include "laurent.hpp"
#include "random.hpp"

namespace sphom {

/// Multiply every equation by x^{-shift}; zeros are unchanged.
struct MonomialShift {
    Exponent shift;
};

/// x = z^U with z = (z_1..z_r, 1..1): the system only depends on z_1..z_r.
/// The torus orbit through a zero has dimension n − retained.
struct TorusProjection {
    IntMatrix U;
    std::size_t retained = 0;
};

/// New variables y = x^L; each y has cover_degree preimages x.
struct CoverLift {
    IntMatrix L;
    Integer degree = 1;
};

using CoordinateStep = std::variant<MonomialShift, TorusProjection, CoverLift>;

/// Steps applied in order to the original system. Empty means identity.
struct CoordinateChange {
    std::vector<CoordinateStep> steps;
    std::size_t original_vars = 0;

    bool is_identity() const { return steps.empty(); }

    /// Dimension of the torus orbits collapsed by projection steps.
    std::size_t orbit_dimension() const
    {
        std::size_t dim = 0;
        std::size_t vars = original_vars;
        for (const auto& s : steps)
            if (const auto* p = std::get_if<TorusProjection>(&s)) {
                dim += vars - p->retained;
                vars = p->retained;
            }
        return dim;
    }

    std::size_t cover_degree() const
    {
        Integer d = 1;
        for (const auto& s : steps)
            if (const auto* c = std::get_if<CoverLift>(&s))
                d *= c->degree;
        return static_cast<std::size_t>(to_ll(d));
    }
};

/// Maps a point of the transformed system to all of its preimages in the
/// original coordinates (several when a cover lift is present).
inline std::vector<cvec> pull_back(const CoordinateChange& change, const cvec& point)
{
    std::vector<cvec> pts{point};
    for (auto it = change.steps.rbegin(); it != change.steps.rend(); ++it) {
        std::vector<cvec> next;
        if (std::holds_alternative<MonomialShift>(*it)) {
            continue;
        } else if (const auto* p = std::get_if<TorusProjection>(&*it)) {
            const std::size_t n = p->U.rows();
            for (const auto& z : pts) {
                cvec full = cvec::Ones(static_cast<Eigen::Index>(n));
                full.head(z.size()) = z;
                cvec x(static_cast<Eigen::Index>(n));
                for (std::size_t j = 0; j < n; ++j) {
                    complex v = 1.0;
                    for (std::size_t i = 0; i < n; ++i)
                        v *= ipow(full[static_cast<Eigen::Index>(i)], to_ll(p->U(i, j)));
                    x[static_cast<Eigen::Index>(j)] = v;
                }
                next.push_back(std::move(x));
            }
        } else {
            const auto& c = std::get<CoverLift>(*it);
            for (const auto& y : pts)
                for (auto& x : solve_binomial({c.L, y}))
                    next.push_back(std::move(x));
        }
        pts = std::move(next);
    }
    return pts;
}

struct NormalizedSystem {
    UnmixedSystem system;
    CoordinateChange change;
    bool randomized = false; ///< supports differed and R·F was used
};

namespace detail {

inline bool has_zero_column(const IntMatrix& A)
{
    for (std::size_t j = 0; j < A.cols(); ++j) {
        bool zero = true;
        for (std::size_t i = 0; i < A.rows() && zero; ++i)
            zero = A(i, j) == 0;
        if (zero)
            return true;
    }
    return false;
}

} // namespace detail

/// Brings F into standard form: randomized unmixing when supports differ, a
/// monomial shift when no constant term exists, a torus projection when the
/// support is rank deficient, and a cover lift when the support lattice has
/// torsion. Throws degenerate_system when at most n+1 monomials remain.
inline NormalizedSystem normalize_standard_form(const LaurentSystem& F, const Rng& rng)
{
    validate(F);
    NormalizedSystem out;
    out.change.original_vars = F.num_vars;

    UnmixedSystem sys;
    if (is_unmixed(F)) {
        sys = padded_unmixed(F);
    } else {
        auto g = rng.stream("randomize-unmix");
        const auto q = static_cast<Eigen::Index>(F.size());
        sys = randomize_unmix(F, generic_matrix(g, q, q));
        out.randomized = true;
    }

    IntMatrix A = sys.A();
    const std::size_t m = A.cols();

    if (!detail::has_zero_column(A)) {
        std::size_t lex = 0;
        for (std::size_t j = 1; j < m; ++j)
            if (A.column(j) < A.column(lex))
                lex = j;
        Exponent shift = A.column(lex);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < A.rows(); ++i)
                A(i, j) -= shift[i];
        out.change.steps.emplace_back(MonomialShift{std::move(shift)});
    }

    const auto snf = smith_normal_form(A);
    if (snf.rank < A.rows()) {
        // rows of P·A past the rank vanish; x = z^P substitutes x^A = z^{PA}
        IntMatrix PA = snf.P * A;
        out.change.steps.emplace_back(TorusProjection{snf.P, snf.rank});
        A = PA.row_block(0, snf.rank);
    }

    if (A.rows() > 0) {
        auto red = lattice_reduce(A);
        if (red.cover_degree != 1) {
            A = red.A_tilde;
            out.change.steps.emplace_back(CoverLift{red.L, red.cover_degree});
        }
    }

    if (m <= A.rows() + 1)
        throw error(errc::degenerate_system, "m ≤ n+1 (" + std::to_string(m) + " monomials in " +
                                                 std::to_string(A.rows()) + " variables)");
    out.system = UnmixedSystem(std::move(A), sys.C());
    return out;
}

} // namespace sphom
