#pragma once

// Start points of the homotopy at t = (1,…,1), one batch per cell of the
// regular triangulation. Each batch solves the cell's simplex system and is
// refined by Newton on the full homotopy, expressed in that cell's frame.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "binomial.hpp"
#include "error.hpp"
#include "homotopy.hpp"
#include "newton.hpp"

namespace sphom {

inline constexpr double start_residual_tol = 1e-10;
inline constexpr double start_separation = 1e-6;

struct StartPoint {
    cvec y;                  ///< coordinates in frames[cell]
    std::size_t cell = 0;    ///< facet index in the triangulation
    double residual = 0.0;   ///< backward error of H in the frame after refinement
};

struct Bootstrap {
    std::vector<StartPoint> points;
    std::vector<Frame> frames; ///< one per facet
};

/// The cell's simplex system with the t = (1,…,1) coefficients.
inline SimplexSystem cell_simplex(const HomotopyInstance& H, const LowerFacet& facet)
{
    const cmat Cf = H.coefficients(cvec::Ones(static_cast<Eigen::Index>(H.q() + 1)));
    SimplexSystem S{H.target.A().select_cols(facet.cell),
                    cmat(static_cast<Eigen::Index>(H.n()), static_cast<Eigen::Index>(facet.cell.size()))};
    for (std::size_t k = 0; k < facet.cell.size(); ++k)
        S.cell_coeffs.col(static_cast<Eigen::Index>(k)) = Cf.col(static_cast<Eigen::Index>(facet.cell[k]));
    return S;
}

/// Newton on H(·, t) in a frame, driving the backward error below `target`.
inline NewtonOutcome refine_in_frame(const HomotopyInstance& H, const Frame& frame, const cvec& y, const cvec& t,
                                     double target)
{
    NewtonOptions opt;
    opt.residual_target = target;
    return damped_newton(
        [&](const cvec& z) {
            auto v = evaluate_homotopy(H, frame, z, t, true);
            return NewtonEval{v.residual, std::move(v.value), std::move(v.Hx)};
        },
        y, opt);
}

/// Distance on the torus measured in logarithmic coordinates (angle wrapped).
inline double torus_distance(const cvec& a, const cvec& b)
{
    double d = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const complex l = std::log(a[j] / b[j]);
        d = std::max(d, std::abs(l));
    }
    return d;
}

/// All start points. Throws refinement_failure when Newton does not reach
/// the tolerance, the count differs from the normalized volume, or two start
/// points of the same cell coincide.
inline Bootstrap bootstrap(const HomotopyInstance& H, const RegularTriangulation& T)
{
    Bootstrap out;
    const cvec t1 = cvec::Ones(static_cast<Eigen::Index>(H.q() + 1));
    for (std::size_t f = 0; f < T.facets.size(); ++f) {
        out.frames.push_back(cell_frame(H, T.facets[f]));
        const Frame& frame = out.frames.back();
        const auto first = out.points.size();
        for (auto& y : solve_simplex(cell_simplex(H, T.facets[f]))) {
            auto nt = refine_in_frame(H, frame, y, t1, start_residual_tol);
            if (!nt.converged)
                throw error(errc::refinement_failure, "start point of cell " + std::to_string(f) +
                                                          " stalled at residual " + std::to_string(nt.residual));
            for (std::size_t k = first; k < out.points.size(); ++k)
                if (torus_distance(out.points[k].y, nt.x) <= start_separation)
                    throw error(errc::refinement_failure, "coincident start points in cell " + std::to_string(f));
            out.points.push_back({std::move(nt.x), f, nt.residual});
        }
    }
    if (Integer(out.points.size()) != T.normalized_volume)
        throw error(errc::refinement_failure, "start point count differs from the normalized volume");
    return out;
}

} // namespace sphom
