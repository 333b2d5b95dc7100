#pragma once

// The stratified polyhedral homotopy
//
//   h_i(x, t) = (base_i + Σ_j t_{j+1} Λ_{i,j} c*_{r+1+j}) · (x^A ∘ e^{−M t₀ ω})
//
// with base = [C; c*_1..c*_r], r = n − q, and the piecewise-linear parameter
// schedules that drive t from (1,…,1) to (0,…,0).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "laurent.hpp"
#include "polyhedral.hpp"
#include "random.hpp"

namespace sphom {

struct HomotopyInstance {
    UnmixedSystem target;      ///< standard-form F, q ≤ n rows
    std::vector<cvec> slices;  ///< c*_1..c*_n
    cmat mixing;               ///< Λ, n×q; column j pairs with slice r+1+j and t_{j+1}
    Lifting lifting;
    std::vector<double> omega; ///< lifting as doubles
    double M = 0.0;

    std::size_t n() const { return target.num_vars(); }
    std::size_t q() const { return target.num_polys(); }
    std::size_t r() const { return n() - q(); }
    std::size_t m() const { return target.num_terms(); }

    /// [C; c*_1..c*_r]
    cmat base() const
    {
        cmat B(static_cast<Eigen::Index>(n()), static_cast<Eigen::Index>(m()));
        B.topRows(static_cast<Eigen::Index>(q())) = target.C();
        for (std::size_t i = 0; i < r(); ++i)
            B.row(static_cast<Eigen::Index>(q() + i)) = slices[i].transpose();
        return B;
    }

    /// Λ_{·,j} c*_{r+1+j}, the rank-one term switched by t_{j+1}.
    cmat mixing_term(std::size_t j) const
    {
        return mixing.col(static_cast<Eigen::Index>(j)) * slices[r() + j].transpose();
    }

    /// Coefficient matrix at the slicing parameters t_1..t_q (t₀ ignored).
    cmat coefficients(const cvec& t) const
    {
        cmat Cf = base();
        for (std::size_t j = 0; j < q(); ++j)
            if (t[static_cast<Eigen::Index>(j + 1)] != complex(0.0))
                Cf += t[static_cast<Eigen::Index>(j + 1)] * mixing_term(j);
        return Cf;
    }
};

/// Builds H for a standard-form target with q ≤ n: generic slices and mixing
/// coefficients from their own streams, a generic lifting, and M.
struct HomotopySetup {
    HomotopyInstance homotopy;
    RegularTriangulation triangulation;
    int lifting_draws = 0;
    double gap = 0.0;
};

inline HomotopySetup make_homotopy(const UnmixedSystem& F, const Rng& rng, double suppression = default_suppression)
{
    const std::size_t n = F.num_vars();
    const std::size_t q = F.num_polys();
    if (q > n)
        throw error(errc::bad_shape, "homotopy target must have q <= n");
    HomotopySetup out;
    HomotopyInstance& H = out.homotopy;
    H.target = F;
    auto gs = rng.stream("slices");
    for (std::size_t k = 0; k < n; ++k) {
        cvec c(static_cast<Eigen::Index>(F.num_terms()));
        for (Eigen::Index j = 0; j < c.size(); ++j)
            c[j] = generic_scalar(gs);
        H.slices.push_back(std::move(c));
    }
    auto gm = rng.stream("mixing");
    H.mixing = generic_matrix(gm, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));

    auto gt = generic_triangulation(F.A(), rng);
    H.lifting = gt.lifting;
    for (const auto& w : H.lifting.values)
        H.omega.push_back(static_cast<double>(w));
    H.M = compute_M(F.A(), gt.triangulation, H.lifting, suppression);
    out.gap = static_cast<double>(hull_gap(F.A(), H.lifting, gt.triangulation));
    out.triangulation = std::move(gt.triangulation);
    out.lifting_draws = gt.draws;
    return out;
}

/// Coordinates in which H is evaluated. With x = y ∘ e^{−M t₀ α} and
/// weight_a = ⟨α, a⟩ + ω(a) − h, H(x, t) = e^{−M t₀ h} Σ_a coef_a y^a e^{−M t₀ weight_a}.
/// The identity frame (α = 0, weight = ω) is the plain homotopy; a cell frame
/// keeps the start region well scaled. At t₀ = 0 every frame agrees.
struct Frame {
    std::vector<double> alpha;
    std::vector<double> weight;
};

inline Frame identity_frame(const HomotopyInstance& H) { return {std::vector<double>(H.n(), 0.0), H.omega}; }

inline Frame cell_frame(const HomotopyInstance& H, const LowerFacet& facet)
{
    Frame f;
    for (const auto& a : facet.normal)
        f.alpha.push_back(static_cast<double>(a));
    for (const auto& s : facet_slacks(H.target.A(), H.lifting, facet))
        f.weight.push_back(static_cast<double>(s));
    return f;
}

/// Frame coordinates → plain coordinates at t₀.
inline cvec to_plain(const Frame& f, const cvec& y, double M, double t0 = 1.0)
{
    cvec x = y;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        x[j] *= std::exp(-M * t0 * f.alpha[static_cast<std::size_t>(j)]);
    return x;
}

struct HomotopyValue {
    cvec value;
    cmat Hx;        ///< n×n
    cmat Ht;        ///< n×(q+1)
    double residual = 0.0; ///< row-wise backward error
};

inline HomotopyValue evaluate_homotopy(const HomotopyInstance& H, const Frame& frame, const cvec& x, const cvec& t,
                                       bool derivatives = true)
{
    const auto n = static_cast<Eigen::Index>(H.n());
    const auto m = static_cast<Eigen::Index>(H.m());
    if (x.size() != n || t.size() != static_cast<Eigen::Index>(H.q() + 1))
        throw error(errc::bad_shape, "homotopy argument dimensions");
    const complex t0 = t[0];
    cvec damp(m);
    for (Eigen::Index a = 0; a < m; ++a)
        damp[a] = t0 == complex(0.0) ? complex(1.0) : std::exp(-H.M * t0 * frame.weight[static_cast<std::size_t>(a)]);
    const cvec mono = monomials(H.target.exponents(), x);
    const cvec dm = mono.cwiseProduct(damp);
    const cmat Cf = H.coefficients(t);

    HomotopyValue out;
    out.value = Cf * dm;
    out.residual = relative_residual(Cf, dm);
    if (!derivatives)
        return out;
    cmat J = monomial_jacobian(H.target.exponents(), x);
    for (Eigen::Index a = 0; a < m; ++a)
        J.row(a) *= damp[a];
    out.Hx = Cf * J;
    out.Ht.resize(n, static_cast<Eigen::Index>(H.q() + 1));
    cvec dt0(m);
    for (Eigen::Index a = 0; a < m; ++a)
        dt0[a] = -H.M * frame.weight[static_cast<std::size_t>(a)] * dm[a];
    out.Ht.col(0) = Cf * dt0;
    for (std::size_t j = 0; j < H.q(); ++j)
        out.Ht.col(static_cast<Eigen::Index>(j + 1)) = H.mixing_term(j) * dm;
    return out;
}

inline cvec eval_H(const HomotopyInstance& H, const cvec& x, const Eigen::VectorXd& t)
{
    return evaluate_homotopy(H, identity_frame(H), x, t.cast<complex>(), false).value;
}

struct HomotopyJacobian {
    cmat Hx;
    cmat Ht;
};

inline HomotopyJacobian jac_H(const HomotopyInstance& H, const cvec& x, const Eigen::VectorXd& t)
{
    auto v = evaluate_homotopy(H, identity_frame(H), x, t.cast<complex>(), true);
    return {std::move(v.Hx), std::move(v.Ht)};
}

/// Squareized system F^(d)_□ at a readout point (t₀ = 0).
inline UnmixedSystem squareized_system(const HomotopyInstance& H, const Eigen::VectorXd& t)
{
    return H.target.with_coefficients(H.coefficients(t.cast<complex>()));
}

/// Slicing slots still switched on at t: c*_1..c*_r always, c*_{r+1+j} when t_{j+1} ≠ 0.
inline std::vector<std::size_t> active_slices(const HomotopyInstance& H, const Eigen::VectorXd& t)
{
    std::vector<std::size_t> act;
    for (std::size_t k = 0; k < H.r(); ++k)
        act.push_back(k);
    for (std::size_t j = 0; j < H.q(); ++j)
        if (t[static_cast<Eigen::Index>(j + 1)] != 0.0)
            act.push_back(H.r() + j);
    return act;
}

/// Toric slicing system F^(d) (q + d rows) matching the readout point t.
inline SlicedSystem sliced_system(const HomotopyInstance& H, const Eigen::VectorXd& t)
{
    std::vector<cvec> s;
    for (auto k : active_slices(H, t))
        s.push_back(H.slices[k]);
    return toric_slice(H.target, s.size(), s);
}

enum class ScheduleKind { serial, combined };

inline std::string to_string(ScheduleKind k) { return k == ScheduleKind::serial ? "serial" : "combined"; }

struct Segment {
    Eigen::VectorXd start;
    Eigen::VectorXd end;
    std::size_t readout_rank = 0; ///< d of the sample superset at the segment end
};

struct ParameterSchedule {
    ScheduleKind kind = ScheduleKind::serial;
    std::size_t d_max = 0;
    std::vector<Segment> segments;
};

namespace detail {

inline std::size_t rank_at(std::size_t r, const Eigen::VectorXd& t)
{
    std::size_t d = r;
    for (Eigen::Index j = 1; j < t.size(); ++j)
        d += t[j] != 0.0;
    return d;
}

} // namespace detail

/// q+1 segments zeroing t₀, t₁, …, t_q one at a time.
inline ParameterSchedule serial_schedule(std::size_t n, std::size_t q)
{
    ParameterSchedule s;
    s.kind = ScheduleKind::serial;
    s.d_max = n;
    Eigen::VectorXd t = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(q + 1));
    for (std::size_t k = 0; k <= q; ++k) {
        Segment seg;
        seg.start = t;
        t[static_cast<Eigen::Index>(k)] = 0.0;
        seg.end = t;
        seg.readout_rank = detail::rank_at(n - q, t);
        s.segments.push_back(std::move(seg));
    }
    return s;
}

/// First segment zeros t₀..t_{n−d_max} together (ending at the rank d_max
/// superset), then the remaining parameters one at a time.
inline ParameterSchedule combined_schedule(std::size_t n, std::size_t q, std::size_t d_max)
{
    const std::size_t r = n - q;
    if (d_max > n || d_max < r)
        throw error(errc::bad_dimension, "d_max must lie in [n−q, n] = [" + std::to_string(r) + ", " +
                                             std::to_string(n) + "]");
    ParameterSchedule s;
    s.kind = ScheduleKind::combined;
    s.d_max = d_max;
    Eigen::VectorXd t = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(q + 1));
    const std::size_t joint = n - d_max; // slice parameters zeroed with t₀
    Segment first;
    first.start = t;
    for (std::size_t k = 0; k <= joint; ++k)
        t[static_cast<Eigen::Index>(k)] = 0.0;
    first.end = t;
    first.readout_rank = detail::rank_at(r, t);
    s.segments.push_back(std::move(first));
    for (std::size_t k = joint + 1; k <= q; ++k) {
        Segment seg;
        seg.start = t;
        t[static_cast<Eigen::Index>(k)] = 0.0;
        seg.end = t;
        seg.readout_rank = detail::rank_at(r, t);
        s.segments.push_back(std::move(seg));
    }
    return s;
}

} // namespace sphom
