#pragma once

// The stratified pipeline: normalize, build and bootstrap the homotopy, track
// the schedule, and at every readout point keep the nonsingular zeros of the
// squareized system (the next segment's starts) and the subset of those that
// lie smoothly on a component of the matching dimension.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bootstrap.hpp"
#include "error.hpp"
#include "homotopy.hpp"
#include "laurent.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "standard_form.hpp"
#include "tracker.hpp"

namespace sphom {

struct FilterConfig {
    double residual_eps = 1e-8;
    double rank_tau = 1e-8;
    double merge_tol = 1e-6;

    void validate() const
    {
        for (double v : {residual_eps, rank_tau, merge_tol})
            if (!(v > 0.0 && v < 1.0))
                throw error(errc::bad_shape, "filter thresholds must lie in (0, 1)");
    }
};

struct Candidate {
    std::size_t path_id = 0;
    cvec x;
};

struct NonsingularSplit {
    std::vector<Candidate> kept;
    std::vector<double> ratio;        ///< σ_min/σ_max for each kept point
    std::vector<Candidate> merged;    ///< within merge_tol of a lower path id
    std::vector<Candidate> singular;  ///< ratio ≤ tau
};

/// Merges near-duplicates (the lowest path id survives), then keeps the
/// points where the square Jacobian has σ_min/σ_max > tau.
inline NonsingularSplit filter_nonsingular(std::vector<Candidate> points, const UnmixedSystem& Fsq, double tau,
                                           double merge_tol = 1e-6)
{
    std::sort(points.begin(), points.end(),
              [](const Candidate& a, const Candidate& b) { return a.path_id < b.path_id; });
    NonsingularSplit out;
    std::vector<Candidate> unique;
    for (auto& p : points) {
        bool dup = false;
        for (const auto& u : unique)
            if ((u.x - p.x).norm() <= merge_tol) {
                dup = true;
                break;
            }
        (dup ? out.merged : unique).push_back(std::move(p));
    }
    for (auto& p : unique) {
        const double ratio = sigma_ratio(jacobian(Fsq, p.x));
        if (ratio > tau) {
            out.ratio.push_back(ratio);
            out.kept.push_back(std::move(p));
        } else {
            out.singular.push_back(std::move(p));
        }
    }
    return out;
}

struct Membership {
    bool accepted = false;
    std::string reason; ///< "residual" or "nullity" when rejected
    double residual = 0.0;
    long nullity = 0;
};

/// Accepts x into W_d when the row-wise backward error of F^(d) is at most
/// residual_eps and DF(x) has nullity exactly d.
inline Membership sample_membership(const cvec& x, std::size_t d, const UnmixedSystem& F_sliced,
                                    const UnmixedSystem& F, const FilterConfig& filter)
{
    Membership m;
    m.residual = relative_residual(F_sliced, x);
    m.nullity = nullity(jacobian(F, x), filter.rank_tau);
    if (!(m.residual <= filter.residual_eps))
        m.reason = "residual";
    else if (m.nullity != static_cast<long>(d))
        m.reason = "nullity";
    else
        m.accepted = true;
    return m;
}

struct Transported {
    cvec x;
    double residual = 0.0; ///< backward error against the original system
};

/// Every preimage of x in the original coordinates with its residual there.
inline std::vector<Transported> transport_back(const cvec& x, const CoordinateChange& change,
                                               const UnmixedSystem& original)
{
    std::vector<Transported> out;
    for (auto& p : pull_back(change, x)) {
        const double r = relative_residual(original, p);
        out.push_back({std::move(p), r});
    }
    return out;
}

struct SamplePoint {
    cvec x;                    ///< original coordinates
    cvec normalized;           ///< standard-form coordinates
    std::size_t dimension = 0;
    double residual_F = 0.0;   ///< backward error of the original system
    double residual_sliced = 0.0;
    long nullity_estimate = 0;
    double condition = 0.0;    ///< of the squareized Jacobian at readout
    std::size_t path_id = 0;
    std::size_t segment = 0;
};

struct DroppedPoint {
    std::size_t path_id = 0;
    std::size_t segment = 0;
    std::size_t rank = 0;
    std::string reason;
    cvec x;
};

struct LadderRung {
    std::size_t segment = 0;
    std::size_t rank = 0;    ///< d of the readout
    std::size_t raw = 0;     ///< |X_k|, converged checkpoints
    std::size_t unique = 0;  ///< after merging
    std::size_t filtered = 0; ///< |X̃_k|
    std::size_t accepted = 0; ///< members of W_d before transport
};

struct RunMetadata {
    std::uint64_t seed = 0;
    std::size_t num_vars = 0;        ///< original n
    std::size_t num_polys = 0;       ///< original q
    std::size_t normalized_vars = 0;
    std::size_t normalized_terms = 0;
    std::string normalized_volume;   ///< decimal integer
    ScheduleKind schedule = ScheduleKind::serial;
    std::size_t d_max = 0;
    std::size_t segments = 0;
    std::size_t paths = 0;
    int lifting_draws = 0;
    double M = 0.0;
    double gap = 0.0;
    std::size_t orbit_dimension = 0;
    std::size_t cover_degree = 1;
    bool randomized_unmix = false;
    bool randomized_overdetermined = false;
    std::vector<std::string> coordinate_steps;
    std::map<std::string, double> timings_ms;
};

struct StratifiedResult {
    std::map<std::size_t, std::vector<SamplePoint>> sample_sets; ///< key d, every d in [r, n]
    std::vector<LadderRung> ladder;
    std::vector<DroppedPoint> dropped;
    std::vector<PathResult> paths;
    RunMetadata metadata;

    std::map<std::string, std::size_t> dropped_counts() const
    {
        std::map<std::string, std::size_t> c;
        for (const auto& d : dropped)
            ++c[d.reason];
        return c;
    }
};

struct RunOptions {
    FilterConfig filter;
    TrackerConfig tracker;
    ScheduleKind schedule = ScheduleKind::serial;
    std::optional<std::size_t> d_max; ///< combined only; clamped to [n−q, n]
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double suppression = default_suppression;
};

namespace detail {

inline std::vector<std::string> describe(const CoordinateChange& c)
{
    std::vector<std::string> out;
    for (const auto& s : c.steps) {
        if (std::holds_alternative<MonomialShift>(s))
            out.emplace_back("MonomialShift");
        else if (std::holds_alternative<TorusProjection>(s))
            out.emplace_back("TorusProjection");
        else
            out.emplace_back("CoverLift");
    }
    return out;
}

class Stopwatch {
public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

} // namespace detail

/// Everything fixed before tracking starts: the original system over its
/// union support, its standard form, the n-row target actually tracked, and
/// the homotopy built on it.
struct Prepared {
    UnmixedSystem original;
    NormalizedSystem normalized;
    UnmixedSystem target;
    bool randomized_overdetermined = false;
    HomotopySetup setup;
};

inline Prepared prepare(const LaurentSystem& F, const Rng& rng, double suppression = default_suppression)
{
    Prepared p;
    p.original = padded_unmixed(F);
    p.normalized = normalize_standard_form(F, rng);
    const UnmixedSystem& Fstd = p.normalized.system;
    const std::size_t n = Fstd.num_vars();
    // more equations than variables: track a generic n-row combination, but
    // judge membership against all rows
    p.target = Fstd;
    if (Fstd.num_polys() > n) {
        auto g = rng.stream("overdetermined");
        p.target = Fstd.with_coefficients(
            generic_matrix(g, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(Fstd.num_polys())) * Fstd.C());
        p.randomized_overdetermined = true;
    }
    p.setup = make_homotopy(p.target, rng, suppression);
    return p;
}

inline StratifiedResult run_stratified(const LaurentSystem& F, const RunOptions& opt = {})
{
    opt.filter.validate();
    opt.tracker.validate();
    detail::Stopwatch clock;
    const Rng rng(opt.seed);
    StratifiedResult res;
    RunMetadata& meta = res.metadata;
    meta.seed = opt.seed;
    meta.num_vars = F.num_vars;
    meta.num_polys = F.size();

    const Prepared prep = prepare(F, rng, opt.suppression);
    const UnmixedSystem& original = prep.original;
    const NormalizedSystem& ns = prep.normalized;
    const UnmixedSystem& Fstd = ns.system;
    const std::size_t n = Fstd.num_vars();
    meta.normalized_vars = n;
    meta.normalized_terms = Fstd.num_terms();
    meta.orbit_dimension = ns.change.orbit_dimension();
    meta.cover_degree = ns.change.cover_degree();
    meta.randomized_unmix = ns.randomized;
    meta.randomized_overdetermined = prep.randomized_overdetermined;
    meta.coordinate_steps = detail::describe(ns.change);

    const HomotopySetup& setup = prep.setup;
    const HomotopyInstance& H = setup.homotopy;
    meta.normalized_volume = setup.triangulation.normalized_volume.str();
    meta.lifting_draws = setup.lifting_draws;
    meta.M = H.M;
    meta.gap = setup.gap;
    meta.timings_ms["setup"] = clock.lap();

    const Bootstrap starts = bootstrap(H, setup.triangulation);
    meta.paths = starts.points.size();
    meta.timings_ms["bootstrap"] = clock.lap();

    ParameterSchedule schedule;
    if (opt.schedule == ScheduleKind::serial) {
        schedule = serial_schedule(n, H.q());
    } else {
        std::size_t dm = opt.d_max.value_or(n);
        dm = std::clamp(dm, H.r(), n);
        schedule = combined_schedule(n, H.q(), dm);
    }
    meta.schedule = schedule.kind;
    meta.d_max = schedule.d_max;
    meta.segments = schedule.segments.size();

    for (std::size_t d = H.r(); d <= n; ++d)
        res.sample_sets[d];
    std::vector<SamplePoint> accepted;

    auto readout = [&](std::size_t k, const std::vector<PathResult>& paths,
                       const std::vector<std::size_t>& converged) {
        const Segment& seg = schedule.segments[k];
        const std::size_t d = seg.readout_rank;
        LadderRung rung;
        rung.segment = k;
        rung.rank = d;
        rung.raw = converged.size();

        std::vector<Candidate> cands;
        for (auto i : converged)
            cands.push_back({i, paths[i].checkpoints.back()});
        const UnmixedSystem Fsq = squareized_system(H, seg.end);
        auto split = filter_nonsingular(std::move(cands), Fsq, opt.filter.rank_tau, opt.filter.merge_tol);
        rung.unique = split.kept.size() + split.singular.size();
        rung.filtered = split.kept.size();
        for (auto& c : split.merged)
            res.dropped.push_back({c.path_id, k, d, "merged", std::move(c.x)});
        for (auto& c : split.singular)
            res.dropped.push_back({c.path_id, k, d, "singular", std::move(c.x)});

        std::vector<cvec> active;
        for (auto j : active_slices(H, seg.end))
            active.push_back(H.slices[j]);
        const UnmixedSystem Fd = toric_slice(Fstd, active.size(), active).system;

        std::vector<std::size_t> next;
        for (std::size_t p = 0; p < split.kept.size(); ++p) {
            const Candidate& c = split.kept[p];
            next.push_back(c.path_id);
            const Membership mem = sample_membership(c.x, d, Fd, Fstd, opt.filter);
            if (!mem.accepted) {
                res.dropped.push_back({c.path_id, k, d, mem.reason, c.x});
                continue;
            }
            SamplePoint s;
            s.normalized = c.x;
            s.dimension = d;
            s.residual_sliced = mem.residual;
            s.nullity_estimate = mem.nullity;
            s.condition = 1.0 / split.ratio[p];
            s.path_id = c.path_id;
            s.segment = k;
            accepted.push_back(std::move(s));
            ++rung.accepted;
        }
        res.ladder.push_back(rung);
        return next;
    };

    res.paths = track_schedule(H, starts, schedule, opt.tracker, opt.workers, readout);
    meta.timings_ms["tracking"] = clock.lap();

    for (const auto& p : res.paths)
        if (p.status != PathStatus::converged)
            res.dropped.push_back({p.id, p.segments_done == 0 ? 0 : p.segments_done - 1,
                                   p.segments_done == 0 ? n : schedule.segments[p.segments_done - 1].readout_rank,
                                   to_string(p.status), p.checkpoints.empty() ? cvec() : p.checkpoints.back()});

    for (auto& s : accepted) {
        for (auto& t : transport_back(s.normalized, ns.change, original)) {
            if (!(t.residual < opt.filter.residual_eps)) {
                res.dropped.push_back({s.path_id, s.segment, s.dimension, "transport", t.x});
                continue;
            }
            SamplePoint out = s;
            out.x = std::move(t.x);
            out.residual_F = t.residual;
            res.sample_sets[s.dimension].push_back(std::move(out));
        }
    }
    meta.timings_ms["transport"] = clock.lap();
    return res;
}

} // namespace sphom
