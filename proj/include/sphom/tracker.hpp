#pragma once

// Predictor–corrector continuation along the segments of a parameter
// schedule. Each path is tracked independently and deterministically, so
// results do not depend on how paths are spread across worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bootstrap.hpp"
#include "error.hpp"
#include "homotopy.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace sphom {

struct TrackerConfig {
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.1;
    double corrector_tol = 1e-9;
    int max_corrector_iters = 4;
    double divergence_norm = 1e8;
    double endpoint_t = 1e-6;
    int max_steps_per_segment = 10000;
    bool complex_detour = false; ///< bend the slicing parameters off the real line
    double detour_height = 0.5;

    void validate() const
    {
        const bool positive = initial_step > 0 && min_step > 0 && max_step > 0 && corrector_tol > 0 &&
                              max_corrector_iters > 0 && divergence_norm > 0 && endpoint_t > 0 &&
                              max_steps_per_segment > 0;
        if (!positive || !(min_step < initial_step && initial_step <= max_step) || endpoint_t >= 1.0)
            throw error(errc::bad_shape, "tracker configuration out of range");
    }
};

enum class PathStatus { converged, diverged, truncated, corrector_failure };

inline std::string to_string(PathStatus s)
{
    switch (s) {
    case PathStatus::converged: return "Converged";
    case PathStatus::diverged: return "Diverged";
    case PathStatus::truncated: return "Truncated";
    case PathStatus::corrector_failure: return "CorrectorFailure";
    }
    return "?";
}

struct SegmentResult {
    PathStatus status = PathStatus::converged;
    cvec x;
    int steps = 0;
    int rejections = 0;
    double residual = 0.0;
    double condition = 0.0;
};

struct PathResult {
    std::size_t id = 0;
    std::size_t cell = 0;
    PathStatus status = PathStatus::converged;
    std::vector<cvec> checkpoints;  ///< plain x at the end of each completed segment
    std::vector<double> residuals;  ///< backward error at each checkpoint
    std::size_t segments_done = 0;  ///< segments attempted (last one may have failed)
    bool continued = true;          ///< false once a filter stops the path
    int steps = 0;
    int rejections = 0;
    double final_condition = 0.0;
};

namespace detail {

// t(s) and dt/ds along a segment; s runs from 1 (start) to 0 (end).
struct SegmentPath {
    cvec start, end;
    bool detour = false;
    double height = 0.0;

    cvec at(double s) const
    {
        cvec t = end + s * (start - end);
        if (detour)
            for (Eigen::Index k = 1; k < t.size(); ++k)
                t[k] += complex(0.0, height * s * (1.0 - s)) * (start[k] - end[k]);
        return t;
    }
    cvec derivative(double s) const
    {
        cvec d = start - end;
        if (detour)
            for (Eigen::Index k = 1; k < d.size(); ++k)
                d[k] += complex(0.0, height * (1.0 - 2.0 * s)) * (start[k] - end[k]);
        return d;
    }
};

inline bool off_torus(const cvec& x, double bound)
{
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double a = std::abs(x[j]);
        if (!std::isfinite(a) || a > bound || a < 1.0 / bound)
            return true;
    }
    return false;
}

// Newton corrector at fixed t: at most `iters` steps, each at most half the
// previous one; success once the step is small relative to x and the
// backward error is below tol.
inline bool correct(const HomotopyInstance& H, const Frame& f, cvec& x, const cvec& t, const TrackerConfig& cfg)
{
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_corrector_iters; ++it) {
        auto v = evaluate_homotopy(H, f, x, t, true);
        cvec dx = v.Hx.partialPivLu().solve(-v.value);
        if (!dx.allFinite())
            return false;
        const double step = dx.norm();
        if (it == 0 && step > 0.01 * (1.0 + x.norm()))
            return false;
        if (it > 0 && step > 0.5 * prev)
            return false;
        x += dx;
        prev = step;
        if (step <= cfg.corrector_tol * (1.0 + x.norm()))
            return evaluate_homotopy(H, f, x, t, false).residual < cfg.corrector_tol;
    }
    return false;
}

} // namespace detail

/// Tracks one path over one segment from y0 (frame coordinates, on H(·, start)).
inline SegmentResult track_segment(const HomotopyInstance& H, const Frame& frame, const cvec& y0, const Segment& seg,
                                   const TrackerConfig& cfg)
{
    detail::SegmentPath path{seg.start.cast<complex>(), seg.end.cast<complex>(), cfg.complex_detour,
                             cfg.detour_height};
    SegmentResult out;
    cvec x = y0;
    double s = 1.0;
    double h = cfg.initial_step;
    int streak = 0;
    const double stop = cfg.endpoint_t;

    while (s > stop) {
        if (out.steps + out.rejections >= cfg.max_steps_per_segment) {
            out.status = PathStatus::corrector_failure;
            break;
        }
        const double step = std::min(h, s - stop);
        const double s_new = s - step;
        auto v = evaluate_homotopy(H, frame, x, path.at(s), true);
        // Davidenko: Hx·dx/ds = −Ht·dt/ds; s decreases
        cvec dxds = v.Hx.partialPivLu().solve(-(v.Ht * path.derivative(s)));
        cvec xn = x - step * dxds;
        if (dxds.allFinite() && detail::correct(H, frame, xn, path.at(s_new), cfg)) {
            x = std::move(xn);
            s = s_new;
            ++out.steps;
            if (detail::off_torus(x, cfg.divergence_norm)) {
                out.status = PathStatus::diverged;
                break;
            }
            if (++streak >= 2) {
                h = std::min(2.0 * h, cfg.max_step);
                streak = 0;
            }
        } else {
            ++out.rejections;
            streak = 0;
            h *= 0.5;
            if (h < cfg.min_step) {
                out.status = PathStatus::corrector_failure;
                break;
            }
        }
    }

    const cvec tend = path.at(0.0);
    if (s <= stop) {
        // Newton at the exact endpoint, then three verification steps whose
        // backward error must not grow beyond roundoff.
        bool ok = false;
        for (int it = 0; it < 10 && !ok; ++it) {
            auto v = evaluate_homotopy(H, frame, x, tend, true);
            cvec dx = v.Hx.partialPivLu().solve(-v.value);
            if (!dx.allFinite())
                break;
            x += dx;
            ok = dx.norm() <= cfg.corrector_tol * (1.0 + x.norm());
        }
        if (ok && !detail::off_torus(x, cfg.divergence_norm)) {
            double r = evaluate_homotopy(H, frame, x, tend, false).residual;
            for (int k = 0; k < 3 && ok; ++k) {
                auto v = evaluate_homotopy(H, frame, x, tend, true);
                cvec dx = v.Hx.partialPivLu().solve(-v.value);
                ok = dx.allFinite();
                if (!ok)
                    break;
                cvec xn = x + dx;
                const double rn = evaluate_homotopy(H, frame, xn, tend, false).residual;
                ok = rn <= std::max(r, 1e-14);
                x = std::move(xn);
                r = rn;
            }
            ok = ok && r < cfg.corrector_tol;
        }
        if (detail::off_torus(x, cfg.divergence_norm))
            out.status = PathStatus::diverged;
        else
            out.status = ok ? PathStatus::converged : PathStatus::truncated;
    }

    out.x = x;
    if (x.allFinite() && !detail::off_torus(x, std::numeric_limits<double>::max())) {
        auto v = evaluate_homotopy(H, frame, x, tend, true);
        out.residual = v.residual;
        out.condition = condition_number(v.Hx);
    } else {
        out.residual = std::numeric_limits<double>::infinity();
        out.condition = std::numeric_limits<double>::infinity();
    }
    return out;
}

/// Decides after each segment which converged paths continue: receives the
/// segment index, all paths, and the ids that converged on that segment.
using SegmentFilter = std::function<std::vector<std::size_t>(std::size_t, const std::vector<PathResult>&,
                                                             const std::vector<std::size_t>&)>;

/// Tracks every start point through the schedule. The first segment runs in
/// each start point's cell frame; once t₀ = 0 all frames coincide with the
/// plain coordinates, so checkpoints are stored as plain x.
inline std::vector<PathResult> track_schedule(const HomotopyInstance& H, const Bootstrap& starts,
                                              const ParameterSchedule& schedule, const TrackerConfig& cfg,
                                              unsigned workers = 1, const SegmentFilter& filter = {})
{
    cfg.validate();
    const std::size_t count = starts.points.size();
    std::vector<PathResult> paths(count);
    std::vector<cvec> current(count);
    for (std::size_t i = 0; i < count; ++i) {
        paths[i].id = i;
        paths[i].cell = starts.points[i].cell;
        current[i] = starts.points[i].y;
    }
    std::vector<std::size_t> active(count);
    for (std::size_t i = 0; i < count; ++i)
        active[i] = i;
    const Frame plain = identity_frame(H);

    for (std::size_t k = 0; k < schedule.segments.size() && !active.empty(); ++k) {
        const Segment& seg = schedule.segments[k];
        const bool framed = seg.start[0] != 0.0;
        parallel_for(active.size(), workers, [&](std::size_t a) {
            const std::size_t i = active[a];
            const Frame& f = framed ? starts.frames[paths[i].cell] : plain;
            SegmentResult r;
            try {
                r = track_segment(H, f, current[i], seg, cfg);
            } catch (const error& e) {
                // a coordinate hit exactly zero
                if (e.code() != errc::zero_coordinate)
                    throw;
                r.status = PathStatus::diverged;
                r.x = current[i];
            }
            PathResult& p = paths[i];
            p.steps += r.steps;
            p.rejections += r.rejections;
            p.final_condition = r.condition;
            p.segments_done = k + 1;
            p.status = r.status;
            // every segment ends with t₀ = 0, where frame and plain coordinates agree
            current[i] = std::move(r.x);
            if (r.status == PathStatus::converged) {
                p.checkpoints.push_back(current[i]);
                p.residuals.push_back(r.residual);
            }
        });
        std::vector<std::size_t> converged;
        for (auto i : active)
            if (paths[i].status == PathStatus::converged)
                converged.push_back(i);
        std::vector<std::size_t> next = filter ? filter(k, paths, converged) : converged;
        std::sort(next.begin(), next.end());
        for (auto i : converged)
            if (!std::binary_search(next.begin(), next.end(), i))
                paths[i].continued = false;
        active = std::move(next);
    }
    return paths;
}

} // namespace sphom
