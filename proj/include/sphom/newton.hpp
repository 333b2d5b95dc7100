#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "linalg.hpp"

namespace sphom {

struct NewtonOptions {
    int max_iterations = 30;
    double residual_target = 1e-10;
    double divergence_step = 1e6;
};

struct NewtonOutcome {
    Eigen::VectorXcd x;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// A square system evaluated at x: returns (residual measure, value, Jacobian).
/// The residual measure is whatever scalar the caller wants driven to zero.
struct NewtonEval {
    double residual;
    Eigen::VectorXcd value;
    Eigen::MatrixXcd jacobian;
};

using NewtonSystem = std::function<NewtonEval(const Eigen::VectorXcd&)>;

/// Damped Newton: full steps, halved (up to 8 times) while the residual
/// grows. Stops at the residual target, on a step longer than
/// divergence_step, or when the iteration budget runs out.
inline NewtonOutcome damped_newton(const NewtonSystem& f, Eigen::VectorXcd x, const NewtonOptions& opt = {})
{
    NewtonOutcome out;
    NewtonEval cur = f(x);
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (cur.residual < opt.residual_target) {
            out.converged = true;
            break;
        }
        Eigen::VectorXcd dx = cur.jacobian.partialPivLu().solve(-cur.value);
        if (!dx.allFinite() || dx.norm() > opt.divergence_step)
            break;
        double lambda = 1.0;
        Eigen::VectorXcd trial = x + dx;
        NewtonEval next = f(trial);
        for (int h = 0; h < 8 && !(next.residual < cur.residual); ++h) {
            lambda *= 0.5;
            trial = x + lambda * dx;
            next = f(trial);
        }
        x = std::move(trial);
        cur = std::move(next);
        out.iterations = it + 1;
    }
    if (cur.residual < opt.residual_target)
        out.converged = true;
    out.x = std::move(x);
    out.residual = cur.residual;
    return out;
}

} // namespace sphom
