#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace sphom {

inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& J)
{
    if (J.size() == 0)
        return Eigen::VectorXd();
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(J).singularValues();
}

/// σ_min/σ_max over the square part; 0 for an all-zero matrix.
inline double sigma_ratio(const Eigen::MatrixXcd& J)
{
    auto s = singular_values(J);
    if (s.size() == 0 || s[0] == 0.0 || !std::isfinite(s[0]))
        return 0.0;
    // a wide or tall matrix has min(rows, cols) values; missing ones are zero
    if (J.rows() != J.cols())
        return 0.0;
    return s[s.size() - 1] / s[0];
}

/// Condition number σ_max/σ_min, +inf when singular.
inline double condition_number(const Eigen::MatrixXcd& J)
{
    double r = sigma_ratio(J);
    return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

/// Number of columns minus the numerical rank, where singular values at or
/// below tau·σ_max count as zero.
inline long nullity(const Eigen::MatrixXcd& J, double tau)
{
    auto s = singular_values(J);
    const double smax = s.size() ? s[0] : 0.0;
    long rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tau * smax && s[i] > 0.0)
            ++rank;
    return static_cast<long>(J.cols()) - rank;
}

inline double max_abs(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

} // namespace sphom
