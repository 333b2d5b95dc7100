#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace sphom {

/// Seeded source of independent, reproducible random streams. Each consumer
/// asks for a stream by purpose (and an optional index), so the values drawn
/// for one purpose do not depend on how many were drawn for another.
class Rng {
public:
    using engine = std::mt19937_64;

    explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    engine stream(std::string_view purpose, std::uint64_t index = 0) const
    {
        std::uint64_t h = 1469598103934665603ULL; // FNV-1a
        for (unsigned char c : purpose) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        return engine(seq);
    }

private:
    std::uint64_t seed_;
};

/// Uniform double in [0, 1) from the top 53 bits; portable across standard
/// libraries, unlike std::uniform_real_distribution.
inline double uniform01(Rng::engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Generic complex scalar ρ·e^{iθ}, θ ∈ [0, 2π), ρ ∈ [0.5, 1.5].
inline std::complex<double> generic_scalar(Rng::engine& g)
{
    const double theta = 2.0 * std::numbers::pi * uniform01(g);
    const double rho = 0.5 + uniform01(g);
    return std::polar(rho, theta);
}

inline Eigen::MatrixXcd generic_matrix(Rng::engine& g, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXcd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            M(i, j) = generic_scalar(g);
    return M;
}

} // namespace sphom
