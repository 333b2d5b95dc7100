#include <random>

#include <gtest/gtest.h>

#include <sphom/bootstrap.hpp>
#include <sphom/homotopy.hpp>
#include <sphom/linalg.hpp>

#include "oracles.hpp"
#include "systems.hpp"

using namespace sphom;

namespace {

std::vector<std::vector<long long>> exps_of(const UnmixedSystem& F)
{
    std::vector<std::vector<long long>> out;
    for (const auto& e : F.exponents())
        out.emplace_back(e.begin(), e.end());
    return out;
}

std::vector<oracle::cd> to_std(const cvec& x) { return {x.data(), x.data() + x.size()}; }

cvec naive_H(const HomotopyInstance& H, const cvec& x, const Eigen::VectorXd& t)
{
    cvec v(static_cast<Eigen::Index>(H.n()));
    for (std::size_t i = 0; i < H.n(); ++i)
        v[static_cast<Eigen::Index>(i)] =
            oracle::homotopy_row(i, exps_of(H.target), H.target.C(), H.slices, H.mixing, H.omega, H.M, to_std(x),
                                 std::vector<double>(t.data(), t.data() + t.size()));
    return v;
}

Eigen::VectorXd random_t(std::mt19937_64& g, std::size_t q)
{
    Eigen::VectorXd t(static_cast<Eigen::Index>(q + 1));
    for (auto& v : t)
        v = testsys::unit(g);
    return t;
}

HomotopySetup motivating_setup(std::uint64_t seed = 0)
{
    return make_homotopy(padded_unmixed(testsys::motivating()), Rng(seed));
}

} // namespace

TEST(Homotopy, EndpointIsTargetForSquareSystems)
{
    auto S = motivating_setup();
    const auto& H = S.homotopy;
    std::mt19937_64 g(1);
    for (int k = 0; k < 20; ++k) {
        cvec x = testsys::random_torus_point(g, 2);
        const cvec a = eval_H(H, x, Eigen::VectorXd::Zero(3));
        const cvec b = evaluate(H.target, x);
        EXPECT_LT((a - b).norm() / b.norm(), 1e-13);
    }
}

TEST(Homotopy, EndpointAppendsSlicesWhenUnderdetermined)
{
    std::mt19937_64 g(2);
    auto F = testsys::random_unmixed(g, 1, 2, 5, 2);
    auto S = make_homotopy(F, Rng(3));
    const auto& H = S.homotopy;
    EXPECT_EQ(H.r(), 1u);
    cvec x = testsys::random_torus_point(g, 2);
    const cvec v = eval_H(H, x, Eigen::VectorXd::Zero(2));
    const cvec mono = monomials(F.exponents(), x);
    EXPECT_LT(std::abs(v[0] - (F.C() * mono)(0)), 1e-13 * mono.norm());
    EXPECT_LT(std::abs(v[1] - (H.slices[0].transpose() * mono)(0)), 1e-13 * mono.norm());
}

TEST(Homotopy, MatchesNaiveEvaluator)
{
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + g() % 3, q = 1 + g() % n;
        auto F = testsys::random_unmixed(g, q, n, n + 3 + g() % 4, 2);
        auto S = make_homotopy(F, Rng(static_cast<std::uint64_t>(trial)));
        cvec x = testsys::random_torus_point(g, n);
        Eigen::VectorXd t = random_t(g, q);
        t[0] *= 0.05; // keep e^{−M t₀ ω} representable
        const cvec a = eval_H(S.homotopy, x, t);
        const cvec b = naive_H(S.homotopy, x, t);
        EXPECT_LT((a - b).norm(), 1e-12 * std::max(1.0, b.norm()));
    }
}

TEST(Homotopy, JacobianMatchesFiniteDifferences)
{
    std::mt19937_64 g(4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + g() % 3, q = 1 + g() % n;
        auto F = testsys::random_unmixed(g, q, n, n + 3 + g() % 4, 2);
        auto S = make_homotopy(F, Rng(static_cast<std::uint64_t>(trial)));
        const auto& H = S.homotopy;
        cvec x = testsys::random_torus_point(g, n);
        Eigen::VectorXd t = random_t(g, q);
        t[0] *= 0.05;
        auto J = jac_H(H, x, t);
        auto fx = oracle::fd_jacobian([&](const cvec& z) { return eval_H(H, z, t); }, x);
        EXPECT_LT((J.Hx - fx).norm(), 1e-6 * std::max(1.0, J.Hx.norm()));
        auto ft = oracle::fd_jacobian(
            [&](const cvec& s) { return eval_H(H, x, s.real()); }, t.cast<complex>(), 1e-7);
        EXPECT_LT((J.Ht - ft).norm(), 1e-6 * std::max(1.0, J.Ht.norm()));
    }
}

TEST(Homotopy, CellFrameIsRescaledPlainHomotopy)
{
    auto S = motivating_setup();
    const auto& H = S.homotopy;
    std::mt19937_64 g(5);
    const double t0 = 0.02;
    for (const auto& facet : S.triangulation.facets) {
        const Frame f = cell_frame(H, facet);
        cvec y = testsys::random_torus_point(g, 2);
        cvec t = cvec::Ones(3);
        t[0] = t0;
        const cvec framed = evaluate_homotopy(H, f, y, t, false).value;
        const cvec plain = evaluate_homotopy(H, identity_frame(H), to_plain(f, y, H.M, t0), t, false).value;
        const double scale = std::exp(-H.M * t0 * static_cast<double>(facet.level));
        EXPECT_LT((plain - scale * framed).norm(), 1e-12 * plain.norm());
    }
}

TEST(Homotopy, RejectsOverdeterminedTarget)
{
    std::mt19937_64 g(6);
    auto F = testsys::random_unmixed(g, 3, 2, 6, 2);
    EXPECT_THROW(make_homotopy(F, Rng(0)), error);
}

TEST(Homotopy, DeterministicForSeed)
{
    auto a = motivating_setup(7), b = motivating_setup(7), c = motivating_setup(8);
    EXPECT_EQ(a.homotopy.mixing, b.homotopy.mixing);
    EXPECT_EQ(a.homotopy.M, b.homotopy.M);
    EXPECT_NE(a.homotopy.mixing, c.homotopy.mixing);
}

TEST(Homotopy, SlicedAndSquareizedSystemsAtReadout)
{
    auto S = motivating_setup();
    const auto& H = S.homotopy;
    Eigen::VectorXd t(3);
    t << 0.0, 0.0, 1.0;
    EXPECT_EQ(active_slices(H, t), (std::vector<std::size_t>{1}));
    auto Fd = sliced_system(H, t);
    EXPECT_EQ(Fd.d, 1u);
    EXPECT_EQ(Fd.system.C().rows(), 3);
    // the squareized system is F + t₂Λ_{·,1}c*_2, i.e. squareize(F^(1), Λ_{·,1})
    const auto Q = squareize(Fd, H.mixing.col(1));
    EXPECT_LT((squareized_system(H, t).C() - Q.C()).norm(), 1e-14);
    t << 0.0, 0.0, 0.0;
    EXPECT_TRUE(active_slices(H, t).empty());
    EXPECT_EQ(squareized_system(H, t).C(), H.target.C());
}

TEST(Schedule, SerialZerosOneParameterAtATime)
{
    auto s = serial_schedule(2, 2);
    ASSERT_EQ(s.segments.size(), 3u);
    EXPECT_EQ(s.segments[0].readout_rank, 2u);
    EXPECT_EQ(s.segments[1].readout_rank, 1u);
    EXPECT_EQ(s.segments[2].readout_rank, 0u);
    EXPECT_EQ(s.segments[0].start, Eigen::VectorXd::Ones(3));
    EXPECT_EQ(s.segments[2].end, Eigen::VectorXd::Zero(3));
    for (std::size_t k = 1; k < 3; ++k)
        EXPECT_EQ(s.segments[k].start, s.segments[k - 1].end);

    auto u = serial_schedule(3, 1);
    ASSERT_EQ(u.segments.size(), 2u);
    EXPECT_EQ(u.segments[0].readout_rank, 3u);
    EXPECT_EQ(u.segments[1].readout_rank, 2u);
}

TEST(Schedule, CombinedSkipsHigherDimensions)
{
    auto s = combined_schedule(2, 2, 1);
    ASSERT_EQ(s.segments.size(), 2u);
    Eigen::VectorXd e(3);
    e << 0.0, 0.0, 1.0;
    EXPECT_EQ(s.segments[0].end, e);
    EXPECT_EQ(s.segments[0].readout_rank, 1u);
    EXPECT_EQ(s.segments[1].readout_rank, 0u);

    auto full = combined_schedule(2, 2, 2);
    auto serial = serial_schedule(2, 2);
    ASSERT_EQ(full.segments.size(), serial.segments.size());
    for (std::size_t k = 0; k < full.segments.size(); ++k)
        EXPECT_EQ(full.segments[k].end, serial.segments[k].end);

    EXPECT_EQ(combined_schedule(2, 2, 0).segments.size(), 1u);
    try {
        combined_schedule(3, 1, 1);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::bad_dimension);
    }
    EXPECT_THROW(combined_schedule(2, 2, 3), error);
}

TEST(Bootstrap, MotivatingSystemHasNineStarts)
{
    auto S = motivating_setup();
    auto B = bootstrap(S.homotopy, S.triangulation);
    ASSERT_EQ(B.points.size(), 9u);
    const cvec t1 = cvec::Ones(3);
    for (const auto& p : B.points) {
        auto v = evaluate_homotopy(S.homotopy, B.frames[p.cell], p.y, t1);
        EXPECT_LT(v.residual, 1e-10);
        EXPECT_GT(sigma_ratio(v.Hx), 1e-10);
    }
}

TEST(Bootstrap, UnitSquareHasTwoStarts)
{
    std::mt19937_64 g(9);
    UnmixedSystem F(IntMatrix{{0, 1, 0, 1}, {0, 0, 1, 1}}, cmat::Ones(2, 4));
    cmat C(2, 4);
    for (auto& c : C.reshaped())
        c = testsys::random_coeff(g);
    auto S = make_homotopy(F.with_coefficients(C), Rng(1));
    auto B = bootstrap(S.homotopy, S.triangulation);
    EXPECT_EQ(B.points.size(), 2u);
}

TEST(Bootstrap, LinearSystemStartIsTheUniqueSolution)
{
    std::mt19937_64 g(10);
    cmat C(2, 3);
    for (auto& c : C.reshaped())
        c = testsys::random_coeff(g);
    UnmixedSystem F(IntMatrix{{0, 1, 0}, {0, 0, 1}}, C);
    auto S = make_homotopy(F, Rng(2));
    const auto& H = S.homotopy;
    auto B = bootstrap(H, S.triangulation);
    ASSERT_EQ(B.points.size(), 1u);
    // plain coordinates at t = 1: columns scaled by e^{−M ω_a}
    cmat L = H.coefficients(cvec::Ones(3));
    for (Eigen::Index a = 0; a < 3; ++a)
        L.col(a) *= std::exp(-H.M * H.omega[static_cast<std::size_t>(a)]);
    const cvec expect = L.rightCols(2).fullPivLu().solve(-L.col(0));
    const cvec got = to_plain(B.frames[0], B.points[0].y, H.M);
    EXPECT_LT((got - expect).norm() / expect.norm(), 1e-10);
}

TEST(BootstrapProperty, CountEqualsOracleVolume)
{
    std::mt19937_64 g(11);
    int checked = 0;
    while (checked < 10) {
        const std::size_t n = 1 + g() % 3;
        auto F = testsys::random_unmixed(g, n, n, n + 2 + g() % 5, 1);
        std::vector<oracle::pt> pts;
        for (const auto& e : F.exponents())
            pts.emplace_back(e.begin(), e.end());
        const long long vol = oracle::normalized_volume(pts);
        if (vol == 0)
            continue;
        auto S = make_homotopy(F, Rng(static_cast<std::uint64_t>(checked)));
        auto B = bootstrap(S.homotopy, S.triangulation);
        EXPECT_EQ(static_cast<long long>(B.points.size()), vol);
        ++checked;
    }
}
