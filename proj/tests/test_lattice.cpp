#include <random>

#include <gtest/gtest.h>

#include <sphom/lattice.hpp>

#include "oracles.hpp"

using namespace sphom;

namespace {

IntMatrix random_matrix(std::mt19937_64& g, std::size_t r, std::size_t c, int bound)
{
    std::uniform_int_distribution<int> d(-bound, bound);
    IntMatrix A(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            A(i, j) = d(g);
    return A;
}

std::vector<std::vector<long long>> rows_of(const IntMatrix& A)
{
    std::vector<std::vector<long long>> out(A.rows(), std::vector<long long>(A.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            out[i][j] = to_ll(A(i, j));
    return out;
}

void expect_smith_invariants(const IntMatrix& A, const SmithDecomposition& s)
{
    EXPECT_EQ(s.P * A * s.Q, s.diagonal());
    EXPECT_EQ(abs(determinant(s.P)), 1);
    EXPECT_EQ(abs(determinant(s.Q)), 1);
    EXPECT_EQ(s.P * s.P_inv, IntMatrix::identity(A.rows()));
    EXPECT_EQ(s.Q * s.Q_inv, IntMatrix::identity(A.cols()));
    for (std::size_t i = 0; i < s.rank; ++i) {
        EXPECT_GT(s.invariant_factors[i], 0);
        if (i + 1 < s.rank) {
            EXPECT_EQ(s.invariant_factors[i + 1] % s.invariant_factors[i], 0);
        }
    }
}

} // namespace

TEST(Smith, IdentityIsTrivial)
{
    const auto I = IntMatrix::identity(3);
    auto s = smith_normal_form(I);
    EXPECT_EQ(s.P, I);
    EXPECT_EQ(s.Q, I);
    EXPECT_EQ(s.invariant_factors, (std::vector<Integer>{1, 1, 1}));
    EXPECT_EQ(s.rank, 3u);
}

TEST(Smith, TwoByTwoFactorsMatchDeterminantAndGcd)
{
    IntMatrix A{{2, 4}, {6, 8}};
    auto s = smith_normal_form(A);
    expect_smith_invariants(A, s);
    ASSERT_EQ(s.invariant_factors.size(), 2u);
    EXPECT_EQ(s.invariant_factors[0], 2);
    EXPECT_EQ(s.invariant_factors[1], 4);
    EXPECT_EQ(s.invariant_factors[0] * s.invariant_factors[1], abs(determinant(A)));
}

TEST(Smith, UpperTriangularExample)
{
    IntMatrix A{{1, 1}, {0, 2}};
    auto s = smith_normal_form(A);
    expect_smith_invariants(A, s);
    EXPECT_EQ(s.invariant_factors, (std::vector<Integer>{1, 2}));
}

TEST(Smith, ZeroMatrixHasRankZero)
{
    IntMatrix Z(2, 3);
    auto s = smith_normal_form(Z);
    EXPECT_EQ(s.rank, 0u);
    EXPECT_TRUE(s.invariant_factors.empty());
    expect_smith_invariants(Z, s);
}

TEST(Smith, DeterministicForFixedInput)
{
    IntMatrix A{{4, -6, 2}, {3, 9, 12}};
    auto a = smith_normal_form(A);
    auto b = smith_normal_form(A);
    EXPECT_EQ(a.P, b.P);
    EXPECT_EQ(a.Q, b.Q);
}

TEST(Smith, LargeEntriesStayExact)
{
    IntMatrix A{{1000000007LL, 998244353LL}, {123456789LL, 987654321LL}};
    auto s = smith_normal_form(A);
    expect_smith_invariants(A, s);
    EXPECT_EQ(s.invariant_factors[0] * s.invariant_factors[1], abs(determinant(A)));
}

TEST(SmithProperty, RandomMatricesAgreeWithMinorOracle)
{
    std::mt19937_64 g(7);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t r = 1 + g() % 4, c = 1 + g() % 4;
        IntMatrix A = random_matrix(g, r, c, 9);
        auto s = smith_normal_form(A);
        expect_smith_invariants(A, s);
        auto D = oracle::determinantal_divisors(rows_of(A));
        Integer prod = 1;
        for (std::size_t k = 0; k < D.size(); ++k) {
            if (D[k] == 0) {
                EXPECT_EQ(s.rank, k);
                break;
            }
            prod *= s.invariant_factors[k];
            EXPECT_EQ(prod, D[k]) << A;
        }
    }
}

TEST(Kernel, CoordinateProjection)
{
    IntMatrix A{{1, 0, 0}, {0, 1, 0}};
    auto kc = kernel_complement(A);
    EXPECT_TRUE((A * kc.B).is_zero());
    EXPECT_EQ(kc.C * kc.B, IntMatrix::identity(1));
    // B spans (0,0,±1)
    EXPECT_EQ(kc.B(0, 0), 0);
    EXPECT_EQ(kc.B(1, 0), 0);
    EXPECT_EQ(abs(kc.B(2, 0)), 1);
    EXPECT_EQ(abs(determinant(vstack(kc.C, A))), 1);
}

TEST(Kernel, InvariantsOnSmallExample)
{
    IntMatrix A{{1, 0, 1}, {0, 1, 1}};
    auto kc = kernel_complement(A);
    EXPECT_TRUE((A * kc.B).is_zero());
    EXPECT_EQ(kc.C * kc.B, IntMatrix::identity(1));
    EXPECT_EQ(abs(determinant(vstack(kc.C, A))), 1);
    // B = ±(1, 1, −1)
    EXPECT_EQ(abs(kc.B(0, 0)), 1);
    EXPECT_EQ(kc.B(0, 0), kc.B(1, 0));
    EXPECT_EQ(kc.B(2, 0), -kc.B(0, 0));
}

TEST(Kernel, TorsionIsRejected)
{
    IntMatrix A{{2, 0, 2}, {0, 2, 2}};
    try {
        kernel_complement(A);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::not_torsion_free);
    }
}

TEST(Kernel, RankDeficiencyIsRejected)
{
    IntMatrix A{{1, 2, 3}, {1, 2, 3}};
    try {
        kernel_complement(A);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::rank_deficient);
    }
}

TEST(Kernel, SquareInputIsBadShape)
{
    try {
        kernel_complement(IntMatrix::identity(2));
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::bad_shape);
    }
}

TEST(KernelProperty, RandomTorsionFreeInputs)
{
    std::mt19937_64 g(11);
    int accepted = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + g() % 3, m = n + 1 + g() % 4;
        IntMatrix A = random_matrix(g, n, m, 5);
        auto rep = standard_form_report(A);
        if (!rep.full_row_rank || !rep.torsion_free)
            continue;
        auto kc = kernel_complement(A);
        EXPECT_TRUE((A * kc.B).is_zero());
        EXPECT_EQ(kc.C * kc.B, IntMatrix::identity(m - n));
        EXPECT_EQ(abs(determinant(vstack(kc.C, A))), 1);
        ++accepted;
    }
    EXPECT_GT(accepted, 50);
}

TEST(StandardForm, MotivatingSupportPassesAllConditions)
{
    IntMatrix A{{3, 2, 2, 1, 0, 0, 1, 0, 0}, {0, 1, 0, 2, 3, 2, 0, 1, 0}};
    auto r = standard_form_report(A);
    EXPECT_TRUE(r.enough_monomials);
    EXPECT_TRUE(r.has_zero_column);
    EXPECT_TRUE(r.full_row_rank);
    EXPECT_TRUE(r.torsion_free);
    EXPECT_TRUE(r.all());
}

TEST(StandardForm, DiagonalTwoFailsCountAndTorsion)
{
    auto r = standard_form_report(IntMatrix{{2, 0}, {0, 2}});
    EXPECT_FALSE(r.enough_monomials);
    EXPECT_FALSE(r.torsion_free);
}

TEST(StandardForm, RepeatedRowIsRankDeficient)
{
    auto r = standard_form_report(IntMatrix{{1, 2, 3}, {1, 2, 3}});
    EXPECT_FALSE(r.full_row_rank);
}

TEST(LatticeReduce, TorsionFreeHasDegreeOne)
{
    IntMatrix A{{1, 0, 1, 0}, {0, 1, 1, 0}};
    auto red = lattice_reduce(A);
    EXPECT_EQ(red.cover_degree, 1);
    EXPECT_EQ(red.L * red.A_tilde, A);
    EXPECT_EQ(abs(determinant(red.L)), 1);
}

TEST(LatticeReduce, DegreeTwoExample)
{
    IntMatrix A{{2, 0, 2}, {0, 1, 1}};
    auto red = lattice_reduce(A);
    EXPECT_EQ(red.cover_degree, 2);
    EXPECT_EQ(red.L * red.A_tilde, A);
    EXPECT_TRUE(standard_form_report(red.A_tilde).torsion_free);
    EXPECT_EQ(abs(determinant(red.L)), 2);
}

TEST(LatticeReduce, Scalar)
{
    auto red = lattice_reduce(IntMatrix{{3}});
    EXPECT_EQ(red.L, (IntMatrix{{3}}));
    EXPECT_EQ(red.A_tilde, (IntMatrix{{1}}));
    EXPECT_EQ(red.cover_degree, 3);
}

TEST(LatticeReduce, RankDeficientRejected)
{
    try {
        lattice_reduce(IntMatrix{{1, 2}, {2, 4}});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::rank_deficient);
    }
}

TEST(LatticeReduceProperty, RandomFullRank)
{
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + g() % 3, m = n + g() % 4;
        IntMatrix A = random_matrix(g, n, m, 6);
        if (rank(A) < n)
            continue;
        auto red = lattice_reduce(A);
        EXPECT_EQ(red.L * red.A_tilde, A);
        auto s = smith_normal_form(red.A_tilde);
        for (const auto& d : s.invariant_factors)
            EXPECT_EQ(d, 1);
        Integer prod = 1;
        for (const auto& d : smith_normal_form(A).invariant_factors)
            prod *= d;
        EXPECT_EQ(abs(determinant(red.L)), prod);
        EXPECT_EQ(red.cover_degree, prod);
    }
}

TEST(Unimodular, InverseRoundTrip)
{
    IntMatrix U{{2, 1}, {1, 1}};
    auto V = unimodular_inverse(U);
    EXPECT_EQ(U * V, IntMatrix::identity(2));
    try {
        unimodular_inverse(IntMatrix{{2, 0}, {0, 1}});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::not_torsion_free);
    }
}

TEST(IntMatrixBasics, ShapeErrors)
{
    EXPECT_THROW((IntMatrix{{1, 2}, {3}}), error);
    EXPECT_THROW(IntMatrix(2, 3) * IntMatrix(2, 3), error);
    EXPECT_THROW(determinant(IntMatrix(2, 3)), error);
    EXPECT_EQ(determinant(IntMatrix{{0, 1}, {1, 0}}), -1);
}
