#include "qcascade/linalg.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcascade;
using qctest::random_matrix;

TEST(SymplecticForm, SinglePair) {
    SymplecticForm f = symplectic_form(1);
    RealMatrix expected(2, 2);
    expected << 0, 1, -1, 0;
    EXPECT_EQ(f.dof, 1);
    EXPECT_EQ(f.matrix, expected);
}

TEST(SymplecticForm, TwoPairsIsBlockDiagonal) {
    RealMatrix j = symplectic_form(2).matrix;
    ASSERT_EQ(j.rows(), 4);
    RealMatrix expected = RealMatrix::Zero(4, 4);
    expected(0, 1) = 1;
    expected(1, 0) = -1;
    expected(2, 3) = 1;
    expected(3, 2) = -1;
    EXPECT_EQ(j, expected);
}

TEST(SymplecticForm, RejectsNonPositiveDof) {
    EXPECT_THROW(symplectic_form(0), ShapeMismatch);
    EXPECT_THROW(block_reversal_permutation(0), ShapeMismatch);
}

TEST(SymplecticForm, SkewAndSquareIdentities) {
    for (Index n : {1, 2, 3, 5}) {
        RealMatrix j = symplectic_form_matrix(n);
        EXPECT_EQ(RealMatrix(j.transpose()), RealMatrix(-j));
        EXPECT_EQ(RealMatrix(j * j), RealMatrix(-RealMatrix::Identity(2 * n, 2 * n)));
    }
}

TEST(SymplecticForm, FormTimesMatchesExplicitProduct) {
    std::mt19937_64 rng(11);
    RealMatrix m = random_matrix(6, 4, rng);
    RealMatrix j = symplectic_form_matrix(3);
    EXPECT_LE(max_abs(RealMatrix(form_times(m) - j * m)), 1e-15);
    RealMatrix m2 = random_matrix(4, 6, rng);
    EXPECT_LE(max_abs(RealMatrix(times_form(m2) - m2 * j)), 1e-15);
}

TEST(IsSymplectic, IdentityAndScaled) {
    EXPECT_TRUE(is_symplectic(RealMatrix::Identity(4, 4), 1e-12));
    EXPECT_FALSE(is_symplectic(RealMatrix(2.0 * RealMatrix::Identity(4, 4)), 1e-3));
}

TEST(IsSymplectic, PublishedQrFactor) {
    // the 0.7071-patterned symplectic factor of the amplifier example
    RealMatrix s1(4, 4);
    s1 << 0.7071, 0, 0, -0.7071, 0, 0.7071, 0.7071, 0, -0.7071, 0, 0, -0.7071, 0, -0.7071,
        0.7071, 0;
    EXPECT_TRUE(is_symplectic(s1, 1e-3));
}

TEST(IsSymplectic, OddDimensionThrows) {
    EXPECT_THROW(is_symplectic(RealMatrix::Identity(3, 3), 1e-9), DimensionOdd);
}

TEST(SymplecticInverse, MatchesGeneralInverse) {
    std::mt19937_64 rng(3);
    RealMatrix s = qctest::random_symplectic(3, rng);
    EXPECT_LE(qctest::rel_diff(symplectic_inverse(s), RealMatrix(s.inverse())), 1e-9);
}

TEST(BlockReversal, SinglePairIsIdentity) {
    EXPECT_EQ(block_reversal_permutation(1), RealMatrix::Identity(2, 2));
}

TEST(BlockReversal, TwoPairsSwapsBlocks) {
    RealMatrix p = block_reversal_permutation(2);
    RealMatrix expected = RealMatrix::Zero(4, 4);
    expected(0, 2) = expected(1, 3) = expected(2, 0) = expected(3, 1) = 1;
    EXPECT_EQ(p, expected);
}

TEST(BlockReversal, SymplecticInvolution) {
    for (Index n : {1, 2, 3, 4}) {
        RealMatrix p = block_reversal_permutation(n);
        EXPECT_TRUE(is_symplectic(p, 1e-14));
        EXPECT_EQ(RealMatrix(p * p), RealMatrix::Identity(2 * n, 2 * n));
    }
}

TEST(BlockReversal, ConjugationSendsUpperToLower) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 3;
        RealMatrix z = random_matrix(2 * n, 2 * n, rng);
        for (Index bi = 0; bi < n; ++bi)
            for (Index bj = 0; bj < bi; ++bj) z.block(2 * bi, 2 * bj, 2, 2).setZero();
        ASSERT_EQ(max_below_block_diagonal(z), 0.0);
        RealMatrix p = block_reversal_permutation(n);
        RealMatrix w = p * z * p.transpose();
        EXPECT_EQ(max_above_block_diagonal(w), 0.0);  // exact zeros
    }
}

TEST(SkewGram, IntegerFixtureLeadingPair) {
    RealMatrix n1 = skew_gram(qctest::qr_integer_matrix(), 1);
    EXPECT_DOUBLE_EQ(n1(0, 1), -952.0);
    EXPECT_DOUBLE_EQ(n1(1, 0), 952.0);
    EXPECT_EQ(n1(0, 0), 0.0);
    EXPECT_EQ(n1(1, 1), 0.0);
}

TEST(SkewGram, SkewDegenerateFixtureIsZero) {
    RealMatrix n1 = skew_gram(qctest::qr_skew_degenerate_matrix(), 1);
    EXPECT_EQ(max_abs(n1), 0.0);
}

TEST(SkewGram, IdentityGivesLeadingFormBlock) {
    for (Index n : {2, 3}) {
        RealMatrix v = RealMatrix::Identity(2 * n, 2 * n);
        for (Index i = 1; i <= n; ++i) {
            RealMatrix gram = skew_gram(v, i);
            EXPECT_EQ(gram, RealMatrix(symplectic_form_matrix(n).topLeftCorner(2 * i, 2 * i)));
        }
    }
}

TEST(SkewGram, ExactlySkewSymmetric) {
    std::mt19937_64 rng(23);
    RealMatrix v = random_matrix(6, 6, rng);
    for (Index i = 1; i <= 3; ++i) {
        RealMatrix gram = skew_gram(v, i);
        EXPECT_EQ(max_abs(RealMatrix(gram + gram.transpose())), 0.0);
    }
}

TEST(SkewGram, RangeChecks) {
    EXPECT_THROW(skew_gram(RealMatrix::Identity(4, 4), 0), DimensionMismatch);
    EXPECT_THROW(skew_gram(RealMatrix::Identity(4, 4), 3), DimensionMismatch);
}

TEST(PrefixRankFlags, Fixtures) {
    auto flags1 = prefix_rank_flags(qctest::qr_integer_matrix(), -1.0);
    ASSERT_EQ(flags1.size(), 2u);
    EXPECT_TRUE(flags1[0]);
    EXPECT_TRUE(flags1[1]);

    auto flags2 = prefix_rank_flags(qctest::qr_skew_degenerate_matrix(), -1.0);
    EXPECT_FALSE(flags2[0]);

    auto flags3 = prefix_rank_flags(RealMatrix::Identity(8, 8), -1.0);
    for (bool f : flags3) EXPECT_TRUE(f);
}

TEST(SkewCanonical, AlreadyCanonical) {
    SkewCanonicalForm f = skew_canonical_decomposition(symplectic_form_matrix(1), 1e-12);
    ASSERT_EQ(f.lambdas.size(), 1u);
    EXPECT_NEAR(f.lambdas[0], 1.0, 1e-12);
    EXPECT_LE(max_abs(RealMatrix(f.reconstruct() - symplectic_form_matrix(1))), 1e-12);
}

TEST(SkewCanonical, ZeroMatrix) {
    SkewCanonicalForm f = skew_canonical_decomposition(RealMatrix::Zero(2, 2), 1e-12);
    ASSERT_EQ(f.lambdas.size(), 1u);
    EXPECT_EQ(f.lambdas[0], 0.0);
}

TEST(SkewCanonical, RandomReconstruction) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        RealMatrix z = random_matrix(6, 6, rng);
        RealMatrix x = z - z.transpose();
        SkewCanonicalForm f = skew_canonical_decomposition(x, 1e-12);
        EXPECT_LE(max_abs(RealMatrix(f.Q * f.Q.transpose() - RealMatrix::Identity(6, 6))),
                  1e-10);
        EXPECT_LE(max_abs(RealMatrix(f.reconstruct() - x)), 1e-10 * std::max(max_abs(x), 1.0));
        for (double lam : f.lambdas) EXPECT_GE(lam, 0.0);
    }
}

TEST(SkewCanonical, EigenvaluesArePlusMinusLambda) {
    std::mt19937_64 rng(29);
    RealMatrix z = random_matrix(6, 6, rng);
    RealMatrix x = z - z.transpose();
    SkewCanonicalForm f = skew_canonical_decomposition(x, 1e-12);
    Eigen::EigenSolver<RealMatrix> es(x);
    std::vector<double> imag_parts;
    for (Index i = 0; i < 6; ++i) imag_parts.push_back(std::abs(es.eigenvalues()(i).imag()));
    std::sort(imag_parts.begin(), imag_parts.end());
    std::vector<double> lams;
    for (double lam : f.lambdas) {
        lams.push_back(lam);
        lams.push_back(lam);
    }
    std::sort(lams.begin(), lams.end());
    for (std::size_t i = 0; i < lams.size(); ++i)
        EXPECT_NEAR(lams[i], imag_parts[i], 1e-9 * std::max(1.0, max_abs(x)));
}

TEST(SkewCanonical, RepeatedBlocks) {
    // two identical rotation blocks force a 4-dim eigenvalue cluster
    RealMatrix x = RealMatrix::Zero(4, 4);
    x(0, 1) = 2.5;
    x(1, 0) = -2.5;
    x(2, 3) = 2.5;
    x(3, 2) = -2.5;
    std::mt19937_64 rng(31);
    RealMatrix q = qctest::random_matrix(4, 4, rng);
    Eigen::HouseholderQR<RealMatrix> qr(q);
    RealMatrix orth = qr.householderQ() * RealMatrix::Identity(4, 4);
    RealMatrix mixed = orth.transpose() * x * orth;
    SkewCanonicalForm f = skew_canonical_decomposition(mixed, 1e-10);
    ASSERT_EQ(f.lambdas.size(), 2u);
    EXPECT_NEAR(f.lambdas[0], 2.5, 1e-9);
    EXPECT_NEAR(f.lambdas[1], 2.5, 1e-9);
    EXPECT_LE(max_abs(RealMatrix(f.reconstruct() - mixed)), 1e-9);
}

TEST(SkewCanonical, RejectsNonSkew) {
    EXPECT_THROW(skew_canonical_decomposition(RealMatrix::Identity(4, 4), 1e-10),
                 NotSkewSymmetric);
    EXPECT_THROW(skew_canonical_decomposition(RealMatrix::Zero(3, 3), 1e-10), DimensionOdd);
}
