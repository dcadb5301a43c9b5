#include "qcascade/qsys.hpp"

#include "qcascade/linalg.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcascade;
using qctest::amplifier_sdh;
using qctest::rel_diff;

namespace {

constexpr double kGamma = 7.2e7;
constexpr double kEps = 0.6 * kGamma;

QuadSystem amplifier_quad() { return sdh_to_quadrature(amplifier_sdh()); }

RealMatrix expected_amplifier_a() {
    RealMatrix a(4, 4);
    a << -3.6, 0, 2.16, 0, 0, -3.6, 0, -2.16, 2.16, 0, -3.6, 0, 0, -2.16, 0, -3.6;
    return 1e7 * a;
}

// the transformed system of the worked example, published to 4-5 digits
RealMatrix expected_b1() {
    RealMatrix b(4, 4);
    b << 0, -6, 0, -6, 6, 0, 6, 0, -6, 0, 6, 0, 0, -6, 0, 6;
    return 1e3 * b;
}

RealMatrix expected_c1() {
    RealMatrix c(4, 4);
    c << 0, -6, 6, 0, 6, 0, 0, 6, 0, -6, -6, 0, 6, 0, 0, -6;
    return 1e3 * c;
}

RealMatrix amplifier_transform() {
    SearchOptions opts;
    opts.basis_override = qctest::amplifier_eigenbasis();
    SchurResult schur = symplectic_schur(expected_amplifier_a(), opts);
    return schur.S;
}

}  // namespace

TEST(SdhToQuadrature, AmplifierFixture) {
    QuadSystem g = amplifier_quad();
    EXPECT_LE(rel_diff(g.A, expected_amplifier_a()), 1e-12);
    const double sq = std::sqrt(kGamma);
    EXPECT_LE(max_abs(RealMatrix(g.B + sq * RealMatrix::Identity(4, 4))), 1e-8);
    EXPECT_LE(max_abs(RealMatrix(g.C - sq * RealMatrix::Identity(4, 4))), 1e-8);
    EXPECT_LE(max_abs(RealMatrix(g.D - RealMatrix::Identity(4, 4))), 1e-12);
    // published rounded values
    EXPECT_NEAR(g.B(0, 0), -8.4853e3, 1e0);
    EXPECT_NEAR(g.C(0, 0), 8.4853e3, 1e0);
}

TEST(SdhToQuadrature, EmptyDynamics) {
    SdhSystem g(ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 4),
                RealMatrix::Zero(4, 4));
    QuadSystem q = sdh_to_quadrature(g);
    EXPECT_EQ(max_abs(q.A), 0.0);
    EXPECT_EQ(max_abs(q.B), 0.0);
    EXPECT_EQ(max_abs(q.C), 0.0);
    EXPECT_EQ(q.D, RealMatrix::Identity(4, 4));
}

TEST(SdhToQuadrature, RandomTriplesAreRealizable) {
    std::mt19937_64 rng(100);
    for (int trial = 0; trial < 100; ++trial) {
        QuadSystem g = qctest::random_realizable(3, 2, rng);
        RealizabilityReport rep = check_physical_realizability(g, 1e-8);
        EXPECT_TRUE(rep.all_pass()) << "r1=" << rep.r1 << " r2=" << rep.r2 << " r3=" << rep.r3;
    }
}

TEST(SdhToQuadrature, NonUnitaryScatteringRejected) {
    SdhSystem g(ComplexMatrix(2.0 * ComplexMatrix::Identity(1, 1)), ComplexMatrix::Zero(1, 2),
                RealMatrix::Zero(2, 2));
    EXPECT_THROW(sdh_to_quadrature(g), NonUnitaryScattering);
}

TEST(QuadratureToSdh, AmplifierRecovery) {
    SdhSystem back = quadrature_to_sdh(amplifier_quad(), 1e-8);
    // coupling rate and pump strength recovered
    EXPECT_NEAR(std::norm(2.0 * back.K(0, 0)), kGamma, 1e-6 * kGamma);
    EXPECT_NEAR(back.R(0, 3), kEps / 4.0, 1e-6 * kEps);
    EXPECT_NEAR(back.R(1, 2), kEps / 4.0, 1e-6 * kEps);
    EXPECT_LE(max_abs(ComplexMatrix(back.S - ComplexMatrix::Identity(2, 2))), 1e-9);
}

TEST(QuadratureToSdh, ZeroSystem) {
    QuadSystem g(RealMatrix::Zero(4, 4), RealMatrix::Zero(4, 4), RealMatrix::Zero(4, 4),
                 RealMatrix::Identity(4, 4));
    SdhSystem back = quadrature_to_sdh(g, 1e-10);
    EXPECT_EQ(max_abs(back.K), 0.0);
    EXPECT_EQ(max_abs(back.R), 0.0);
    EXPECT_LE(max_abs(ComplexMatrix(back.S - ComplexMatrix::Identity(2, 2))), 1e-12);
}

TEST(QuadratureToSdh, RoundTrip) {
    std::mt19937_64 rng(200);
    for (int trial = 0; trial < 50; ++trial) {
        SdhSystem g = qctest::random_sdh(2, 2, rng);
        QuadSystem quad = sdh_to_quadrature(g);
        SdhSystem back = quadrature_to_sdh(quad, 1e-8);
        EXPECT_LE(rel_diff(back.K, g.K), 1e-9);
        EXPECT_LE(rel_diff(back.R, g.R), 1e-9);
        EXPECT_LE(rel_diff(back.S, g.S), 1e-9);
        QuadSystem again = sdh_to_quadrature(back);
        EXPECT_LE(rel_diff(again.A, quad.A), 1e-9);
        EXPECT_LE(rel_diff(again.B, quad.B), 1e-9);
    }
}

TEST(QuadratureToSdh, NotRealizableRejected) {
    QuadSystem g = amplifier_quad();
    QuadSystem bad(g.A, RealMatrix(1.01 * g.B), g.C, g.D);
    try {
        quadrature_to_sdh(bad, 1e-8);
        FAIL() << "expected NotRealizable";
    } catch (const NotRealizable& e) {
        EXPECT_FALSE(e.report.pass1);
    }
}

TEST(Realizability, AmplifierPasses) {
    RealizabilityReport rep = check_physical_realizability(amplifier_quad(), 1e-8);
    EXPECT_TRUE(rep.all_pass());
}

TEST(Realizability, ZeroSystemExact) {
    QuadSystem g(RealMatrix::Zero(4, 4), RealMatrix::Zero(4, 4), RealMatrix::Zero(4, 4),
                 RealMatrix::Identity(4, 4));
    RealizabilityReport rep = check_physical_realizability(g, 1e-12);
    EXPECT_EQ(rep.r1, 0.0);
    EXPECT_EQ(rep.r2, 0.0);
    EXPECT_EQ(rep.r3, 0.0);
}

TEST(Realizability, ScaledInputFails) {
    QuadSystem g = amplifier_quad();
    QuadSystem bad(g.A, RealMatrix(1.01 * g.B), g.C, g.D);
    RealizabilityReport rep = check_physical_realizability(bad, 1e-8);
    EXPECT_FALSE(rep.pass1);
}

TEST(Transform, IdentityLeavesUnchanged) {
    QuadSystem g = amplifier_quad();
    QuadSystem h = transform(g, RealMatrix::Identity(4, 4));
    EXPECT_LE(rel_diff(h.A, g.A), 1e-14);
    EXPECT_LE(rel_diff(h.B, g.B), 1e-14);
}

TEST(Transform, AmplifierPublishedCascadeForm) {
    QuadSystem g = amplifier_quad();
    QuadSystem h = transform(g, amplifier_transform());
    RealMatrix a1 = RealMatrix::Zero(4, 4);
    a1.diagonal() << -5.76e7, -1.44e7, -5.76e7, -1.44e7;
    EXPECT_LE(rel_diff(h.A, a1), 1e-4);
    EXPECT_LE(max_abs(RealMatrix(h.B - expected_b1())), 1e0);
    EXPECT_LE(max_abs(RealMatrix(h.C - expected_c1())), 1e0);
    EXPECT_LE(max_abs(RealMatrix(h.D - RealMatrix::Identity(4, 4))), 1e-9);
}

TEST(Transform, PreservesRealizabilityAndTransfer) {
    std::mt19937_64 rng(300);
    for (int trial = 0; trial < 100; ++trial) {
        QuadSystem g = qctest::random_realizable(2, 2, rng);
        RealMatrix t = qctest::random_symplectic(2, rng);
        QuadSystem h = transform(g, t);
        EXPECT_TRUE(check_physical_realizability(h, 1e-8).all_pass());
        for (const Complex& s : default_frequency_grid(g)) {
            ComplexMatrix x1 = transfer_function(g, s);
            ComplexMatrix x2 = transfer_function(h, s);
            EXPECT_LE(rel_diff(x2, x1), 1e-8);
        }
    }
}

TEST(Transform, NonSymplecticRejected) {
    QuadSystem g = amplifier_quad();
    EXPECT_THROW(transform(g, RealMatrix(2.0 * RealMatrix::Identity(4, 4))), NotSymplectic);
}

TEST(TransferFunction, HighFrequencyLimitIsD) {
    QuadSystem g = amplifier_quad();
    ComplexMatrix xi = transfer_function(g, Complex(1e12, 0.0));
    EXPECT_LE(max_abs(ComplexMatrix(xi - g.D.cast<Complex>())), 1e-4);
}

TEST(TransferFunction, SimilarityInvariantOffAxis) {
    std::mt19937_64 rng(301);
    QuadSystem g = qctest::random_realizable(2, 2, rng);
    RealMatrix t = qctest::random_symplectic(2, rng);
    QuadSystem h = transform(g, t);
    const Complex s(1.0, 1.0);
    EXPECT_LE(rel_diff(transfer_function(h, s), transfer_function(g, s)), 1e-9);
}

TEST(TransferFunction, ResolventSingularAtEigenvalue) {
    QuadSystem g = amplifier_quad();
    EXPECT_THROW(transfer_function(g, Complex(-5.76e7, 0.0)), ResolventSingular);
}

TEST(TransferFunction, AmplifierEqualsCascadeFormOnAxis) {
    QuadSystem g = amplifier_quad();
    QuadSystem h = transform(g, amplifier_transform());
    const Complex s(0.0, 1e7);
    EXPECT_LE(rel_diff(transfer_function(h, s), transfer_function(g, s)), 1e-8);
}

TEST(SeriesProduct, IdentityComposition) {
    SdhSystem id(ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 4),
                 RealMatrix::Zero(4, 4));
    SdhSystem out = series_product(id, id);
    EXPECT_LE(max_abs(ComplexMatrix(out.S - ComplexMatrix::Identity(2, 2))), 1e-15);
    EXPECT_EQ(max_abs(out.K), 0.0);
    EXPECT_EQ(max_abs(out.R), 0.0);
}

TEST(SeriesProduct, ScatteringOnlyComposesScattering) {
    std::mt19937_64 rng(55);
    ComplexMatrix s1 = qctest::random_unitary(2, rng);
    ComplexMatrix s2 = qctest::random_unitary(2, rng);
    SdhSystem g1(s1, ComplexMatrix::Zero(2, 4), RealMatrix::Zero(4, 4));
    SdhSystem g2(s2, ComplexMatrix::Zero(2, 4), RealMatrix::Zero(4, 4));
    SdhSystem out = series_product(g2, g1);
    EXPECT_LE(max_abs(ComplexMatrix(out.S - s2 * s1)), 1e-14);
}

TEST(SeriesProduct, MatchesTransferProduct) {
    // the composite's transfer function equals Xi_2 * Xi_1 when the factors
    // live on disjoint mode blocks
    std::mt19937_64 rng(56);
    for (int trial = 0; trial < 25; ++trial) {
        ComplexMatrix k1 = ComplexMatrix::Zero(2, 4);
        k1.leftCols(2) = qctest::random_complex_matrix(2, 2, rng);
        ComplexMatrix k2 = ComplexMatrix::Zero(2, 4);
        k2.rightCols(2) = qctest::random_complex_matrix(2, 2, rng);
        RealMatrix r1 = RealMatrix::Zero(4, 4);
        r1.topLeftCorner(2, 2) = qctest::random_matrix(2, 2, rng);
        RealMatrix r2 = RealMatrix::Zero(4, 4);
        r2.bottomRightCorner(2, 2) = qctest::random_matrix(2, 2, rng);
        SdhSystem g1(qctest::random_unitary(2, rng), k1, r1);
        SdhSystem g2(ComplexMatrix::Identity(2, 2), k2, r2);

        SdhSystem comp = series_product(g2, g1);
        QuadSystem qc = sdh_to_quadrature(comp);
        QuadSystem q1 = sdh_to_quadrature(g1);
        QuadSystem q2 = sdh_to_quadrature(g2);
        for (double w : {0.3, 1.0, 3.3, 11.0}) {
            const Complex s(0.0, w);
            ComplexMatrix truth = transfer_function(q2, s) * transfer_function(q1, s);
            ComplexMatrix got = transfer_function(qc, s);
            EXPECT_LE(rel_diff(got, truth), 1e-10);
        }
    }
}

TEST(SeriesProduct, Associative) {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 25; ++trial) {
        SdhSystem g1 = qctest::random_sdh(2, 2, rng);
        SdhSystem g2 = qctest::random_sdh(2, 2, rng);
        SdhSystem g3 = qctest::random_sdh(2, 2, rng);
        SdhSystem left = series_product(g3, series_product(g2, g1));
        SdhSystem right = series_product(series_product(g3, g2), g1);
        const double scale =
            std::max({max_abs(left.R), max_abs(left.K), max_abs(left.S), 1.0});
        EXPECT_LE(max_abs(ComplexMatrix(left.S - right.S)) / scale, 1e-12);
        EXPECT_LE(max_abs(ComplexMatrix(left.K - right.K)) / scale, 1e-12);
        EXPECT_LE(max_abs(RealMatrix(left.R - right.R)) / scale, 1e-12);
    }
}

TEST(SeriesProduct, ChannelMismatchRejected) {
    SdhSystem g1(ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 4),
                 RealMatrix::Zero(4, 4));
    SdhSystem g2(ComplexMatrix::Identity(1, 1), ComplexMatrix::Zero(1, 4),
                 RealMatrix::Zero(4, 4));
    EXPECT_THROW(series_product(g2, g1), ChannelMismatch);
}

TEST(CascadeRealize, AmplifierWithPinnedBasis) {
    SearchOptions opts;
    opts.basis_override = qctest::amplifier_eigenbasis();
    QuadSystem g = amplifier_quad();
    CascadeRealization cascade = cascade_realize(g, opts);
    ASSERT_EQ(cascade.subsystems.size(), 2u);

    // both one-mode factors carry the pump coefficient -5.4e6 on (q p + p q)
    for (const auto& sub : cascade.subsystems) {
        EXPECT_NEAR(0.5 * sub.R(0, 1), -5.4e6, 1.0);
        EXPECT_NEAR(sub.R(0, 1), sub.R(1, 0), 1e-6);
        EXPECT_NEAR(sub.R(0, 0), 0.0, 1.0);
        EXPECT_NEAR(sub.R(1, 1), 0.0, 1.0);
    }

    // published couplings: K1 = 1e3 [[3i, -3], [3i, -3]]
    ComplexMatrix k1_expected(2, 2);
    k1_expected << Complex(0, 3e3), Complex(-3e3, 0), Complex(0, 3e3), Complex(-3e3, 0);
    EXPECT_LE(max_abs(ComplexMatrix(cascade.subsystems[0].K - k1_expected)), 1.0);
    ComplexMatrix k2_expected(2, 2);
    k2_expected << Complex(3e3, 0), Complex(0, 3e3), Complex(-3e3, 0), Complex(0, -3e3);
    EXPECT_LE(max_abs(ComplexMatrix(cascade.subsystems[1].K - k2_expected)), 1.0);

    EXPECT_TRUE(cascade.verification.pass);
    EXPECT_LE(cascade.verification.max_deviation, 1e-6);

    // pump power bookkeeping: two factors at amplitude 4|h| use half the
    // power of the original at amplitude eps
    const double amp = 4.0 * std::abs(0.5 * cascade.subsystems[0].R(0, 1));
    EXPECT_NEAR(2.0 * amp * amp, 0.5 * kEps * kEps, 1e-3 * kEps * kEps);
}

TEST(CascadeRealize, SingleModePassthrough) {
    std::mt19937_64 rng(600);
    QuadSystem g = qctest::random_realizable(1, 1, rng);
    CascadeRealization cascade = cascade_realize(g, {});
    ASSERT_EQ(cascade.subsystems.size(), 1u);
    EXPECT_EQ(cascade.T, RealMatrix::Identity(2, 2));
    SdhSystem direct = quadrature_to_sdh(g, 1e-8);
    EXPECT_LE(rel_diff(cascade.subsystems[0].K, direct.K), 1e-12);
    EXPECT_LE(rel_diff(cascade.subsystems[0].R, direct.R), 1e-12);
    EXPECT_LE(cascade.verification.max_deviation, 1e-10);
}

TEST(CascadeRealize, RandomSystemsVerify) {
    std::mt19937_64 rng(601);
    int done = 0;
    while (done < 50) {
        QuadSystem g = qctest::random_realizable(3, 2, rng, /*identity_scattering=*/true);
        SearchOptions opts;
        opts.seed = static_cast<std::uint64_t>(done);
        CascadeRealization cascade;
        try {
            cascade = cascade_realize(g, opts);
        } catch (const NotAdmissible&) {
            continue;
        } catch (const DefectiveMatrix&) {
            continue;
        }
        ++done;
        EXPECT_TRUE(cascade.verification.pass);
        EXPECT_LE(cascade.verification.max_deviation, 1e-6);
        // structural invariant: the transformed drift has exact zeros above
        // the 2x2 block diagonal
        QuadSystem h = transform(g, cascade.T);
        EXPECT_EQ(max_above_block_diagonal(cascade.schur.U), 0.0);
        EXPECT_LE(max_above_block_diagonal(h.A), 1e-7 * max_abs(g.A));
    }
}

TEST(CascadeRealize, NotRealizableRejected) {
    QuadSystem g = amplifier_quad();
    QuadSystem bad(g.A, RealMatrix(1.01 * g.B), g.C, g.D);
    EXPECT_THROW(cascade_realize(bad, {}), NotRealizable);
}

TEST(VerifyCascade, AmplifierPasses) {
    SearchOptions opts;
    opts.basis_override = qctest::amplifier_eigenbasis();
    QuadSystem g = amplifier_quad();
    CascadeRealization cascade = cascade_realize(g, opts);
    VerificationReport rep = verify_cascade(g, cascade, default_frequency_grid(g), 1e-6);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.max_deviation, 1e-6);
}

TEST(VerifyCascade, CorruptedSubsystemFails) {
    SearchOptions opts;
    opts.basis_override = qctest::amplifier_eigenbasis();
    QuadSystem g = amplifier_quad();
    CascadeRealization cascade = cascade_realize(g, opts);
    cascade.subsystems[1].R.setZero();
    VerificationReport rep = verify_cascade(g, cascade, default_frequency_grid(g), 1e-6);
    EXPECT_FALSE(rep.pass);
    EXPECT_GT(rep.max_deviation, 1e-3);
}

TEST(VerifyCascade, SkipsSingularFrequencies) {
    SearchOptions opts;
    opts.basis_override = qctest::amplifier_eigenbasis();
    QuadSystem g = amplifier_quad();
    CascadeRealization cascade = cascade_realize(g, opts);
    std::vector<Complex> freqs = {Complex(-5.76e7, 0.0), Complex(0.0, 1e7)};
    VerificationReport rep = verify_cascade(g, cascade, freqs, 1e-6);
    EXPECT_TRUE(rep.skipped[0]);
    EXPECT_FALSE(rep.skipped[1]);
    EXPECT_TRUE(rep.pass);
}

TEST(QuadSystem, FewerOutputsRejected) {
    EXPECT_THROW(QuadSystem(RealMatrix::Zero(4, 4), RealMatrix::Zero(4, 4),
                            RealMatrix::Zero(2, 4), RealMatrix::Identity(4, 4)),
                 ChannelMismatch);
}

TEST(QuadSystem, NonFiniteRejected) {
    RealMatrix a = RealMatrix::Zero(2, 2);
    a(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(QuadSystem(a, RealMatrix::Zero(2, 2), RealMatrix::Zero(2, 2),
                            RealMatrix::Identity(2, 2)),
                 ShapeMismatch);
}
