#include "qcascade/qsys.hpp"

#include "qcascade/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace qcascade {

namespace {

constexpr double kTiny = 1e-300;

void require_finite(const RealMatrix& m, const char* who) {
    if (!m.allFinite()) throw ShapeMismatch(std::string(who) + ": non-finite entries");
}

void require_finite(const ComplexMatrix& m, const char* who) {
    if (!m.allFinite()) throw ShapeMismatch(std::string(who) + ": non-finite entries");
}

}  // namespace

SdhSystem::SdhSystem(ComplexMatrix scattering, ComplexMatrix coupling, RealMatrix hamiltonian)
    : S(std::move(scattering)), K(std::move(coupling)), R(std::move(hamiltonian)) {
    if (S.rows() != S.cols()) throw ShapeMismatch("SdhSystem: scattering must be square");
    if (R.rows() != R.cols()) throw ShapeMismatch("SdhSystem: Hamiltonian matrix must be square");
    if (R.rows() % 2 != 0) throw DimensionOdd("SdhSystem: Hamiltonian dimension must be even");
    if (K.rows() != S.rows() || K.cols() != R.rows())
        throw ShapeMismatch("SdhSystem: coupling must be m x 2n");
    require_finite(S, "SdhSystem");
    require_finite(K, "SdhSystem");
    require_finite(R, "SdhSystem");
    m = S.rows();
    n = R.rows() / 2;
    R = 0.5 * (R + R.transpose()).eval();
}

QuadSystem::QuadSystem(RealMatrix a, RealMatrix b, RealMatrix c, RealMatrix d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    if (A.rows() != A.cols()) throw ShapeMismatch("QuadSystem: A must be square");
    if (A.rows() % 2 != 0) throw DimensionOdd("QuadSystem: state dimension must be even");
    if (D.rows() != D.cols()) throw ShapeMismatch("QuadSystem: D must be square");
    if (D.rows() % 2 != 0) throw DimensionOdd("QuadSystem: channel dimension must be even");
    n = A.rows() / 2;
    m = D.rows() / 2;
    if (B.rows() != 2 * n || B.cols() != 2 * m)
        throw ShapeMismatch("QuadSystem: B must be 2n x 2m");
    if (C.cols() != 2 * n)
        throw ShapeMismatch("QuadSystem: C must be 2m x 2n");
    if (C.rows() != 2 * m)
        throw ChannelMismatch(
            "QuadSystem: output channel count differs from input channel count; systems with "
            "fewer outputs than inputs are not supported");
    require_finite(A, "QuadSystem");
    require_finite(B, "QuadSystem");
    require_finite(C, "QuadSystem");
    require_finite(D, "QuadSystem");
}

QuadSystem sdh_to_quadrature(const SdhSystem& g) {
    const ComplexMatrix sts = g.S.adjoint() * g.S;
    if (max_abs(ComplexMatrix(sts - ComplexMatrix::Identity(g.m, g.m))) > 1e-9)
        throw NonUnitaryScattering("sdh_to_quadrature: scattering matrix is not unitary");

    const ComplexMatrix ktk = g.K.adjoint() * g.K;
    const RealMatrix im_ktk = ((ktk - ktk.conjugate()) / Complex(0.0, 2.0)).real();
    RealMatrix a = 2.0 * form_times(RealMatrix(g.R + im_ktk));

    // channel map d A_j = (dw_{2j-1} + i dw_{2j}) / 2 turns the field-basis
    // input matrix into interleaved (Im, Re) columns of W = K^dag S
    const ComplexMatrix w = g.K.adjoint() * g.S;
    RealMatrix mcols(2 * g.n, 2 * g.m);
    for (Index j = 0; j < g.m; ++j) {
        mcols.col(2 * j) = w.col(j).imag();
        mcols.col(2 * j + 1) = w.col(j).real();
    }
    RealMatrix b = 2.0 * form_times(mcols);

    RealMatrix c(2 * g.m, 2 * g.n);
    for (Index j = 0; j < g.m; ++j) {
        c.row(2 * j) = 2.0 * g.K.row(j).real();
        c.row(2 * j + 1) = 2.0 * g.K.row(j).imag();
    }

    RealMatrix d = RealMatrix::Zero(2 * g.m, 2 * g.m);
    for (Index j = 0; j < g.m; ++j)
        for (Index k = 0; k < g.m; ++k) {
            const Complex s = g.S(j, k);
            d(2 * j, 2 * k) = s.real();
            d(2 * j, 2 * k + 1) = -s.imag();
            d(2 * j + 1, 2 * k) = s.imag();
            d(2 * j + 1, 2 * k + 1) = s.real();
        }

    return QuadSystem(std::move(a), std::move(b), std::move(c), std::move(d));
}

SdhSystem quadrature_to_sdh(const QuadSystem& g, double tol) {
    RealizabilityReport rep = check_physical_realizability(g, tol);
    if (!rep.all_pass())
        throw NotRealizable(rep, "quadrature_to_sdh: system is not physically realizable");

    ComplexMatrix k(g.m, 2 * g.n);
    for (Index j = 0; j < g.m; ++j)
        k.row(j) = 0.5 * (g.C.row(2 * j).cast<Complex>() +
                          Complex(0, 1) * g.C.row(2 * j + 1).cast<Complex>());

    ComplexMatrix s(g.m, g.m);
    double block_residual = 0.0;
    for (Index j = 0; j < g.m; ++j)
        for (Index kk = 0; kk < g.m; ++kk) {
            const double re = g.D(2 * j, 2 * kk);
            const double im = g.D(2 * j + 1, 2 * kk);
            s(j, kk) = Complex(re, im);
            block_residual = std::max(block_residual, std::abs(g.D(2 * j, 2 * kk + 1) + im));
            block_residual = std::max(block_residual, std::abs(g.D(2 * j + 1, 2 * kk + 1) - re));
        }
    const double dscale = std::max(max_abs(g.D), 1.0);
    if (block_residual > tol * dscale ||
        max_abs(ComplexMatrix(s.adjoint() * s - ComplexMatrix::Identity(g.m, g.m))) >
            std::max(tol, 1e-9) * dscale * dscale)
        throw NotRealizable(rep,
                            "quadrature_to_sdh: D is not in the unitary 2x2 block form");

    // A = 2 J (R + Im K^dag K)  =>  R = sym(-J A / 2) when realizable
    const RealMatrix ja = form_times(g.A);
    RealMatrix r = -0.25 * (ja + ja.transpose());

    return SdhSystem(std::move(s), std::move(k), std::move(r));
}

RealizabilityReport check_physical_realizability(const QuadSystem& g, double tol) {
    const RealMatrix jn = symplectic_form_matrix(g.n);
    const RealMatrix jm = symplectic_form_matrix(g.m);

    const double sa = max_abs(g.A);
    const double sb = max_abs(g.B);
    const double sc = max_abs(g.C);
    const double sd = max_abs(g.D);

    RealizabilityReport rep;
    rep.tol = tol;
    rep.r1 = max_abs(RealMatrix(g.A * jn + jn * g.A.transpose() + g.B * jm * g.B.transpose())) /
             std::max({sa, sb * sb, kTiny});
    rep.r2 = max_abs(RealMatrix(jn * g.C.transpose() + g.B * jm * g.D.transpose())) /
             std::max({sc, sb * sd, kTiny});
    rep.r3 = max_abs(RealMatrix(g.D * jm * g.D.transpose() - jm)) / std::max(sd * sd, 1.0);
    rep.pass1 = rep.r1 <= tol;
    rep.pass2 = rep.r2 <= tol;
    rep.pass3 = rep.r3 <= tol;
    return rep;
}

QuadSystem transform(const QuadSystem& g, const RealMatrix& t, double symp_tol) {
    if (t.rows() != 2 * g.n || t.cols() != 2 * g.n)
        throw ShapeMismatch("transform: T must match the state dimension");
    if (!is_symplectic(t, symp_tol * std::max(1.0, max_abs(t) * max_abs(t))))
        throw NotSymplectic("transform: T is not symplectic within tolerance");
    const RealMatrix t_inv = symplectic_inverse(t);
    return QuadSystem(t * g.A * t_inv, t * g.B, g.C * t_inv, g.D);
}

ComplexMatrix transfer_function(const QuadSystem& g, Complex s) {
    ComplexMatrix resolvent_arg =
        s * ComplexMatrix::Identity(2 * g.n, 2 * g.n) - g.A.cast<Complex>();
    Eigen::FullPivLU<ComplexMatrix> lu(resolvent_arg);
    if (!lu.isInvertible())
        throw ResolventSingular("transfer_function: s is (numerically) an eigenvalue of A");
    return g.C.cast<Complex>() * lu.solve(g.B.cast<Complex>()) + g.D.cast<Complex>();
}

SdhSystem series_product(const SdhSystem& g2, const SdhSystem& g1) {
    if (g2.m != g1.m)
        throw ChannelMismatch("series_product: channel counts differ");
    if (g2.n != g1.n)
        throw ChannelMismatch("series_product: systems live on different quadrature spaces");

    ComplexMatrix s = g2.S * g1.S;
    ComplexMatrix k = g2.K + g2.S * g1.K;
    // Im{L2^dag S2 L1} as a quadratic form: the Hermitian part contributes
    // Im{M} + Im{M}', the antisymmetric remainder only a commutator constant
    const ComplexMatrix mm = g2.K.adjoint() * g2.S * g1.K;
    const RealMatrix mi = mm.imag();
    RealMatrix r = g1.R + g2.R + mi + mi.transpose();
    return SdhSystem(std::move(s), std::move(k), std::move(r));
}

std::vector<Complex> default_frequency_grid(const QuadSystem& g) {
    double radius = 0.0;
    Eigen::EigenSolver<RealMatrix> es(g.A, false);
    if (es.info() == Eigen::Success)
        for (Index i = 0; i < es.eigenvalues().size(); ++i)
            radius = std::max(radius, std::abs(es.eigenvalues()(i)));
    if (!(radius > kTiny)) radius = 1.0;

    std::vector<Complex> freqs;
    for (int k = 0; k < 8; ++k) {
        const double w = radius * std::pow(10.0, -2.0 + 4.0 * k / 7.0);
        freqs.emplace_back(0.0, w);
    }
    freqs.emplace_back(1.0, 1.0);
    return freqs;
}

SdhSystem compose_cascade(const CascadeRealization& cascade, Index n, Index m) {
    if (static_cast<Index>(cascade.subsystems.size()) != n)
        throw ShapeMismatch("compose_cascade: expected " + std::to_string(n) +
                            " subsystems, got " + std::to_string(cascade.subsystems.size()));
    auto embed = [&](const OneDofSystem& sub, Index k) {
        if (sub.K.rows() != m || sub.K.cols() != 2 || sub.R.rows() != 2 || sub.R.cols() != 2 ||
            sub.scattering.rows() != m || sub.scattering.cols() != m)
            throw ShapeMismatch("compose_cascade: subsystem " + std::to_string(k + 1) +
                                " has inconsistent shapes");
        ComplexMatrix ke = ComplexMatrix::Zero(m, 2 * n);
        ke.middleCols(2 * k, 2) = sub.K;
        RealMatrix re = RealMatrix::Zero(2 * n, 2 * n);
        re.block(2 * k, 2 * k, 2, 2) = sub.R;
        return SdhSystem(sub.scattering, std::move(ke), std::move(re));
    };
    SdhSystem acc = embed(cascade.subsystems[0], 0);
    for (std::size_t k = 1; k < cascade.subsystems.size(); ++k)
        acc = series_product(embed(cascade.subsystems[k], static_cast<Index>(k)), acc);
    return acc;
}

VerificationReport verify_cascade(const QuadSystem& original, const CascadeRealization& cascade,
                                  const std::vector<Complex>& freqs, double tol) {
    VerificationReport rep;
    rep.tol = tol;
    rep.freqs = freqs;

    const SdhSystem composite = compose_cascade(cascade, original.n, original.m);
    const QuadSystem quad_comp = sdh_to_quadrature(composite);

    bool any = false;
    for (const Complex& s : freqs) {
        double dev = -1.0;
        bool skip = false;
        try {
            const ComplexMatrix xi_orig = transfer_function(original, s);
            const ComplexMatrix xi_comp = transfer_function(quad_comp, s);
            dev = max_abs(ComplexMatrix(xi_orig - xi_comp)) / std::max(max_abs(xi_orig), kTiny);
            any = true;
        } catch (const ResolventSingular&) {
            skip = true;
        }
        rep.deviations.push_back(dev);
        rep.skipped.push_back(skip);
        if (!skip) rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    rep.pass = any && rep.max_deviation <= tol;
    return rep;
}

CascadeRealization cascade_realize(const QuadSystem& g, const SearchOptions& opts) {
    RealizabilityReport rep = check_physical_realizability(g, opts.realiz_tol);
    if (!rep.all_pass())
        throw NotRealizable(rep, "cascade_realize: system is not physically realizable");

    CascadeRealization out;
    if (g.n == 1) {
        // a single oscillator is already a cascade; T = I
        out.T = RealMatrix::Identity(2, 2);
        out.schur.S = out.T;
        out.schur.U = g.A;
        out.schur.S1 = out.T;
        out.schur.Y = out.T;
        out.schur.jordan.V = out.T;
        out.schur.jordan.J = g.A;
        SdhSystem sdh = quadrature_to_sdh(g, opts.realiz_tol);
        out.subsystems.push_back({sdh.S, sdh.K, sdh.R});
        out.permutation = {1};
        out.verification = verify_cascade(g, out, default_frequency_grid(g), opts.verify_tol);
        return out;
    }

    out.schur = symplectic_schur(g.A, opts);
    out.T = out.schur.S;
    // exact pieces: A maps to the hard-zeroed U, and T^{-1} = S1 P'
    const RealMatrix p = block_reversal_permutation(g.n);
    const RealMatrix t_inv = out.schur.S1 * p.transpose();
    QuadSystem transformed(out.schur.U, out.T * g.B, g.C * t_inv, g.D);

    SdhSystem sdh = quadrature_to_sdh(transformed, opts.realiz_tol);
    for (Index k = 0; k < g.n; ++k) {
        OneDofSystem sub;
        sub.scattering =
            k == 0 ? sdh.S : ComplexMatrix(ComplexMatrix::Identity(g.m, g.m));
        sub.K = sdh.K.middleCols(2 * k, 2);
        sub.R = sdh.R.block(2 * k, 2 * k, 2, 2);
        out.subsystems.push_back(std::move(sub));
    }
    // cascade mode k corresponds to pair n+1-k of the pre-reversal basis
    for (Index k = 0; k < g.n; ++k) out.permutation.push_back(g.n - k);

    out.verification = verify_cascade(g, out, default_frequency_grid(g), opts.verify_tol);
    if (!out.verification.pass)
        throw VerificationFailed(out.verification.max_deviation,
                                 "cascade_realize: transfer-function verification failed");
    return out;
}

}  // namespace qcascade
