#include "qcascade/symplectic_schur.hpp"

#include "qcascade/linalg.hpp"

#include <cmath>
#include <string>

namespace qcascade {

namespace {

// Rebuilds a block descriptor list from a numerically block-diagonal J
// produced by a pinned basis: 1x1 entries for isolated diagonal values,
// rotation-dilation pairs when the off-diagonal couple is present.
RealJordanForm form_from_pinned_basis(const RealMatrix& v, const RealMatrix& a,
                                      double rank_tol) {
    RealJordanForm form;
    form.V = v;
    RealMatrix j = v.partialPivLu().solve(a * v);
    const Index dim = j.rows();
    const double thr = 1e-8 * std::max(max_abs(j), 1e-300);

    // zero the numerically-zero couplings so the block scan is unambiguous
    Index c = 0;
    while (c < dim) {
        if (c + 1 < dim && (std::abs(j(c, c + 1)) > thr || std::abs(j(c + 1, c)) > thr)) {
            const double a_k = 0.5 * (j(c, c) + j(c + 1, c + 1));
            const double b_k = 0.5 * (j(c, c + 1) - j(c + 1, c));
            form.blocks.push_back({true, a_k, b_k});
            c += 2;
        } else {
            form.blocks.push_back({false, j(c, c), 0.0});
            c += 1;
        }
    }
    form.J = RealMatrix::Zero(dim, dim);
    Index p = 0;
    for (const auto& blk : form.blocks) {
        if (blk.complex_pair) {
            form.J(p, p) = blk.a;
            form.J(p, p + 1) = blk.b;
            form.J(p + 1, p) = -blk.b;
            form.J(p + 1, p + 1) = blk.a;
            p += 2;
        } else {
            form.J(p, p) = blk.a;
            p += 1;
        }
    }

    if (max_abs(RealMatrix(j - form.J)) > 1e-6 * std::max(max_abs(j), 1.0))
        throw NotAdmissible(
            "symplectic_schur: pinned basis does not block-diagonalize the matrix");
    AdmissibilityReport rep = check_admissibility(form.V, form.J, rank_tol);
    if (!rep.admissible) {
        std::string msg = "symplectic_schur: pinned basis is not admissible";
        if (rep.failing_prefix)
            msg += " (leading skew Gram matrix " + std::to_string(*rep.failing_prefix) +
                   " is rank deficient)";
        throw NotAdmissible(msg);
    }
    return form;
}

}  // namespace

SchurResult symplectic_schur_from_jordan(const RealMatrix& a, const RealJordanForm& jordan,
                                         const SearchOptions& opts) {
    const Index dim = a.rows();
    const Index n = dim / 2;
    const double rank_tol = opts.rank_tol < 0 ? default_rank_tol(dim) : opts.rank_tol;

    SchurResult res;
    res.jordan = jordan;
    QrResult qr = symplectic_qr(jordan.V, rank_tol);
    res.S1 = qr.S;
    res.Y = qr.Y;

    const RealMatrix p = block_reversal_permutation(n);
    const RealMatrix s1_inv = symplectic_inverse(res.S1);
    res.S = p * s1_inv;
    // S^{-1} = S1 P' exactly, no inversion needed
    const RealMatrix s_inv = res.S1 * p.transpose();

    RealMatrix u = res.S * a * s_inv;
    const double zero_thr = opts.zero_tol * std::max(max_abs(a), 1e-300);
    const double above = max_above_block_diagonal(u);
    if (above > zero_thr)
        throw TriangularizationResidual(
            above, "symplectic_schur: residual above the block diagonal (" +
                       std::to_string(above) + ") exceeds the hard-zero threshold");
    for (Index bi = 0; bi < n; ++bi)
        for (Index bj = bi + 1; bj < n; ++bj)
            u.block(2 * bi, 2 * bj, 2, 2).setZero();
    res.U = std::move(u);
    return res;
}

SchurResult symplectic_schur(const RealMatrix& a, const SearchOptions& opts) {
    if (a.rows() != a.cols()) throw ShapeMismatch("symplectic_schur: matrix must be square");
    if (a.rows() % 2 != 0) throw DimensionOdd("symplectic_schur: dimension must be even");
    const double rank_tol = opts.rank_tol < 0 ? default_rank_tol(a.rows()) : opts.rank_tol;

    RealJordanForm jordan;
    if (opts.basis_override.has_value()) {
        if (opts.basis_override->rows() != a.rows() || opts.basis_override->cols() != a.cols())
            throw ShapeMismatch("symplectic_schur: basis override has wrong shape");
        jordan = form_from_pinned_basis(*opts.basis_override, a, rank_tol);
    } else {
        jordan = admissible_basis_search(a, opts);
    }
    return symplectic_schur_from_jordan(a, jordan, opts);
}

}  // namespace qcascade
