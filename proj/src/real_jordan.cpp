#include "qcascade/real_jordan.hpp"

#include "qcascade/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qcascade {

namespace {

struct RealEntry {
    double lambda;
    RealVector column;
};

struct ComplexEntry {
    double a;
    double b;  // > 0
    RealVector col_re;
    RealVector col_im;
};

void fix_real_column_sign(RealVector& u) {
    for (Index i = 0; i < u.size(); ++i) {
        if (std::abs(u(i)) > 1e-12) {
            if (u(i) < 0) u = -u;
            return;
        }
    }
}

RealMatrix assemble_v(const std::vector<RealEntry>& reals,
                      const std::vector<ComplexEntry>& cplx, Index dim) {
    RealMatrix v(dim, dim);
    Index c = 0;
    for (const auto& r : reals) v.col(c++) = r.column;
    for (const auto& z : cplx) {
        v.col(c++) = z.col_re;
        v.col(c++) = z.col_im;
    }
    return v;
}

RealMatrix assemble_j(const std::vector<RealEntry>& reals,
                      const std::vector<ComplexEntry>& cplx, Index dim) {
    RealMatrix j = RealMatrix::Zero(dim, dim);
    Index c = 0;
    for (const auto& r : reals) {
        j(c, c) = r.lambda;
        ++c;
    }
    for (const auto& z : cplx) {
        j(c, c) = z.a;
        j(c, c + 1) = z.b;
        j(c + 1, c) = -z.b;
        j(c + 1, c + 1) = z.a;
        c += 2;
    }
    return j;
}

double condition_number(const RealMatrix& m) {
    Eigen::JacobiSVD<RealMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / sv(sv.size() - 1);
}

bool upper_block_triangular_ok(const RealMatrix& j, double thr) {
    return max_below_block_diagonal(j) <= thr;
}

}  // namespace

RealJordanForm real_jordan_simple(const RealMatrix& a, double tol, double cond_cap) {
    if (a.rows() != a.cols()) throw ShapeMismatch("real_jordan_simple: matrix must be square");
    if (a.rows() % 2 != 0) throw DimensionOdd("real_jordan_simple: dimension must be even");
    const Index dim = a.rows();

    Eigen::EigenSolver<RealMatrix> es(a);
    if (es.info() != Eigen::Success)
        throw Error("real_jordan_simple: eigensolver did not converge");
    const Eigen::VectorXcd evals = es.eigenvalues();
    const Eigen::MatrixXcd evecs = es.eigenvectors();

    const double thr = tol * std::max(max_abs(a), 1e-300);

    std::vector<RealEntry> reals;
    std::vector<ComplexEntry> cplx;
    std::vector<bool> used(static_cast<std::size_t>(dim), false);

    for (Index i = 0; i < dim; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        const Complex lam = evals(i);
        if (std::abs(lam.imag()) <= thr) {
            used[static_cast<std::size_t>(i)] = true;
            Eigen::VectorXcd v = evecs.col(i);
            RealVector u = v.real().norm() >= v.imag().norm()
                               ? RealVector(v.real())
                               : RealVector(v.imag());
            const double nrm = u.norm();
            if (nrm <= 0.0) throw DefectiveMatrix("real_jordan_simple: null eigenvector");
            u /= nrm;
            fix_real_column_sign(u);
            reals.push_back({lam.real(), std::move(u)});
        } else {
            used[static_cast<std::size_t>(i)] = true;
            // pair with the conjugate eigenvalue
            bool paired = false;
            for (Index k = i + 1; k < dim; ++k) {
                if (used[static_cast<std::size_t>(k)]) continue;
                if (std::abs(evals(k) - std::conj(lam)) <=
                    10.0 * thr + 1e-9 * std::abs(lam)) {
                    used[static_cast<std::size_t>(k)] = true;
                    paired = true;
                    break;
                }
            }
            if (!paired)
                throw DefectiveMatrix("real_jordan_simple: unpaired complex eigenvalue");
            Complex lam_pos = lam;
            Eigen::VectorXcd v = evecs.col(i);
            if (lam_pos.imag() < 0) {
                lam_pos = std::conj(lam_pos);
                v = v.conjugate();
            }
            v /= v.norm();
            // rotate the phase so the largest-magnitude entry is real positive
            Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            v *= std::exp(Complex(0.0, -std::arg(v(imax))));
            RealVector u1 = v.real();
            RealVector u2 = v.imag();
            // common scale only: independent column scaling would distort the
            // 2x2 rotation-dilation block
            const double sc = std::max(u1.norm(), u2.norm());
            if (sc <= 0.0) throw DefectiveMatrix("real_jordan_simple: null eigenvector");
            u1 /= sc;
            u2 /= sc;
            cplx.push_back({lam_pos.real(), lam_pos.imag(), std::move(u1), std::move(u2)});
        }
    }

    if (reals.size() % 2 != 0)
        throw DefectiveMatrix("real_jordan_simple: odd count of real eigenvalues");

    std::stable_sort(reals.begin(), reals.end(),
                     [](const RealEntry& x, const RealEntry& y) { return x.lambda < y.lambda; });
    std::stable_sort(cplx.begin(), cplx.end(), [](const ComplexEntry& x, const ComplexEntry& y) {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    });

    RealJordanForm out;
    out.V = assemble_v(reals, cplx, dim);
    out.J = assemble_j(reals, cplx, dim);
    for (const auto& r : reals) out.blocks.push_back({false, r.lambda, 0.0});
    for (const auto& z : cplx) out.blocks.push_back({true, z.a, z.b});

    const double cond = condition_number(out.V);
    if (!(cond < cond_cap))
        throw DefectiveMatrix("real_jordan_simple: eigenvector matrix is ill conditioned (cond = " +
                              std::to_string(cond) + "); nontrivial Jordan structure suspected");
    return out;
}

AdmissibilityReport check_admissibility(const RealMatrix& v, const RealMatrix& j, double tol,
                                        const RealMatrix* a) {
    if (v.rows() != v.cols() || j.rows() != j.cols() || v.rows() != j.rows())
        throw ShapeMismatch("check_admissibility: V and J must be square of equal size");
    if (v.rows() % 2 != 0) throw DimensionOdd("check_admissibility: dimension must be even");
    const Index n = v.rows() / 2;
    if (tol < 0) tol = default_rank_tol(v.rows());

    AdmissibilityReport rep;
    rep.attempts = 1;

    const double jthr = 1e-10 * std::max(max_abs(j), 1.0);
    if (!upper_block_triangular_ok(j, jthr)) {
        rep.admissible = false;
        return rep;
    }
    if (a != nullptr) {
        RealMatrix recon = v * j * v.inverse();
        if (max_abs(RealMatrix(recon - *a)) > 1e-6 * std::max(max_abs(*a), 1.0)) {
            rep.admissible = false;
            return rep;
        }
    }
    const std::vector<bool> flags = prefix_rank_flags(v, tol);
    for (Index i = 0; i < n; ++i) {
        if (!flags[static_cast<std::size_t>(i)]) {
            rep.admissible = false;
            rep.failing_prefix = i + 1;
            return rep;
        }
    }
    rep.admissible = true;
    return rep;
}

AdmissibilityReport check_admissibility_all_permutations(const RealMatrix& v,
                                                         const RealMatrix& j, double tol) {
    if (v.rows() != v.cols() || j.rows() != j.cols() || v.rows() != j.rows())
        throw ShapeMismatch("check_admissibility_all_permutations: shape mismatch");
    const Index dim = v.rows();
    if (dim % 2 != 0) throw DimensionOdd("check_admissibility_all_permutations: odd dimension");

    AdmissibilityReport rep;
    std::vector<Index> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), Index{0});
    const double jthr = 1e-10 * std::max(max_abs(j), 1.0);

    do {
        RealMatrix jp(dim, dim);
        for (Index r = 0; r < dim; ++r)
            for (Index c = 0; c < dim; ++c)
                jp(r, c) = j(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]);
        if (!upper_block_triangular_ok(jp, jthr)) continue;
        ++rep.attempts;
        RealMatrix vp(dim, dim);
        for (Index c = 0; c < dim; ++c)
            vp.col(c) = v.col(perm[static_cast<std::size_t>(c)]);
        AdmissibilityReport one = check_admissibility(vp, jp, tol);
        if (one.admissible) {
            rep.admissible = true;
            rep.failing_prefix.reset();
            return rep;
        }
        if (!rep.failing_prefix && one.failing_prefix) rep.failing_prefix = one.failing_prefix;
    } while (std::next_permutation(perm.begin(), perm.end()));

    rep.admissible = false;
    return rep;
}

namespace {

struct BlockLayout {
    std::vector<Index> real_ids;   // indices into blocks, real group
    std::vector<Index> cplx_ids;   // indices into blocks, complex group
    std::vector<Index> col_start;  // first column of each block in V
};

BlockLayout layout_of(const RealJordanForm& form) {
    BlockLayout lay;
    Index c = 0;
    for (std::size_t b = 0; b < form.blocks.size(); ++b) {
        lay.col_start.push_back(c);
        if (form.blocks[b].complex_pair)
            lay.cplx_ids.push_back(static_cast<Index>(b));
        else
            lay.real_ids.push_back(static_cast<Index>(b));
        c += form.blocks[b].size();
    }
    return lay;
}

RealJordanForm reorder(const RealJordanForm& form, const BlockLayout& lay,
                       const std::vector<Index>& real_order,
                       const std::vector<Index>& cplx_order) {
    const Index dim = form.V.rows();
    RealJordanForm out;
    out.V.resize(dim, dim);
    out.J = RealMatrix::Zero(dim, dim);
    Index c = 0;
    auto emit = [&](Index block_id) {
        const JordanBlock& blk = form.blocks[static_cast<std::size_t>(block_id)];
        const Index src = lay.col_start[static_cast<std::size_t>(block_id)];
        if (blk.complex_pair) {
            out.V.col(c) = form.V.col(src);
            out.V.col(c + 1) = form.V.col(src + 1);
            out.J(c, c) = blk.a;
            out.J(c, c + 1) = blk.b;
            out.J(c + 1, c) = -blk.b;
            out.J(c + 1, c + 1) = blk.a;
            c += 2;
        } else {
            out.V.col(c) = form.V.col(src);
            out.J(c, c) = blk.a;
            c += 1;
        }
        out.blocks.push_back(blk);
    };
    for (Index id : real_order) emit(lay.real_ids[static_cast<std::size_t>(id)]);
    for (Index id : cplx_order) emit(lay.cplx_ids[static_cast<std::size_t>(id)]);
    return out;
}

// Orthogonally remixes the basis columns within each repeated-eigenvalue
// eigenspace: real groups by a random real orthogonal, groups of repeated
// complex pairs by a random complex unitary on the underlying eigenvectors.
RealJordanForm remix_repeated(const RealJordanForm& form, double cluster_thr,
                              std::mt19937_64& rng) {
    RealJordanForm out = form;
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::size_t i = 0;
    Index col = 0;
    while (i < out.blocks.size()) {
        const JordanBlock& head = out.blocks[i];
        std::size_t j = i;
        while (j + 1 < out.blocks.size() &&
               out.blocks[j + 1].complex_pair == head.complex_pair &&
               std::abs(out.blocks[j + 1].a - head.a) <= cluster_thr &&
               std::abs(out.blocks[j + 1].b - head.b) <= cluster_thr)
            ++j;
        const Index g = static_cast<Index>(j - i + 1);
        if (g > 1 && !head.complex_pair) {
            RealMatrix z(g, g);
            for (Index r = 0; r < g; ++r)
                for (Index c = 0; c < g; ++c) z(r, c) = gauss(rng);
            Eigen::HouseholderQR<RealMatrix> qr(z);
            RealMatrix q = qr.householderQ() * RealMatrix::Identity(g, g);
            out.V.middleCols(col, g) = form.V.middleCols(col, g) * q;
        } else if (g > 1 && head.complex_pair) {
            // complex eigenvectors v_k = re_k + i im_k; mix by a unitary and
            // rebuild the real column pairs
            ComplexMatrix z(g, g);
            for (Index r = 0; r < g; ++r)
                for (Index c = 0; c < g; ++c) z(r, c) = Complex(gauss(rng), gauss(rng));
            Eigen::HouseholderQR<ComplexMatrix> qr(z);
            ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g, g);
            ComplexMatrix vecs(form.V.rows(), g);
            for (Index k = 0; k < g; ++k)
                vecs.col(k) = form.V.col(col + 2 * k).cast<Complex>() +
                              Complex(0, 1) * form.V.col(col + 2 * k + 1).cast<Complex>();
            ComplexMatrix mixed = vecs * q;
            for (Index k = 0; k < g; ++k) {
                RealVector u1 = mixed.col(k).real();
                RealVector u2 = mixed.col(k).imag();
                const double sc = std::max(u1.norm(), u2.norm());
                if (sc > 0) {
                    u1 /= sc;
                    u2 /= sc;
                }
                out.V.col(col + 2 * k) = u1;
                out.V.col(col + 2 * k + 1) = u2;
            }
        }
        col += g * head.size();
        i = j + 1;
    }
    return out;
}

}  // namespace

RealJordanForm admissible_basis_search(const RealMatrix& a, const SearchOptions& opts,
                                       AdmissibilityReport* report) {
    const double cluster_abs = opts.cluster_tol * std::max(max_abs(a), 1e-300);
    RealJordanForm base = real_jordan_simple(a, opts.cluster_tol, opts.cond_cap);
    const double rank_tol = opts.rank_tol < 0 ? default_rank_tol(a.rows()) : opts.rank_tol;

    std::mt19937_64 rng(opts.seed);
    long attempts = 0;
    RealJordanForm current = base;
    std::optional<Index> first_failing;

    auto fill_report = [&](bool ok) {
        if (report != nullptr) {
            report->admissible = ok;
            report->attempts = attempts;
            report->seed = opts.seed;
            report->failing_prefix = ok ? std::nullopt : first_failing;
        }
    };

    while (attempts < opts.max_attempts) {
        const BlockLayout lay = layout_of(current);
        std::vector<Index> rp(lay.real_ids.size());
        std::iota(rp.begin(), rp.end(), Index{0});
        bool more_real = true;
        while (more_real && attempts < opts.max_attempts) {
            std::vector<Index> cp(lay.cplx_ids.size());
            std::iota(cp.begin(), cp.end(), Index{0});
            bool more_cplx = true;
            while (more_cplx && attempts < opts.max_attempts) {
                ++attempts;
                RealJordanForm cand = reorder(current, lay, rp, cp);
                AdmissibilityReport rep = check_admissibility(cand.V, cand.J, rank_tol);
                if (rep.admissible) {
                    fill_report(true);
                    return cand;
                }
                if (!first_failing && rep.failing_prefix) first_failing = rep.failing_prefix;
                more_cplx = std::next_permutation(cp.begin(), cp.end());
            }
            more_real = std::next_permutation(rp.begin(), rp.end());
        }
        if (attempts >= opts.max_attempts) break;
        current = remix_repeated(base, cluster_abs, rng);
    }
    fill_report(false);
    throw NotAdmissible("admissible_basis_search: exhausted " + std::to_string(attempts) +
                        " attempts without an admissible basis");
}

}  // namespace qcascade
