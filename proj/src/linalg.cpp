#include "qcascade/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace qcascade {

namespace {

void require_even_square(const RealMatrix& m, const char* who) {
    if (m.rows() != m.cols())
        throw ShapeMismatch(std::string(who) + ": matrix must be square");
    if (m.rows() % 2 != 0)
        throw DimensionOdd(std::string(who) + ": matrix dimension must be even");
}

}  // namespace

SymplecticForm symplectic_form(Index n) {
    if (n < 1) throw ShapeMismatch("symplectic_form: n must be >= 1");
    return SymplecticForm{n, symplectic_form_matrix(n)};
}

RealMatrix symplectic_form_matrix(Index n) {
    RealMatrix j = RealMatrix::Zero(2 * n, 2 * n);
    for (Index k = 0; k < n; ++k) {
        j(2 * k, 2 * k + 1) = 1.0;
        j(2 * k + 1, 2 * k) = -1.0;
    }
    return j;
}

RealMatrix form_times(const RealMatrix& m) {
    if (m.rows() % 2 != 0) throw DimensionOdd("form_times: row count must be even");
    RealMatrix out(m.rows(), m.cols());
    for (Index k = 0; k < m.rows() / 2; ++k) {
        out.row(2 * k) = m.row(2 * k + 1);
        out.row(2 * k + 1) = -m.row(2 * k);
    }
    return out;
}

ComplexMatrix form_times(const ComplexMatrix& m) {
    if (m.rows() % 2 != 0) throw DimensionOdd("form_times: row count must be even");
    ComplexMatrix out(m.rows(), m.cols());
    for (Index k = 0; k < m.rows() / 2; ++k) {
        out.row(2 * k) = m.row(2 * k + 1);
        out.row(2 * k + 1) = -m.row(2 * k);
    }
    return out;
}

RealMatrix times_form(const RealMatrix& m) {
    if (m.cols() % 2 != 0) throw DimensionOdd("times_form: column count must be even");
    RealMatrix out(m.rows(), m.cols());
    for (Index k = 0; k < m.cols() / 2; ++k) {
        out.col(2 * k) = -m.col(2 * k + 1);
        out.col(2 * k + 1) = m.col(2 * k);
    }
    return out;
}

bool is_symplectic(const RealMatrix& t, double tol) {
    require_even_square(t, "is_symplectic");
    const Index n = t.rows() / 2;
    RealMatrix residual = t.transpose() * form_times(t) - symplectic_form_matrix(n);
    return max_abs(residual) <= tol;
}

RealMatrix symplectic_inverse(const RealMatrix& s) {
    require_even_square(s, "symplectic_inverse");
    // J' S' J = -J S' J
    return -form_times(times_form(s.transpose()));
}

RealMatrix block_reversal_permutation(Index n) {
    if (n < 1) throw ShapeMismatch("block_reversal_permutation: n must be >= 1");
    RealMatrix p = RealMatrix::Zero(2 * n, 2 * n);
    for (Index k = 0; k < n; ++k) {
        p(2 * k, 2 * (n - 1 - k)) = 1.0;
        p(2 * k + 1, 2 * (n - 1 - k) + 1) = 1.0;
    }
    return p;
}

RealMatrix skew_gram(const RealMatrix& v, Index prefix_pairs) {
    require_even_square(v, "skew_gram");
    const Index n = v.rows() / 2;
    if (prefix_pairs < 1 || prefix_pairs > n)
        throw DimensionMismatch("skew_gram: prefix_pairs out of range");
    const auto prefix = v.leftCols(2 * prefix_pairs);
    RealMatrix gram = prefix.transpose() * form_times(RealMatrix(prefix));
    return 0.5 * (gram - gram.transpose());
}

double default_rank_tol(Index dim) { return 1e-10 * static_cast<double>(dim); }

std::vector<bool> prefix_rank_flags(const RealMatrix& v, double tol) {
    require_even_square(v, "prefix_rank_flags");
    const Index n = v.rows() / 2;
    if (tol < 0) tol = default_rank_tol(v.rows());
    std::vector<bool> flags;
    flags.reserve(n);
    double col_scale = 0.0;  // largest column norm seen in the prefix
    for (Index i = 1; i <= n; ++i) {
        col_scale = std::max({col_scale, v.col(2 * i - 2).norm(), v.col(2 * i - 1).norm()});
        RealMatrix gram = skew_gram(v, i);
        Eigen::JacobiSVD<RealMatrix> svd(gram);
        const auto& sv = svd.singularValues();
        const double smax = sv(0);
        const double smin = sv(sv.size() - 1);
        // floor at the squared column scale: for a 2x2 skew block smin equals
        // smax, so a pure ratio test cannot flag a numerically vanished pairing
        const double ref = std::max(smax, col_scale * col_scale);
        flags.push_back(smax > 0.0 && smin > tol * ref);
    }
    return flags;
}

RealMatrix SkewCanonicalForm::lambda_matrix() const {
    const Index n = static_cast<Index>(lambdas.size());
    RealMatrix lam = RealMatrix::Zero(2 * n, 2 * n);
    for (Index i = 0; i < n; ++i) {
        lam(2 * i, 2 * i + 1) = lambdas[static_cast<std::size_t>(i)];
        lam(2 * i + 1, 2 * i) = -lambdas[static_cast<std::size_t>(i)];
    }
    return lam;
}

RealMatrix SkewCanonicalForm::reconstruct() const {
    return Q.transpose() * lambda_matrix() * Q;
}

SkewCanonicalForm skew_canonical_decomposition(const RealMatrix& x, double tol) {
    require_even_square(x, "skew_canonical_decomposition");
    const double scale = std::max(max_abs(x), 1.0);
    if (max_abs(RealMatrix(x + x.transpose())) > tol * scale)
        throw NotSkewSymmetric("skew_canonical_decomposition: input is not skew-symmetric");

    const Index dim = x.rows();
    RealMatrix xs = 0.5 * (x - x.transpose());

    // -X^2 is symmetric PSD with eigenvalues lambda_i^2, each of even
    // multiplicity; pairing q2 = -X q1 / lambda realizes the 2x2 blocks.
    RealMatrix minus_x2 = -(xs * xs).eval();
    minus_x2 = 0.5 * (minus_x2 + minus_x2.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(minus_x2);
    if (es.info() != Eigen::Success)
        throw Error("skew_canonical_decomposition: eigensolver failed");

    // Eigen sorts ascending; process descending so large lambdas come first.
    std::vector<double> evals(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i)
        evals[static_cast<std::size_t>(i)] = es.eigenvalues()(dim - 1 - i);
    RealMatrix basis(dim, dim);
    for (Index i = 0; i < dim; ++i) basis.col(i) = es.eigenvectors().col(dim - 1 - i);

    const double lam_scale = std::sqrt(std::max(evals[0], 0.0));
    const double zero_thr = std::max(tol, 1e-14) * std::max(lam_scale, 1.0);
    const double cluster_thr = 1e-10 * std::max(lam_scale * lam_scale, 1.0);

    SkewCanonicalForm out;
    out.Q = RealMatrix::Zero(dim, dim);
    out.lambdas.reserve(static_cast<std::size_t>(dim / 2));

    Index row = 0;
    Index i = 0;
    while (i < dim) {
        Index j = i;
        const bool zero_cluster =
            std::sqrt(std::max(evals[static_cast<std::size_t>(i)], 0.0)) <= zero_thr;
        if (zero_cluster) {
            j = dim - 1;  // eigenvalues are sorted, everything left is kernel-like
        } else {
            while (j + 1 < dim &&
                   std::abs(evals[static_cast<std::size_t>(j + 1)] -
                            evals[static_cast<std::size_t>(i)]) <= cluster_thr)
                ++j;
            if ((j - i + 1) % 2 != 0) {
                // multiplicities of positive lambda^2 are even; absorb the
                // eigenvalue the grouping split off
                if (j + 1 < dim)
                    ++j;
                else
                    throw Error("skew_canonical_decomposition: unpaired eigenvalue");
            }
        }
        const Index width = j - i + 1;
        const double lambda =
            zero_cluster ? 0.0 : std::sqrt(std::max(evals[static_cast<std::size_t>(i)], 0.0));

        if (zero_cluster) {
            if (width % 2 != 0)
                throw Error("skew_canonical_decomposition: odd kernel dimension");
            for (Index k = 0; k + 1 < width; k += 2) {
                out.Q.row(row++) = basis.col(i + k).transpose();
                out.Q.row(row++) = basis.col(i + k + 1).transpose();
                out.lambdas.push_back(0.0);
            }
        } else {
            // ordered Gram-Schmidt over the cluster basis, consuming a
            // (q1, q2 = -X q1 / lambda) pair per step
            std::vector<RealVector> pool;
            for (Index k = 0; k < width; ++k) pool.push_back(basis.col(i + k));
            std::vector<RealVector> chosen;
            while (static_cast<Index>(chosen.size()) < width) {
                RealVector q1;
                bool found = false;
                while (!pool.empty()) {
                    q1 = pool.front();
                    pool.erase(pool.begin());
                    for (const auto& q : chosen) q1 -= q * q.dot(q1);
                    if (q1.norm() > 0.3) {
                        q1.normalize();
                        found = true;
                        break;
                    }
                }
                if (!found)
                    throw Error("skew_canonical_decomposition: cluster basis exhausted");
                RealVector q2 = -(xs * q1) / lambda;
                q2 -= q1 * q1.dot(q2);
                for (const auto& q : chosen) q2 -= q * q.dot(q2);
                const double q2norm = q2.norm();
                if (q2norm < 0.5)
                    throw Error("skew_canonical_decomposition: pairing degenerated");
                q2 /= q2norm;
                out.Q.row(row++) = q1.transpose();
                out.Q.row(row++) = q2.transpose();
                out.lambdas.push_back(lambda);
                chosen.push_back(q1);
                chosen.push_back(q2);
            }
        }
        i = j + 1;
    }
    return out;
}

double max_abs(const RealMatrix& m) {
    return m.size() == 0 ? 0.0 : m.array().abs().maxCoeff();
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.array().abs().maxCoeff();
}

double max_below_block_diagonal(const RealMatrix& m) {
    double worst = 0.0;
    for (Index bi = 0; bi < m.rows() / 2; ++bi)
        for (Index bj = 0; bj < bi; ++bj)
            worst = std::max(worst, max_abs(RealMatrix(m.block(2 * bi, 2 * bj, 2, 2))));
    return worst;
}

double max_above_block_diagonal(const RealMatrix& m) {
    double worst = 0.0;
    for (Index bi = 0; bi < m.rows() / 2; ++bi)
        for (Index bj = bi + 1; bj < m.cols() / 2; ++bj)
            worst = std::max(worst, max_abs(RealMatrix(m.block(2 * bi, 2 * bj, 2, 2))));
    return worst;
}

}  // namespace qcascade
