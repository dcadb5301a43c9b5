#include "qcascade/symplectic_qr.hpp"

#include "qcascade/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace qcascade {

namespace {

// Inverse of an upper 2x2 block triangular matrix by block back-substitution.
// Keeps the below-block zeros exact.
RealMatrix invert_upper_block_triangular(const RealMatrix& x) {
    const Index nb = x.rows() / 2;
    RealMatrix y = RealMatrix::Zero(x.rows(), x.cols());
    for (Index k = nb - 1; k >= 0; --k) {
        Eigen::Matrix2d dkk = x.block<2, 2>(2 * k, 2 * k);
        Eigen::Matrix2d dinv = dkk.inverse();
        y.block<2, 2>(2 * k, 2 * k) = dinv;
        for (Index j = k - 1; j >= 0; --j) {
            Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
            for (Index l = j + 1; l <= k; ++l)
                acc += x.block<2, 2>(2 * j, 2 * l) * y.block<2, 2>(2 * l, 2 * k);
            Eigen::Matrix2d djj = x.block<2, 2>(2 * j, 2 * j);
            y.block<2, 2>(2 * j, 2 * k) = -djj.inverse() * acc;
        }
    }
    return y;
}

}  // namespace

QrResult symplectic_qr(const RealMatrix& v, double tol) {
    if (v.rows() != v.cols()) throw ShapeMismatch("symplectic_qr: matrix must be square");
    if (v.rows() % 2 != 0) throw DimensionOdd("symplectic_qr: dimension must be even");
    const Index dim = v.rows();
    const Index n = dim / 2;
    if (tol < 0) tol = default_rank_tol(dim);

    {
        Eigen::JacobiSVD<RealMatrix> svd(v);
        const auto& sv = svd.singularValues();
        if (sv(0) <= 0.0 || sv(sv.size() - 1) <= tol * sv(0))
            throw SingularInput("symplectic_qr: input matrix is singular");
    }

    QrResult res;
    res.S.resize(dim, 0);
    res.mus.reserve(static_cast<std::size_t>(n));
    res.alphas.reserve(static_cast<std::size_t>(n));
    RealMatrix x_acc = RealMatrix::Identity(dim, dim);

    for (Index j = 0; j < n; ++j) {
        const RealMatrix m_j = v.middleCols(2 * j, 2);
        RealMatrix xi;           // 2(j) x 2, empty for the first pair
        RealMatrix z;            // candidate pair, skew-orthogonal to S so far
        if (j == 0) {
            z = m_j;
        } else {
            // Xi_j = J_{j-1} S_{j-1}' J_n M_j
            RealMatrix stjm = res.S.transpose() * form_times(m_j);
            xi = form_times(stjm);
            z = res.S * xi + m_j;
        }
        const RealMatrix gram = z.transpose() * form_times(z);
        const double mu = gram(0, 1);
        const double guard = tol * std::max(z.col(0).norm() * z.col(1).norm(), 1e-300);
        if (std::abs(mu) <= guard)
            throw RankDeficientPrefix(
                j + 1, "symplectic_qr: leading skew Gram matrix " + std::to_string(j + 1) +
                           " is rank deficient");
        const double alpha = 1.0 / std::sqrt(std::abs(mu));
        const double sign = mu > 0 ? 1.0 : -1.0;
        res.mus.push_back(mu);
        res.alphas.push_back(alpha);

        RealMatrix newcols(dim, 2);
        newcols.col(0) = alpha * z.col(0);
        newcols.col(1) = alpha * sign * z.col(1);
        RealMatrix grown(dim, 2 * (j + 1));
        grown << res.S, newcols;
        res.S = std::move(grown);

        // fold X_j into the accumulated product; X_j only alters column pair j
        RealMatrix colblock = RealMatrix::Zero(dim, 2);
        if (j > 0) {
            colblock.topRows(2 * j).col(0) = alpha * xi.col(0);
            colblock.topRows(2 * j).col(1) = alpha * sign * xi.col(1);
        }
        colblock(2 * j, 0) = alpha;
        colblock(2 * j + 1, 1) = alpha * sign;
        x_acc.middleCols(2 * j, 2) = x_acc.leftCols(2 * (j + 1)) * colblock.topRows(2 * (j + 1));
    }

    res.Y = invert_upper_block_triangular(x_acc);
    return res;
}

}  // namespace qcascade
