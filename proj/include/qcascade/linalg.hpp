#pragma once

#include "qcascade/types.hpp"

#include <vector>

namespace qcascade {

/// The canonical symplectic form on n quadrature pairs: the block-diagonal
/// skew matrix with n copies of [[0,1],[-1,0]].
struct SymplecticForm {
    Index dof = 0;
    RealMatrix matrix;
};

SymplecticForm symplectic_form(Index n);

/// J_n as a plain matrix.
RealMatrix symplectic_form_matrix(Index n);

/// J_n * M without forming J_n (row pairs map to (row 2k+1, -row 2k)).
RealMatrix form_times(const RealMatrix& m);
ComplexMatrix form_times(const ComplexMatrix& m);

/// M * J_n.
RealMatrix times_form(const RealMatrix& m);

/// True iff ||T' J T - J||_max <= tol. T must be square of even dimension.
bool is_symplectic(const RealMatrix& t, double tol);

/// Inverse of a symplectic matrix via S^{-1} = J' S' J.
RealMatrix symplectic_inverse(const RealMatrix& s);

/// Permutation reversing the order of (q_i, p_i) pairs. Symplectic; applied
/// twice gives the identity; conjugation maps upper to lower 2x2 block
/// triangular form.
RealMatrix block_reversal_permutation(Index n);

/// Skew Gram matrix of the first 2*prefix_pairs columns of V with respect to
/// J_n. Exactly skew-symmetric (symmetrized against rounding).
RealMatrix skew_gram(const RealMatrix& v, Index prefix_pairs);

/// prefix_pairs defaulting tolerance: 1e-10 scaled by matrix dimension.
double default_rank_tol(Index dim);

/// Flag i is true iff the skew Gram matrix of the leading 2(i+1) columns is
/// full rank (smallest singular value > tol * largest).
std::vector<bool> prefix_rank_flags(const RealMatrix& v, double tol);

/// X = Q' * Lambda * Q with Q orthogonal and Lambda block diagonal with
/// blocks [[0, lambda_i], [-lambda_i, 0]], lambda_i >= 0.
struct SkewCanonicalForm {
    RealMatrix Q;
    std::vector<double> lambdas;

    RealMatrix lambda_matrix() const;
    RealMatrix reconstruct() const;  // Q' * Lambda * Q
};

SkewCanonicalForm skew_canonical_decomposition(const RealMatrix& x, double tol);

// Block-structure helpers shared by the factorization modules.
double max_abs(const RealMatrix& m);
double max_abs(const ComplexMatrix& m);
double max_below_block_diagonal(const RealMatrix& m);
double max_above_block_diagonal(const RealMatrix& m);

}  // namespace qcascade
