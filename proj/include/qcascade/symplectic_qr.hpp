#pragma once

#include "qcascade/types.hpp"

#include <vector>

namespace qcascade {

/// Result of the symplectic QR decomposition V = S * Y: S symplectic, Y
/// invertible upper 2x2 block triangular with exact zeros below the block
/// diagonal. mus/alphas record the per-step pairing scalars.
struct QrResult {
    RealMatrix S;
    RealMatrix Y;
    std::vector<double> mus;
    std::vector<double> alphas;
};

/// Symplectic Gram-Schmidt on the column pairs of V, consumed left to right.
/// Throws SingularInput if V is judged singular, RankDeficientPrefix(j) if
/// the pairing scalar mu_j vanishes (equivalently, the j-th leading skew
/// Gram matrix is rank deficient). tol < 0 selects default_rank_tol.
QrResult symplectic_qr(const RealMatrix& v, double tol = -1.0);

}  // namespace qcascade
