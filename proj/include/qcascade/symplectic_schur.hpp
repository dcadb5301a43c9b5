#pragma once

#include "qcascade/real_jordan.hpp"
#include "qcascade/symplectic_qr.hpp"
#include "qcascade/types.hpp"

namespace qcascade {

/// A = S^{-1} U S with S symplectic and U lower 2x2 block triangular
/// (entries above the block diagonal are exact zeros after hard zeroing).
/// S = P S1^{-1} where (S1, Y) is the symplectic QR of the Jordan basis and
/// P the pair-reversal permutation.
struct SchurResult {
    RealMatrix S;
    RealMatrix U;
    RealJordanForm jordan;
    RealMatrix S1;
    RealMatrix Y;
};

/// Full pipeline: admissible Jordan basis (searched, or pinned through
/// opts.basis_override), symplectic QR, pair reversal, hard zeroing.
/// Throws NotAdmissible / DefectiveMatrix (propagated) or
/// TriangularizationResidual when an above-block entry exceeds
/// opts.zero_tol * ||A||_max.
SchurResult symplectic_schur(const RealMatrix& a, const SearchOptions& opts = {});

/// Deterministic tail of the pipeline for an already-chosen Jordan pair;
/// symplectic_schur delegates here, and recomputing from a stored
/// result.jordan reproduces S and U bitwise.
SchurResult symplectic_schur_from_jordan(const RealMatrix& a, const RealJordanForm& jordan,
                                         const SearchOptions& opts = {});

}  // namespace qcascade
