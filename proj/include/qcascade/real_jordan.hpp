#pragma once

#include "qcascade/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qcascade {

/// One diagonal block of a real Jordan form of a diagonalizable matrix:
/// either a real eigenvalue (1x1, b == 0) or a conjugate pair a +- ib
/// (2x2 block [[a, b], [-b, a]], b > 0).
struct JordanBlock {
    bool complex_pair = false;
    double a = 0.0;
    double b = 0.0;

    Index size() const { return complex_pair ? 2 : 1; }
};

/// A = V * J * V^{-1} with V real invertible and J block diagonal, real
/// eigenvalue blocks before complex pair blocks.
struct RealJordanForm {
    RealMatrix V;
    RealMatrix J;
    std::vector<JordanBlock> blocks;
};

struct AdmissibilityReport {
    bool admissible = false;
    std::optional<Index> failing_prefix;  // 1-based, absent when admissible
    long attempts = 0;
    std::uint64_t seed = 0;
};

struct SearchOptions {
    int max_attempts = 64;
    std::uint64_t seed = 0;
    double rank_tol = -1.0;     // < 0 -> default_rank_tol(dim)
    double cond_cap = 1e8;      // eigenvector matrix condition cap
    double cluster_tol = 1e-8;  // relative eigenvalue clustering threshold
    double zero_tol = 1e-7;     // relative hard-zero threshold (Schur stage)
    double realiz_tol = 1e-8;   // physical realizability tolerance
    double verify_tol = 1e-6;   // cascade transfer-equivalence tolerance
    std::optional<RealMatrix> basis_override;  // pins the Jordan basis
};

/// Real Jordan form of a diagonalizable matrix. Real eigenvalues are sorted
/// ascending, complex pairs by (a, b) ascending with b > 0. Throws
/// DefectiveMatrix when the eigenvector matrix is numerically singular.
RealJordanForm real_jordan_simple(const RealMatrix& a, double tol,
                                  double cond_cap = 1e8);

/// Judges the (V, J) pair as supplied: J must be upper 2x2 block triangular
/// and every leading skew Gram matrix of V full rank. When `a` is supplied
/// the reconstruction V J V^{-1} = A is also required.
AdmissibilityReport check_admissibility(const RealMatrix& v, const RealMatrix& j,
                                        double tol, const RealMatrix* a = nullptr);

/// Exhaustive variant: tries every column permutation P for which P'JP stays
/// upper 2x2 block triangular, reporting admissible if any permuted pair
/// passes. Intended for small matrices (diagnostics and fixtures).
AdmissibilityReport check_admissibility_all_permutations(const RealMatrix& v,
                                                         const RealMatrix& j,
                                                         double tol);

/// Searches the Jordan basis freedom (block reorderings within the real and
/// complex groups, then seeded orthogonal remixing of repeated eigenspaces)
/// for a pair passing check_admissibility. Deterministic given (a, opts).
/// When `report` is non-null it receives the attempt count/seed, also on the
/// NotAdmissible path.
RealJordanForm admissible_basis_search(const RealMatrix& a, const SearchOptions& opts,
                                       AdmissibilityReport* report = nullptr);

}  // namespace qcascade
