#pragma once

#include "qcascade/symplectic_schur.hpp"
#include "qcascade/types.hpp"

#include <vector>

namespace qcascade {

/// (S, Kx, 1/2 x'Rx) parameterization of a linear quantum stochastic system:
/// S m x m unitary scattering, K m x 2n coupling, R 2n x 2n symmetric
/// Hamiltonian matrix (symmetrized on construction).
struct SdhSystem {
    SdhSystem() = default;
    SdhSystem(ComplexMatrix scattering, ComplexMatrix coupling, RealMatrix hamiltonian);

    Index n = 0;
    Index m = 0;
    ComplexMatrix S;
    ComplexMatrix K;
    RealMatrix R;
};

/// Quadrature-form state space (A, B, C, D): dx = A x dt + B dw,
/// dy = C x dt + D dw, with x the interleaved (q, p) vector.
struct QuadSystem {
    QuadSystem() = default;
    QuadSystem(RealMatrix a, RealMatrix b, RealMatrix c, RealMatrix d);

    Index n = 0;
    Index m = 0;
    RealMatrix A, B, C, D;
};

/// Max-norm residuals of the three physical realizability constraints,
/// scaled by the input magnitudes.
struct RealizabilityReport {
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    bool pass1 = false, pass2 = false, pass3 = false;
    double tol = 0.0;

    bool all_pass() const { return pass1 && pass2 && pass3; }
};

/// One oscillator of a cascade: scattering (identity except possibly the
/// first subsystem), its m x 2 coupling columns and 2 x 2 Hamiltonian block.
struct OneDofSystem {
    ComplexMatrix scattering;
    ComplexMatrix K;
    RealMatrix R;
};

struct VerificationReport {
    std::vector<Complex> freqs;
    std::vector<double> deviations;  // relative, per frequency; -1 if skipped
    std::vector<bool> skipped;
    double max_deviation = 0.0;
    bool pass = false;
    double tol = 0.0;
};

/// Ordered one-degree-of-freedom factors G_1..G_n (input side first), the
/// symplectic transform T that produced them, the Schur decomposition used,
/// and the pair ordering pi relative to the pre-reversal basis.
struct CascadeRealization {
    std::vector<OneDofSystem> subsystems;
    RealMatrix T;
    SchurResult schur;
    std::vector<Index> permutation;
    VerificationReport verification;
};

/// Quadrature form of an (S, K, R) system. Throws NonUnitaryScattering.
QuadSystem sdh_to_quadrature(const SdhSystem& g);

/// Inverse conversion; requires g physically realizable within tol (and D of
/// the unitary block form). Throws NotRealizable carrying the report.
SdhSystem quadrature_to_sdh(const QuadSystem& g, double tol);

class NotRealizable : public Error {
   public:
    NotRealizable(RealizabilityReport report, const std::string& what)
        : Error(what), report(report) {}
    RealizabilityReport report;
};

RealizabilityReport check_physical_realizability(const QuadSystem& g, double tol);

/// Symplectic change of coordinates z = Tx: (TAT^{-1}, TB, CT^{-1}, D).
/// Preserves realizability and the transfer function.
QuadSystem transform(const QuadSystem& g, const RealMatrix& t, double symp_tol = 1e-6);

/// C (sI - A)^{-1} B + D via a linear solve.
ComplexMatrix transfer_function(const QuadSystem& g, Complex s);

/// Series (cascade) product G2 <| G1; both systems must share the quadrature
/// space and channel count.
SdhSystem series_product(const SdhSystem& g2, const SdhSystem& g1);

/// 8 points s = i w, w log-spaced across [0.01, 100] x spectral radius of A,
/// plus s = 1 + i as an off-axis probe.
std::vector<Complex> default_frequency_grid(const QuadSystem& g);

/// Embeds the k-th (0-based) cascade factor on the full 2n-dim space and
/// composes all factors with the series product.
SdhSystem compose_cascade(const CascadeRealization& cascade, Index n, Index m);

VerificationReport verify_cascade(const QuadSystem& original, const CascadeRealization& cascade,
                                  const std::vector<Complex>& freqs, double tol);

/// Full pipeline: realizability check, symplectic Schur of A, transform,
/// extraction of the one-degree-of-freedom factors, and transfer-function
/// verification on the default grid.
CascadeRealization cascade_realize(const QuadSystem& g, const SearchOptions& opts = {});

}  // namespace qcascade
