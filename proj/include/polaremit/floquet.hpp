#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polaremit/model.hpp"

namespace polaremit {

/// Truncated set of Floquet amplitudes of the Bloch vector: x1 holds the
/// amplitudes of <S~->, x2 of <S~+>, x3 of <S^z>, indexed by the harmonic
/// number l = -truncation .. +truncation (storage index l + truncation).
///
/// For a physical solution x2[l] = conj(x1[-l]) and x3[l] = conj(x3[-l]).
struct HarmonicState {
    int truncation = 0;
    std::vector<complexd> x1, x2, x3;

    explicit HarmonicState(int L = 0)
        : truncation(L),
          x1(2 * static_cast<std::size_t>(L) + 1),
          x2(2 * static_cast<std::size_t>(L) + 1),
          x3(2 * static_cast<std::size_t>(L) + 1) {}

    /// Amplitude of component i (1, 2 or 3) at harmonic l; zero outside the
    /// truncation window.
    complexd amp(int i, int l) const;

    /// Largest violation of the Hermiticity symmetry across all harmonics.
    double hermiticity_residual() const;

    /// Copy with the Hermiticity symmetry enforced exactly.
    HarmonicState symmetrized() const;

    /// Largest amplitude magnitude over all components and harmonics.
    double max_amplitude() const;
};

/// The steady-state harmonic balance in the form
///
///     lower x^{(l-1)} + diag_l x^{(l)} + upper x^{(l+1)} + rhs_l = 0,
///
/// where diag/upper/lower are the generator blocks of the equations of motion
/// for the amplitudes and rhs carries the -Gamma/2 drive inhomogeneity in the
/// third component of the l = 0 block only.  upper[k] couples block k to
/// block k+1 and lower[k] couples block k+1 to block k; both contain only the
/// -+ i delta_a / 2 entries on the first two Bloch components.
struct BlockTridiagonalSystem {
    static constexpr int block_size = 3;
    int truncation = 0;
    std::vector<Eigen::Matrix3cd> diag;   // size 2L+1
    std::vector<Eigen::Matrix3cd> upper;  // size 2L
    std::vector<Eigen::Matrix3cd> lower;  // size 2L
    std::vector<Eigen::Vector3cd> rhs;    // size 2L+1
};

/// Generator block for harmonic l (the 3x3 coefficient matrix of the
/// equations of motion at that harmonic, gamma = 1 units).
Eigen::Matrix3cd generator_diag_block(const ValidatedModel& m, int l);

/// Off-diagonal coupling block diag(-i delta_a/2, +i delta_a/2, 0).
Eigen::Matrix3cd generator_off_block(const ValidatedModel& m);

/// Assembles the truncated steady-state system for |l| <= L; couplings
/// outside the window are dropped.
BlockTridiagonalSystem build_system(const ValidatedModel& m, int L);

/// Solves the truncated harmonic balance for the steady-state amplitudes.
/// The degenerate case rabi = 0, delta_a = 0 short-circuits to the analytic
/// solution X3^(0) = -1/(2(2N+1)).  Throws SingularSystem on degenerate
/// parameters; the residual of the returned solution is checked against
/// 1e-10 of the inhomogeneity norm.
HarmonicState solve_steady(const ValidatedModel& m, int L);

/// Smallest L whose edge amplitudes fall below tol relative to the largest
/// amplitude and whose l = 0 amplitudes move by less than that when L is
/// increased by one.  delta_a = 0 has no inter-harmonic coupling and returns
/// 0 immediately.  Throws NoConvergence when L would exceed cap.
int auto_truncation(const ValidatedModel& m, double tol, int cap = 32);

/// Bloch vector (<S~->, <S~+>, <S^z>) at time t reconstructed from the
/// harmonic amplitudes.  The imaginary part of the third component stays
/// below 1e-10 for a physical state and is discarded.
struct BlochVector {
    complexd s_minus;
    complexd s_plus;
    double s_z = 0.0;
};

BlochVector reconstruct_bloch(const HarmonicState& state, const ValidatedModel& m, double t);

}  // namespace polaremit
