#pragma once

#include <vector>

#include <Eigen/Dense>

namespace polaremit {

/// Solves the block-tridiagonal linear system
///
///     lower[k-1] x_{k-1} + diag[k] x_k + upper[k] x_{k+1} = rhs[k]
///
/// (upper[k] couples block k to k+1, lower[k] couples block k+1 to k) by a
/// forward block sweep with back substitution.  Pivoting inside each 3x3
/// block is handled by the LU factorization of the Schur-complemented pivot
/// block; a pivot smaller than 1e-14 of the block norm raises SingularSystem.
std::vector<Eigen::Vector3cd> solve_block_tridiagonal(
    const std::vector<Eigen::Matrix3cd>& diag,
    const std::vector<Eigen::Matrix3cd>& upper,
    const std::vector<Eigen::Matrix3cd>& lower,
    const std::vector<Eigen::Vector3cd>& rhs);

/// Reference solver: assembles the full dense matrix and solves it in one go.
/// Kept as an independent path for cross-checking the sweep solver.
std::vector<Eigen::Vector3cd> solve_block_tridiagonal_dense(
    const std::vector<Eigen::Matrix3cd>& diag,
    const std::vector<Eigen::Matrix3cd>& upper,
    const std::vector<Eigen::Matrix3cd>& lower,
    const std::vector<Eigen::Vector3cd>& rhs);

}  // namespace polaremit
