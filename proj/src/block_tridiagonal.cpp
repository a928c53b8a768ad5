#include "polaremit/block_tridiagonal.hpp"

#include <sstream>

#include "polaremit/errors.hpp"

namespace polaremit {

namespace {

constexpr double kPivotTol = 1e-14;

void check_sizes(const std::vector<Eigen::Matrix3cd>& diag,
                 const std::vector<Eigen::Matrix3cd>& upper,
                 const std::vector<Eigen::Matrix3cd>& lower,
                 const std::vector<Eigen::Vector3cd>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0) throw InvalidArgument("block system must have at least one block");
    if (rhs.size() != n || upper.size() + 1 != n || lower.size() + 1 != n) {
        std::ostringstream os;
        os << "inconsistent block counts: diag=" << diag.size() << " upper=" << upper.size()
           << " lower=" << lower.size() << " rhs=" << rhs.size();
        throw InvalidArgument(os.str());
    }
}

Eigen::PartialPivLU<Eigen::Matrix3cd> factor_pivot(const Eigen::Matrix3cd& block,
                                                   std::size_t index) {
    Eigen::PartialPivLU<Eigen::Matrix3cd> lu(block);
    const double scale = block.cwiseAbs().maxCoeff();
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot > kPivotTol * scale)) {
        std::ostringstream os;
        os << "singular pivot block at index " << index << " (pivot " << pivot << ", block norm "
           << scale << ")";
        throw SingularSystem(os.str());
    }
    return lu;
}

}  // namespace

std::vector<Eigen::Vector3cd> solve_block_tridiagonal(
    const std::vector<Eigen::Matrix3cd>& diag,
    const std::vector<Eigen::Matrix3cd>& upper,
    const std::vector<Eigen::Matrix3cd>& lower,
    const std::vector<Eigen::Vector3cd>& rhs) {
    check_sizes(diag, upper, lower, rhs);
    const std::size_t n = diag.size();

    // Forward sweep: d_k <- diag_k - lower_{k-1} d_{k-1}^{-1} upper_{k-1},
    // likewise for the right-hand side.  Store d_k^{-1} upper_k and d_k^{-1} b_k
    // for the back substitution.
    std::vector<Eigen::Matrix3cd> dinv_upper(n > 1 ? n - 1 : 0);
    std::vector<Eigen::Vector3cd> dinv_rhs(n);

    Eigen::Matrix3cd d = diag[0];
    Eigen::Vector3cd b = rhs[0];
    for (std::size_t k = 0;; ++k) {
        const auto lu = factor_pivot(d, k);
        dinv_rhs[k] = lu.solve(b);
        if (k + 1 == n) break;
        dinv_upper[k] = lu.solve(upper[k]);
        d = diag[k + 1] - lower[k] * dinv_upper[k];
        b = rhs[k + 1] - lower[k] * dinv_rhs[k];
    }

    std::vector<Eigen::Vector3cd> x(n);
    x[n - 1] = dinv_rhs[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
        x[k] = dinv_rhs[k] - dinv_upper[k] * x[k + 1];
    }
    return x;
}

std::vector<Eigen::Vector3cd> solve_block_tridiagonal_dense(
    const std::vector<Eigen::Matrix3cd>& diag,
    const std::vector<Eigen::Matrix3cd>& upper,
    const std::vector<Eigen::Matrix3cd>& lower,
    const std::vector<Eigen::Vector3cd>& rhs) {
    check_sizes(diag, upper, lower, rhs);
    const std::size_t n = diag.size();
    const Eigen::Index dim = static_cast<Eigen::Index>(3 * n);

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd b(dim);
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Index at = static_cast<Eigen::Index>(3 * k);
        a.block<3, 3>(at, at) = diag[k];
        if (k + 1 < n) {
            a.block<3, 3>(at, at + 3) = upper[k];
            a.block<3, 3>(at + 3, at) = lower[k];
        }
        b.segment<3>(at) = rhs[k];
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double scale = a.cwiseAbs().maxCoeff();
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot > kPivotTol * scale)) {
        throw SingularSystem("dense block system is singular");
    }
    const Eigen::VectorXcd sol = lu.solve(b);

    std::vector<Eigen::Vector3cd> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = sol.segment<3>(static_cast<Eigen::Index>(3 * k));
    }
    return x;
}

}  // namespace polaremit
