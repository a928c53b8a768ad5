#include "polaremit/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polaremit/block_tridiagonal.hpp"
#include "polaremit/errors.hpp"

namespace polaremit {

complexd HarmonicState::amp(int i, int l) const {
    if (l < -truncation || l > truncation) return {0.0, 0.0};
    const std::size_t k = static_cast<std::size_t>(l + truncation);
    switch (i) {
        case 1: return x1[k];
        case 2: return x2[k];
        case 3: return x3[k];
        default: throw InvalidArgument("component index must be 1, 2 or 3");
    }
}

double HarmonicState::hermiticity_residual() const {
    double res = 0.0;
    for (int l = -truncation; l <= truncation; ++l) {
        res = std::max(res, std::abs(amp(2, l) - std::conj(amp(1, -l))));
        res = std::max(res, std::abs(amp(3, l) - std::conj(amp(3, -l))));
    }
    return res;
}

HarmonicState HarmonicState::symmetrized() const {
    HarmonicState s(truncation);
    for (int l = -truncation; l <= truncation; ++l) {
        const std::size_t k = static_cast<std::size_t>(l + truncation);
        s.x1[k] = 0.5 * (amp(1, l) + std::conj(amp(2, -l)));
        s.x3[k] = 0.5 * (amp(3, l) + std::conj(amp(3, -l)));
    }
    for (int l = -truncation; l <= truncation; ++l) {
        const std::size_t k = static_cast<std::size_t>(l + truncation);
        s.x2[k] = std::conj(s.x1[static_cast<std::size_t>(-l + truncation)]);
    }
    return s;
}

double HarmonicState::max_amplitude() const {
    double mx = 0.0;
    for (std::size_t k = 0; k < x1.size(); ++k) {
        mx = std::max({mx, std::abs(x1[k]), std::abs(x2[k]), std::abs(x3[k])});
    }
    return mx;
}

Eigen::Matrix3cd generator_diag_block(const ValidatedModel& m, int l) {
    const double n = m.moments.n;
    const complexd mm = m.moments.m;
    const complexd ilw{0.0, l * m.omega_f};

    Eigen::Matrix3cd d;
    d(0, 0) = -(complexd{0.5 + n, -m.delta}) - ilw;
    d(0, 1) = mm;
    d(0, 2) = m.rabi;
    d(1, 0) = std::conj(mm);
    // +i delta: conjugate partner of the first row, so that x2[l] = conj(x1[-l])
    d(1, 1) = -(complexd{0.5 + n, +m.delta}) - ilw;
    d(1, 2) = m.rabi;
    d(2, 0) = -0.5 * m.rabi;
    d(2, 1) = -0.5 * m.rabi;
    d(2, 2) = -complexd{2.0 * n + 1.0, 0.0} - ilw;
    return d;
}

Eigen::Matrix3cd generator_off_block(const ValidatedModel& m) {
    Eigen::Matrix3cd e = Eigen::Matrix3cd::Zero();
    e(0, 0) = complexd{0.0, -0.5 * m.delta_a};
    e(1, 1) = complexd{0.0, +0.5 * m.delta_a};
    return e;
}

BlockTridiagonalSystem build_system(const ValidatedModel& m, int L) {
    if (L < 0) throw InvalidArgument("truncation must be >= 0");
    BlockTridiagonalSystem sys;
    sys.truncation = L;
    const std::size_t n = 2 * static_cast<std::size_t>(L) + 1;
    sys.diag.reserve(n);
    for (int l = -L; l <= L; ++l) sys.diag.push_back(generator_diag_block(m, l));
    sys.upper.assign(n - 1, generator_off_block(m));
    sys.lower = sys.upper;
    sys.rhs.assign(n, Eigen::Vector3cd::Zero());
    sys.rhs[static_cast<std::size_t>(L)](2) = complexd{-0.5, 0.0};
    return sys;
}

namespace {

HarmonicState pack_solution(int L, const std::vector<Eigen::Vector3cd>& x) {
    HarmonicState st(L);
    for (std::size_t k = 0; k < x.size(); ++k) {
        st.x1[k] = x[k](0);
        st.x2[k] = x[k](1);
        st.x3[k] = x[k](2);
    }
    return st;
}

double residual_norm(const BlockTridiagonalSystem& sys, const std::vector<Eigen::Vector3cd>& x) {
    double res = 0.0;
    const std::size_t n = sys.diag.size();
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::Vector3cd rk = sys.diag[k] * x[k] + sys.rhs[k];
        if (k > 0) rk += sys.lower[k - 1] * x[k - 1];
        if (k + 1 < n) rk += sys.upper[k] * x[k + 1];
        res = std::max(res, rk.cwiseAbs().maxCoeff());
    }
    return res;
}

}  // namespace

HarmonicState solve_steady(const ValidatedModel& m, int L) {
    if (L < 0) throw InvalidArgument("truncation must be >= 0");

    if (m.rabi == 0.0 && m.delta_a == 0.0) {
        // No drive at all: the population equation alone fixes the state.
        HarmonicState st(L);
        st.x3[static_cast<std::size_t>(L)] = complexd{-0.5 / (2.0 * m.moments.n + 1.0), 0.0};
        return st;
    }

    const BlockTridiagonalSystem sys = build_system(m, L);
    std::vector<Eigen::Vector3cd> b(sys.rhs.size());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = -sys.rhs[k];
    const auto x = solve_block_tridiagonal(sys.diag, sys.upper, sys.lower, b);

    const double res = residual_norm(sys, x);
    if (!(res <= 1e-10 * 0.5)) {
        std::ostringstream os;
        os << "steady-state residual " << res << " exceeds tolerance";
        throw SingularSystem(os.str());
    }
    return pack_solution(L, x);
}

int auto_truncation(const ValidatedModel& m, double tol, int cap) {
    if (!(tol > 0.0)) throw InvalidArgument("truncation tolerance must be > 0");
    if (m.delta_a == 0.0) return 0;  // no inter-harmonic coupling

    HarmonicState cur = solve_steady(m, 0);
    for (int L = 0; L <= cap; ++L) {
        HarmonicState next = solve_steady(m, L + 1);
        const double gmax = cur.max_amplitude();
        double edge = 0.0;
        double dc0 = 0.0;
        for (int i = 1; i <= 3; ++i) {
            edge = std::max({edge, std::abs(cur.amp(i, L)), std::abs(cur.amp(i, -L))});
            dc0 = std::max(dc0, std::abs(cur.amp(i, 0) - next.amp(i, 0)));
        }
        if (L > 0 && edge < tol * gmax && dc0 < tol * gmax) return L;
        cur = std::move(next);
    }
    std::ostringstream os;
    os << "harmonic truncation did not converge below tolerance " << tol << " within L = " << cap;
    throw NoConvergence(os.str());
}

BlochVector reconstruct_bloch(const HarmonicState& state, const ValidatedModel& m, double t) {
    complexd c1{0.0, 0.0}, c2{0.0, 0.0}, c3{0.0, 0.0};
    for (int l = -state.truncation; l <= state.truncation; ++l) {
        const double phase = l * m.omega_f * t;
        const complexd e{std::cos(phase), std::sin(phase)};
        c1 += state.amp(1, l) * e;
        c2 += state.amp(2, l) * e;
        c3 += state.amp(3, l) * e;
    }
    return BlochVector{c1, c2, c3.real()};
}

}  // namespace polaremit
