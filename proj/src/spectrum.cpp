#include "polaremit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "polaremit/block_tridiagonal.hpp"
#include "polaremit/errors.hpp"
#include "polaremit/parallel.hpp"

namespace polaremit {

namespace {
constexpr double kPi = std::numbers::pi;

complexd pick(const std::vector<complexd>& v, int truncation, int l) {
    if (l < -truncation || l > truncation) return {0.0, 0.0};
    return v[static_cast<std::size_t>(l + truncation)];
}
}  // namespace

complexd CorrelationRHS::b(int i, int l) const {
    switch (i) {
        case 1: return pick(b1, truncation, l);
        case 2: return pick(b2, truncation, l);
        case 3: return pick(b3, truncation, l);
        default: throw InvalidArgument("component index must be 1, 2 or 3");
    }
}

complexd ResolventSolution::y(int i, int l) const {
    switch (i) {
        case 1: return pick(y1, truncation, l);
        case 2: return pick(y2, truncation, l);
        case 3: return pick(y3, truncation, l);
        default: throw InvalidArgument("component index must be 1, 2 or 3");
    }
}

CorrelationRHS correlation_rhs(const HarmonicState& state) {
    const int L = state.truncation;
    CorrelationRHS rhs;
    rhs.truncation = L;
    const std::size_t n = 2 * static_cast<std::size_t>(L) + 1;
    rhs.b1.assign(n, {0.0, 0.0});
    rhs.b2.assign(n, {0.0, 0.0});
    rhs.b3.assign(n, {0.0, 0.0});

    for (int l = -L; l <= L; ++l) {
        complexd c11{0.0, 0.0}, c22{0.0, 0.0}, c32{0.0, 0.0};
        // convolution restricted to indices available in the truncated state
        const int r_lo = std::max(-L, l - L);
        const int r_hi = std::min(L, l + L);
        for (int r = r_lo; r <= r_hi; ++r) {
            c11 += state.amp(1, l - r) * state.amp(2, r);
            c22 += state.amp(2, l - r) * state.amp(2, r);
            c32 += state.amp(3, r) * state.amp(2, l - r);
        }
        const std::size_t k = static_cast<std::size_t>(l + L);
        rhs.b1[k] = (l == 0 ? complexd{0.5, 0.0} : complexd{0.0, 0.0}) + state.amp(3, l) - c11;
        rhs.b2[k] = -c22;
        rhs.b3[k] = -0.5 * state.amp(2, l) - c32;
    }
    return rhs;
}

ResolventSolution solve_resolvent(const ValidatedModel& m, const CorrelationRHS& rhs, complexd z) {
    const int L = rhs.truncation;
    const std::size_t n = 2 * static_cast<std::size_t>(L) + 1;

    std::vector<Eigen::Matrix3cd> diag;
    diag.reserve(n);
    for (int l = -L; l <= L; ++l) {
        diag.push_back(z * Eigen::Matrix3cd::Identity() - generator_diag_block(m, l));
    }
    const Eigen::Matrix3cd off = -generator_off_block(m);
    const std::vector<Eigen::Matrix3cd> offs(n - 1, off);

    std::vector<Eigen::Vector3cd> b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = Eigen::Vector3cd(rhs.b1[k], rhs.b2[k], rhs.b3[k]);

    std::vector<Eigen::Vector3cd> y;
    try {
        y = solve_block_tridiagonal(diag, offs, offs, b);
    } catch (const SingularSystem& e) {
        std::ostringstream os;
        os << "resolvent singular at z = (" << z.real() << ", " << z.imag() << "): " << e.what();
        throw SingularSystem(os.str());
    }

    ResolventSolution sol;
    sol.z = z;
    sol.truncation = L;
    sol.y1.resize(n);
    sol.y2.resize(n);
    sol.y3.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        sol.y1[k] = y[k](0);
        sol.y2[k] = y[k](1);
        sol.y3[k] = y[k](2);
    }
    return sol;
}

SpectralPointValues resolvent_spectral_point(const ValidatedModel& m, const CorrelationRHS& rhs,
                                             double omega) {
    const double a = omega - m.omega_f;
    const ResolventSolution minus = solve_resolvent(m, rhs, complexd{0.0, -a});
    const ResolventSolution plus = solve_resolvent(m, rhs, complexd{0.0, +a});

    const complexd s1m = minus.y(1, 0), s2m = minus.y(2, 0);
    const complexd s1p = plus.y(1, 0), s2p = plus.y(2, 0);

    SpectralPointValues v;
    v.fx = ((s1m + s2m) + (s1p + s2p)).real() / (4.0 * kPi);
    v.fy = ((s1m - s2m) + (s1p - s2p)).real() / (4.0 * kPi);
    v.fas = (s1m - s1p).real() / (2.0 * kPi);
    v.finc = v.fx + v.fy + v.fas;
    return v;
}

namespace {

SpectrumTable evaluate_table(const ValidatedModel& m, const CorrelationRHS& rhs,
                             const std::vector<double>& grid, int threads) {
    SpectrumTable t;
    const std::size_t n = grid.size();
    t.omega = grid;
    t.fx.resize(n);
    t.fy.resize(n);
    t.fas.resize(n);
    t.finc.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const SpectralPointValues v = resolvent_spectral_point(m, rhs, grid[i]);
        t.fx[i] = v.fx;
        t.fy[i] = v.fy;
        t.fas[i] = v.fas;
        t.finc[i] = v.finc;
    });
    return t;
}

}  // namespace

SpectrumTable spectrum(const ValidatedModel& m, const HarmonicState& state,
                       const std::vector<double>& grid, const SpectrumOptions& opts) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw InvalidArgument("frequency grid must be finite and strictly increasing");
        }
    }

    const CorrelationRHS rhs = correlation_rhs(state);
    SpectrumTable t = evaluate_table(m, rhs, grid, opts.threads);

    if (opts.monitor_hermiticity && !grid.empty()) {
        const CorrelationRHS rhs_sym = correlation_rhs(state.symmetrized());
        const SpectrumTable ts = evaluate_table(m, rhs_sym, grid, opts.threads);
        double mon = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            mon = std::max({mon, std::abs(t.fx[i] - ts.fx[i]), std::abs(t.fy[i] - ts.fy[i]),
                            std::abs(t.fas[i] - ts.fas[i]), std::abs(t.finc[i] - ts.finc[i])});
        }
        t.hermiticity_monitor = mon;
    }
    return t;
}

double quadrature_at(const ValidatedModel& m, const HarmonicState& state, double omega) {
    const CorrelationRHS rhs = correlation_rhs(state);
    return resolvent_spectral_point(m, rhs, omega).fx;
}

double quadrature_at(const ValidatedModel& m, double omega) {
    return quadrature_at(m, solve_steady(m, auto_truncation(m, 1e-10)), omega);
}

PeakMetrics peak_metrics(const SpectrumTable& table, SpectrumColumn column, double w_lo,
                         double w_hi) {
    if (!(w_lo < w_hi)) throw InvalidArgument("peak window must satisfy w_lo < w_hi");
    const std::vector<double>* col = nullptr;
    switch (column) {
        case SpectrumColumn::fx: col = &table.fx; break;
        case SpectrumColumn::fy: col = &table.fy; break;
        case SpectrumColumn::fas: col = &table.fas; break;
        case SpectrumColumn::finc: col = &table.finc; break;
    }

    std::size_t first = table.omega.size(), last = 0;
    for (std::size_t i = 0; i < table.omega.size(); ++i) {
        if (table.omega[i] >= w_lo && table.omega[i] <= w_hi) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first >= table.omega.size() || last - first + 1 < 3) {
        throw NoPeak("peak window contains fewer than three grid points");
    }

    const double base = 0.5 * ((*col)[first] + (*col)[last]);

    // interior extremum of the column magnitude: discrete stationary point
    // with the largest excursion from the window-edge baseline
    std::size_t j = 0;
    double best = -1.0;
    for (std::size_t k = first + 1; k < last; ++k) {
        const double dl = (*col)[k] - (*col)[k - 1];
        const double dr = (*col)[k + 1] - (*col)[k];
        if (dl * dr <= 0.0) {
            const double exc = std::abs((*col)[k] - base);
            if (exc > best) {
                best = exc;
                j = k;
            }
        }
    }
    if (best <= 0.0) throw NoPeak("no interior extremum in the window");

    const double x0 = table.omega[j - 1], x1 = table.omega[j], x2 = table.omega[j + 1];
    const double f0 = (*col)[j - 1], f1 = (*col)[j], f2 = (*col)[j + 1];

    PeakMetrics pm;
    // parabola through the three points around the discrete extremum
    const double denom = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
    if (denom != 0.0) {
        pm.center = x1 - 0.5 * ((x1 - x0) * (x1 - x0) * (f1 - f2) - (x1 - x2) * (x1 - x2) * (f1 - f0)) / denom;
    } else {
        pm.center = x1;
    }
    // parabola value at the vertex (uniform-grid form is not assumed)
    {
        const double l0 = (pm.center - x1) * (pm.center - x2) / ((x0 - x1) * (x0 - x2));
        const double l1 = (pm.center - x0) * (pm.center - x2) / ((x1 - x0) * (x1 - x2));
        const double l2 = (pm.center - x0) * (pm.center - x1) / ((x2 - x0) * (x2 - x1));
        pm.height = f0 * l0 + f1 * l1 + f2 * l2;
    }

    const double sign = (pm.height >= base) ? 1.0 : -1.0;
    const double half = base + 0.5 * (pm.height - base);

    auto g = [&](std::size_t k) { return sign * ((*col)[k] - half); };

    double left = 0.0, right = 0.0;
    bool found_left = false, found_right = false;
    for (std::size_t k = j; k > first; --k) {
        if (g(k - 1) <= 0.0 && g(k) >= 0.0) {
            const double gk1 = g(k - 1), gk = g(k);
            left = table.omega[k - 1] +
                   (table.omega[k] - table.omega[k - 1]) * (0.0 - gk1) / (gk - gk1);
            found_left = true;
            break;
        }
    }
    for (std::size_t k = j; k < last; ++k) {
        if (g(k) >= 0.0 && g(k + 1) <= 0.0) {
            const double gk = g(k), gk1 = g(k + 1);
            right = table.omega[k] + (table.omega[k + 1] - table.omega[k]) * gk / (gk - gk1);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right) {
        throw ClippedPeak("half-maximum crossing lies outside the window");
    }
    pm.fwhm = right - left;
    return pm;
}

std::vector<double> make_grid(const ValidatedModel& m, double lo, double hi, int base_points,
                              bool refine) {
    if (!(lo < hi)) throw InvalidArgument("grid window must satisfy lo < hi");
    if (base_points < 16) throw InvalidArgument("grid needs at least 16 points");

    std::vector<double> g;
    const double step = (hi - lo) / (base_points - 1);
    for (int i = 0; i < base_points; ++i) g.push_back(lo + i * step);
    g.back() = hi;

    if (refine) {
        // linewidths scale with gamma (2N+1); sample 5x denser around the
        // structures at -+Omega_R, omega_f and omega_f -+ Omega_R
        const double half_band = 10.0 * (2.0 * m.moments.n + 1.0);
        const double fine = step / 5.0;
        for (double c : {m.rabi, -m.rabi, m.omega_f, m.omega_f - m.rabi, m.omega_f + m.rabi}) {
            const double b_lo = std::max(lo, c - half_band);
            const double b_hi = std::min(hi, c + half_band);
            for (double w = b_lo; w <= b_hi + 0.5 * fine; w += fine) {
                g.push_back(std::min(w, hi));
            }
        }
        std::sort(g.begin(), g.end());
        // drop near-duplicates so the grid stays strictly increasing
        std::vector<double> out;
        out.reserve(g.size());
        const double eps = 1e-9 * std::max(1.0, std::abs(hi) + std::abs(lo));
        for (double w : g) {
            if (out.empty() || w - out.back() > eps) out.push_back(w);
        }
        return out;
    }
    return g;
}

double adaptive_integral(const std::function<double(double)>& f, double lo, double hi,
                         const std::vector<double>& breakpoints, double rel_tol) {
    if (!(lo < hi)) throw InvalidArgument("integration window must satisfy lo < hi");

    std::vector<double> knots{lo, hi};
    for (double b : breakpoints) {
        if (b > lo && b < hi) knots.push_back(b);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    struct Simpson {
        const std::function<double(double)>& f;
        int max_depth;

        double refine(double a, double b, double fa, double fm, double fb, double whole,
                      double tol_here, int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth || std::abs(delta) <= 15.0 * tol_here) {
                return left + right + delta / 15.0;
            }
            return refine(a, m, fa, flm, fm, left, 0.5 * tol_here, depth + 1) +
                   refine(m, b, fm, frm, fb, right, 0.5 * tol_here, depth + 1);
        }
    };

    // first pass: coarse estimate fixing the absolute tolerance scale
    double scale = 0.0;
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double a = knots[s], b = knots[s + 1];
        const int nc = 32;
        const double h = (b - a) / nc;
        double acc = 0.5 * (std::abs(f(a)) + std::abs(f(b)));
        for (int i = 1; i < nc; ++i) acc += std::abs(f(a + i * h));
        scale += acc * h;
    }
    const double abs_tol = std::max(rel_tol * scale, 1e-300);

    double total = 0.0;
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double a = knots[s], b = knots[s + 1];
        const double m = 0.5 * (a + b);
        const double fa = f(a), fm = f(m), fb = f(b);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const Simpson simpson{f, 48};
        total += simpson.refine(a, b, fa, fm, fb, whole,
                                abs_tol * (b - a) / (hi - lo), 0);
    }
    return total;
}

double integrate_spectrum(const ValidatedModel& m, const HarmonicState& state, double rel_tol) {
    const CorrelationRHS rhs = correlation_rhs(state);
    auto finc = [&](double w) { return resolvent_spectral_point(m, rhs, w).finc; };

    const double span = m.omega_f + 10.0 * std::max(m.rabi, 1.0);
    const double lo = -span, hi = span;
    std::vector<double> marks;
    for (double c : {0.0, m.rabi, -m.rabi, m.omega_f, -m.omega_f, m.omega_f - m.rabi,
                     m.omega_f + m.rabi, -m.omega_f + m.rabi, -m.omega_f - m.rabi}) {
        marks.push_back(c);
        const double w = 2.0 * (2.0 * m.moments.n + 1.0);
        marks.push_back(c - w);
        marks.push_back(c + w);
    }
    const double body = adaptive_integral(finc, lo, hi, marks, rel_tol);
    // Lorentzian tails fall off as 1/(omega - omega_f)^2 beyond the window
    const double tail = finc(lo) * std::abs(lo - m.omega_f) + finc(hi) * std::abs(hi - m.omega_f);
    return body + tail;
}

}  // namespace polaremit
