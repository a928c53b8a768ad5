#pragma once

#include <functional>
#include <vector>

#include "polaremit/floquet.hpp"
#include "polaremit/model.hpp"

namespace polaremit {

/// tau = 0 values of the fluctuation correlations per harmonic, built from
/// the steady-state amplitudes by discrete convolution (indices outside the
/// truncation window count as zero).
struct CorrelationRHS {
    int truncation = 0;
    std::vector<complexd> b1, b2, b3;  // index l + truncation

    complexd b(int i, int l) const;
};

/// Laplace-domain correlation amplitudes at one complex point z.
/// Asymptotically z * y_i^{(l)}(z) -> b_i[l] as |z| grows.
struct ResolventSolution {
    complexd z{0.0, 0.0};
    int truncation = 0;
    std::vector<complexd> y1, y2, y3;

    complexd y(int i, int l) const;
};

/// Incoherent-spectrum components on a frequency grid (absolute omega, units
/// of gamma).  finc = fx + fy + fas pointwise by construction.
/// hermiticity_monitor records the largest change of any column caused by
/// enforcing the Hermiticity symmetry of the input amplitudes exactly.
struct SpectrumTable {
    std::vector<double> omega;
    std::vector<double> fx, fy, fas, finc;
    double hermiticity_monitor = 0.0;
};

enum class SpectrumColumn { fx, fy, fas, finc };

struct PeakMetrics {
    double center = 0.0;
    double height = 0.0;
    double fwhm = 0.0;
};

/// Values of the four spectral components at a single frequency.
struct SpectralPointValues {
    double fx = 0.0, fy = 0.0, fas = 0.0, finc = 0.0;
};

CorrelationRHS correlation_rhs(const HarmonicState& state);

/// Solves (z - A) y = b for the Laplace-domain correlation amplitudes, where
/// A is the same block-tridiagonal generator as the steady-state system with
/// the drive inhomogeneity removed.
ResolventSolution solve_resolvent(const ValidatedModel& m, const CorrelationRHS& rhs, complexd z);

/// One spectral point from the pair of resolvent solves at z = -+i(omega - omega_f);
/// the two solves are shared between all components.
SpectralPointValues resolvent_spectral_point(const ValidatedModel& m, const CorrelationRHS& rhs,
                                             double omega);

struct SpectrumOptions {
    int threads = 1;
    bool monitor_hermiticity = true;
};

/// Evaluates the spectrum on a strictly increasing frequency grid.  Per-point
/// solves are independent; evaluation may be parallel but the output ordering
/// and values do not depend on the thread count.
SpectrumTable spectrum(const ValidatedModel& m, const HarmonicState& state,
                       const std::vector<double>& grid, const SpectrumOptions& opts = {});

/// F_X at a single frequency through the same code path as spectrum(); the
/// value is bit-identical to the corresponding table entry.
double quadrature_at(const ValidatedModel& m, const HarmonicState& state, double omega);

/// Convenience overload: solves the steady state at the automatic truncation
/// first.
double quadrature_at(const ValidatedModel& m, double omega);

/// Peak location/height/width of one column inside [w_lo, w_hi].  The peak is
/// the interior extremum of the column magnitude; the center is refined by a
/// parabola through three points and the width by linear interpolation of the
/// half-maximum crossings relative to the window-edge baseline.  Throws
/// NoPeak when no interior extremum exists, ClippedPeak when a half-maximum
/// crossing leaves the window.
PeakMetrics peak_metrics(const SpectrumTable& table, SpectrumColumn column, double w_lo,
                         double w_hi);

/// Uniform base grid over [lo, hi] plus 5x denser bands of width
/// 20 gamma (2N+1) around omega = -+Omega_R, omega_f and omega_f -+ Omega_R.
std::vector<double> make_grid(const ValidatedModel& m, double lo, double hi, int base_points,
                              bool refine);

/// Integral of F_inc over the whole line, evaluated by adaptive quadrature on
/// [-(omega_f + 10 Omega_R), +(omega_f + 10 Omega_R)] with a 1/(omega-omega_f)^2
/// tail correction.  Equals gamma Re b1[0] for a converged truncation.
double integrate_spectrum(const ValidatedModel& m, const HarmonicState& state,
                          double rel_tol = 1e-3);

/// Shared adaptive Simpson quadrature with mandatory break points.
double adaptive_integral(const std::function<double(double)>& f, double lo, double hi,
                         const std::vector<double>& breakpoints, double rel_tol);

}  // namespace polaremit
