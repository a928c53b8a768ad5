#pragma once

#include <vector>

#include "polaremit/floquet.hpp"
#include "polaremit/model.hpp"
#include "polaremit/spectrum.hpp"

namespace polaremit {

/// Directly integrated Bloch-vector trajectory.  Time is in units of 1/gamma.
struct BlochTrajectory {
    std::vector<double> times;
    std::vector<complexd> s_minus, s_plus;
    std::vector<double> s_z;
    double max_im_sz = 0.0;  // largest imaginary residue dropped from <S^z>
};

/// Two-time fluctuation correlations Y_i(t, t+tau) averaged over one drive
/// period of the start time t at steady state.
struct CorrelationGrid {
    std::vector<double> tau;
    std::vector<complexd> y1, y2, y3;
};

struct OracleOptions {
    int n_phase = 16;          // start phases per drive period, >= 8
    int steps_per_period = 32; // integrator steps per drive period, >= 20
    double settle_min = 20.0;  // earliest time steady state may be declared
    double settle_max = 400.0; // give up (NotSettled) beyond this time
    double settle_tol = 1e-8;  // period-to-period change threshold
    int threads = 1;
};

/// Fixed-step 4th-order integration of the time-dependent Bloch equations in
/// the frame rotating at the drive frequency.  dt must resolve the drive
/// oscillation: dt <= (2 pi / omega_f) / 20, otherwise StepTooLarge.
BlochTrajectory integrate_bloch(const ValidatedModel& m, double t_end, double dt,
                                const BlochVector& initial);

/// Settles to steady state, then launches the homogeneous regression
/// equations in tau from n_phase start phases spanning one drive period and
/// averages the resulting correlations over the phases.  Throws NotSettled
/// when the single-time averages keep drifting.
CorrelationGrid correlate(const ValidatedModel& m, double tau_max, int n_phase,
                          const OracleOptions& opts = {});

/// One homogeneous regression trajectory in tau starting from the given
/// tau = 0 values, with the drive phase evaluated at t_start + tau.  The flow
/// is linear in y0.  Returns the states on the step grid j * dt.
std::vector<Eigen::Vector3cd> propagate_regression(const ValidatedModel& m, double t_start,
                                                   const Eigen::Vector3cd& y0, double tau_max,
                                                   double dt);

/// Spectral components at one frequency from the cosine/sine transforms of
/// the correlation grid (piecewise-linear correlations integrated against the
/// exact oscillatory factor).
SpectralPointValues oracle_spectral_point(const CorrelationGrid& corr, const ValidatedModel& m,
                                          double omega);

/// Throws TailTooShort unless every correlation has decayed below 1e-4 of its
/// initial value at the end of the grid.
void require_decayed_tail(const CorrelationGrid& corr);

/// Spectrum table from an already computed correlation grid.
SpectrumTable spectrum_from_correlations(const CorrelationGrid& corr, const ValidatedModel& m,
                                         const std::vector<double>& grid, int threads = 1);

/// Brute-force spectrum on a frequency grid.  Requires
/// tau_max >= 30 / min(1, 2N+1) and correlations decayed below 1e-4 of their
/// initial values at tau_max (TailTooShort otherwise).
SpectrumTable spectrum_numeric(const ValidatedModel& m, const std::vector<double>& grid,
                               double tau_max, const OracleOptions& opts = {});

}  // namespace polaremit
