#pragma once

#include <complex>

#include "polaremit/errors.hpp"

namespace polaremit {

using complexd = std::complex<double>;

/// Physical parameters of emitter, drive and squeezed bath, as supplied by the
/// user.  gamma is the global rate unit; everything else is expressed in the
/// same units as gamma.
struct ModelParams {
    double gamma = 1.0;    // radiative damping rate, > 0
    double omega0 = 0.0;   // atomic transition frequency
    double omega_f = 0.0;  // drive frequency
    double omega_s = 0.0;  // squeezed-field carrier frequency, must equal omega_f
    double rabi = 0.0;     // Rabi frequency, >= 0
    double delta_a = 0.0;  // inversion-symmetry-violation drive strength
    double r = 0.0;        // squeezing degree, >= 0
    double theta = 0.0;    // squeezing phase, normalized into [0, 2pi)
};

/// Derived squeezed-bath moments.
struct SqueezingMoments {
    double n = 0.0;         // sinh^2(r), mean photon parameter
    complexd m{0.0, 0.0};   // cosh(r) sinh(r) e^{i theta}
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

/// (omega_f - omega0) / gamma.
double detuning(const ModelParams& p);

/// n = sinh^2(r), m = cosh(r) sinh(r) e^{i theta}.  Throws NegativeSqueezing
/// for r < 0.  r = 0 yields exactly n = 0, m = 0.
SqueezingMoments squeezing_moments(double r, double theta);

/// Validated parameters rescaled to the internal unit convention gamma = 1.
/// All rates and frequencies below are in units of gamma; outputs computed
/// from this carry the same convention.  Immutable after validation and safe
/// to share between threads.
struct ValidatedModel {
    ModelParams input;        // parameters as supplied
    double delta = 0.0;       // (omega_f - omega0) / gamma
    double omega_f = 0.0;     // omega_f / gamma
    double rabi = 0.0;        // rabi / gamma
    double delta_a = 0.0;     // delta_a / gamma
    SqueezingMoments moments;
    bool rwa_warning = false;  // set when omega_f < 10 gamma
};

/// Checks invariants (gamma > 0, rabi >= 0, r >= 0, omega_s == omega_f),
/// normalizes theta, rescales to gamma = 1 and derives detuning and bath
/// moments.  Throws one of the ValidationError subclasses on bad input.
ValidatedModel validate(const ModelParams& p);

}  // namespace polaremit
