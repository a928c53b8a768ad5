#include "polaremit/model.hpp"

#include <cmath>
#include <sstream>

namespace polaremit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double wrap_angle(double theta) {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod can land exactly on 2pi after the correction when theta is a tiny
    // negative number
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double detuning(const ModelParams& p) { return (p.omega_f - p.omega0) / p.gamma; }

SqueezingMoments squeezing_moments(double r, double theta) {
    if (r < 0.0) {
        std::ostringstream os;
        os << "squeezing degree r must be >= 0, got " << r;
        throw NegativeSqueezing(os.str());
    }
    SqueezingMoments sm;
    if (r == 0.0) return sm;  // exactly n = 0, m = 0
    const double th = wrap_angle(theta);
    sm.n = std::sinh(r) * std::sinh(r);
    sm.m = std::cosh(r) * std::sinh(r) * complexd{std::cos(th), std::sin(th)};
    return sm;
}

ValidatedModel validate(const ModelParams& p) {
    if (!(p.gamma > 0.0)) {
        std::ostringstream os;
        os << "gamma must be > 0, got " << p.gamma;
        throw NonPositiveGamma(os.str());
    }
    if (p.rabi < 0.0) {
        std::ostringstream os;
        os << "rabi must be >= 0, got " << p.rabi;
        throw NegativeRabi(os.str());
    }
    if (p.r < 0.0) {
        std::ostringstream os;
        os << "squeezing degree r must be >= 0, got " << p.r;
        throw NegativeSqueezing(os.str());
    }
    if (p.omega_s != p.omega_f) {
        std::ostringstream os;
        os << "squeezed-field carrier must coincide with the drive frequency: omega_s="
           << p.omega_s << " omega_f=" << p.omega_f;
        throw CarrierMismatch(os.str());
    }

    ValidatedModel vm;
    vm.input = p;
    vm.input.theta = wrap_angle(p.theta);
    vm.delta = detuning(p);
    vm.omega_f = p.omega_f / p.gamma;
    vm.rabi = p.rabi / p.gamma;
    vm.delta_a = p.delta_a / p.gamma;
    vm.moments = squeezing_moments(p.r, vm.input.theta);
    vm.rwa_warning = p.omega_f < 10.0 * p.gamma;
    return vm;
}

}  // namespace polaremit
