#include "polaremit/time_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "polaremit/errors.hpp"
#include "polaremit/parallel.hpp"

namespace polaremit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using State3 = Eigen::Vector3cd;

// Right-hand side of the rotating-frame equations of motion.  The same
// coefficients drive the single-time averages (inhomogeneous = true, with the
// -gamma/2 term) and the regression correlations (homogeneous).
State3 bloch_rhs(const ValidatedModel& m, double t, const State3& y, bool inhomogeneous) {
    const double n = m.moments.n;
    const complexd mm = m.moments.m;
    const double osc = m.delta_a * std::cos(m.omega_f * t);

    State3 f;
    f(0) = -(complexd{0.5 + n, -m.delta + osc}) * y(0) + mm * y(1) + m.rabi * y(2);
    f(1) = -(complexd{0.5 + n, +m.delta - osc}) * y(1) + std::conj(mm) * y(0) + m.rabi * y(2);
    f(2) = -0.5 * m.rabi * (y(0) + y(1)) - (2.0 * n + 1.0) * y(2) -
           (inhomogeneous ? complexd{0.5, 0.0} : complexd{0.0, 0.0});
    return f;
}

State3 rk4_step(const ValidatedModel& m, double t, double h, const State3& y, bool inhomogeneous) {
    const State3 k1 = bloch_rhs(m, t, y, inhomogeneous);
    const State3 k2 = bloch_rhs(m, t + 0.5 * h, y + 0.5 * h * k1, inhomogeneous);
    const State3 k3 = bloch_rhs(m, t + 0.5 * h, y + 0.5 * h * k2, inhomogeneous);
    const State3 k4 = bloch_rhs(m, t + h, y + h * k3, inhomogeneous);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double max_step(const ValidatedModel& m) { return (kTwoPi / m.omega_f) / 20.0; }

// Step size that resolves both the drive oscillation and the slow scales.
double pick_step(const ValidatedModel& m, int steps_per_period) {
    const double period = kTwoPi / m.omega_f;
    double dt = period / steps_per_period;
    const double slow =
        std::max({1.0, m.rabi, 2.0 * m.moments.n + 1.0, std::abs(m.delta), m.delta_a});
    dt = std::min(dt, 0.05 / slow);
    return dt;
}

}  // namespace

BlochTrajectory integrate_bloch(const ValidatedModel& m, double t_end, double dt,
                                const BlochVector& initial) {
    if (!(t_end >= 0.0) || !(dt > 0.0)) {
        throw InvalidArgument("integrate_bloch needs t_end >= 0 and dt > 0");
    }
    if (dt > max_step(m) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "dt = " << dt << " does not resolve the drive oscillation (need <= " << max_step(m)
           << ")";
        throw StepTooLarge(os.str());
    }

    // shorten the step slightly so an integer number of steps lands exactly
    // on t_end
    const std::size_t n_steps =
        t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12)) : 0;
    const double h = n_steps > 0 ? t_end / static_cast<double>(n_steps) : dt;

    BlochTrajectory tr;
    tr.times.reserve(n_steps + 1);
    tr.s_minus.reserve(n_steps + 1);
    tr.s_plus.reserve(n_steps + 1);
    tr.s_z.reserve(n_steps + 1);

    State3 y(initial.s_minus, initial.s_plus, complexd{initial.s_z, 0.0});
    double t = 0.0;
    for (std::size_t k = 0;; ++k) {
        tr.times.push_back(t);
        tr.s_minus.push_back(y(0));
        tr.s_plus.push_back(y(1));
        tr.s_z.push_back(y(2).real());
        tr.max_im_sz = std::max(tr.max_im_sz, std::abs(y(2).imag()));
        if (k == n_steps) break;
        y = rk4_step(m, t, h, y, true);
        t = static_cast<double>(k + 1) * h;
    }
    return tr;
}

namespace {

struct SettledPeriod {
    double t_start = 0.0;
    std::vector<State3> states;  // one drive period of settled states, step dt
    double dt = 0.0;
};

SettledPeriod settle(const ValidatedModel& m, const OracleOptions& opts) {
    const double period = kTwoPi / m.omega_f;
    int spp = std::max(opts.steps_per_period, 20);
    // keep the start phases exactly on integrator steps
    const int n_phase = std::max(opts.n_phase, 8);
    spp = ((spp + n_phase - 1) / n_phase) * n_phase;
    double dt = period / spp;
    while (dt > 0.05 / std::max({1.0, m.rabi, 2.0 * m.moments.n + 1.0, std::abs(m.delta),
                                 m.delta_a})) {
        spp += n_phase;
        dt = period / spp;
    }

    State3 y(complexd{0, 0}, complexd{0, 0}, complexd{-0.5, 0.0});
    double t = 0.0;
    State3 prev = y;
    bool have_prev = false;
    while (t < opts.settle_max) {
        for (int s = 0; s < spp; ++s) {
            y = rk4_step(m, t, dt, y, true);
            t += dt;
        }
        const double drift = have_prev ? (y - prev).cwiseAbs().maxCoeff() : 1.0;
        if (have_prev && t >= opts.settle_min && drift < opts.settle_tol) {
            SettledPeriod sp;
            sp.t_start = t;
            sp.dt = dt;
            sp.states.reserve(spp);
            double tt = t;
            State3 yy = y;
            for (int s = 0; s < spp; ++s) {
                sp.states.push_back(yy);
                yy = rk4_step(m, tt, dt, yy, true);
                tt += dt;
            }
            return sp;
        }
        prev = y;
        have_prev = true;
    }
    std::ostringstream os;
    os << "single-time averages still drift after t = " << opts.settle_max;
    throw NotSettled(os.str());
}

}  // namespace

std::vector<Eigen::Vector3cd> propagate_regression(const ValidatedModel& m, double t_start,
                                                   const Eigen::Vector3cd& y0, double tau_max,
                                                   double dt) {
    if (!(tau_max > 0.0) || !(dt > 0.0)) {
        throw InvalidArgument("propagate_regression needs tau_max > 0 and dt > 0");
    }
    if (dt > max_step(m) * (1.0 + 1e-12)) {
        throw StepTooLarge("regression step does not resolve the drive oscillation");
    }
    const std::size_t n_tau = static_cast<std::size_t>(std::ceil(tau_max / dt - 1e-12));
    std::vector<State3> buf;
    buf.reserve(n_tau + 1);
    State3 y = y0;
    double tau = 0.0;
    for (std::size_t j = 0;; ++j) {
        buf.push_back(y);
        if (j == n_tau) break;
        y = rk4_step(m, t_start + tau, dt, y, false);
        tau = static_cast<double>(j + 1) * dt;
    }
    return buf;
}

CorrelationGrid correlate(const ValidatedModel& m, double tau_max, int n_phase,
                          const OracleOptions& opts_in) {
    if (n_phase < 8) throw InvalidArgument("correlate needs at least 8 start phases");
    if (!(tau_max > 0.0)) throw InvalidArgument("tau_max must be > 0");

    OracleOptions opts = opts_in;
    opts.n_phase = n_phase;
    const SettledPeriod sp = settle(m, opts);
    const double dt = sp.dt;
    const int spp = static_cast<int>(sp.states.size());
    const int stride = spp / n_phase;

    const std::size_t n_tau = static_cast<std::size_t>(std::ceil(tau_max / dt - 1e-12));

    std::vector<std::vector<State3>> per_phase(static_cast<std::size_t>(n_phase));
    parallel_for(static_cast<std::size_t>(n_phase), opts.threads, [&](std::size_t k) {
        const State3& y0 = sp.states[k * static_cast<std::size_t>(stride)];
        const double tk = sp.t_start + static_cast<double>(k * stride) * dt;
        const complexd c1 = y0(0), c2 = y0(1), c3 = y0(2);

        State3 y;
        y(0) = 0.5 + c3 - c2 * c1;        // Y1(0) = 1/2 + <S^z> - <S~+><S~->
        y(1) = -c2 * c2;                  // Y2(0) = -<S~+>^2
        y(2) = -0.5 * c2 - c2 * c3;       // Y3(0) = -(1/2)<S~+> - <S~+><S^z>

        per_phase[k] = propagate_regression(m, tk, y, tau_max, dt);
    });

    CorrelationGrid grid;
    grid.tau.resize(n_tau + 1);
    grid.y1.assign(n_tau + 1, {0.0, 0.0});
    grid.y2.assign(n_tau + 1, {0.0, 0.0});
    grid.y3.assign(n_tau + 1, {0.0, 0.0});
    for (std::size_t j = 0; j <= n_tau; ++j) grid.tau[j] = static_cast<double>(j) * dt;
    for (int k = 0; k < n_phase; ++k) {
        const auto& buf = per_phase[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j <= n_tau; ++j) {
            grid.y1[j] += buf[j](0);
            grid.y2[j] += buf[j](1);
            grid.y3[j] += buf[j](2);
        }
    }
    const double inv = 1.0 / n_phase;
    for (std::size_t j = 0; j <= n_tau; ++j) {
        grid.y1[j] *= inv;
        grid.y2[j] *= inv;
        grid.y3[j] *= inv;
    }
    return grid;
}

namespace {

// integral over one step of a linear segment against e^{i a tau}
struct OscMoments {
    complexd m0, m1;
};

OscMoments osc_moments(double a, double h) {
    const double ah = a * h;
    OscMoments mo;
    if (std::abs(ah) < 1e-4) {
        // series in (a h) to avoid cancellation
        const complexd i{0.0, 1.0};
        mo.m0 = h * (1.0 + i * ah / 2.0 - ah * ah / 6.0 - i * ah * ah * ah / 24.0);
        mo.m1 = h * h * (0.5 + i * ah / 3.0 - ah * ah / 8.0 - i * ah * ah * ah / 30.0);
    } else {
        const complexd ia{0.0, a};
        const complexd e{std::cos(ah), std::sin(ah)};
        mo.m0 = (e - 1.0) / ia;
        mo.m1 = h * e / ia - (e - 1.0) / (ia * ia);
    }
    return mo;
}

complexd osc_integral(const std::vector<double>& tau, const std::vector<complexd>& f, double a) {
    const double h = tau[1] - tau[0];
    const OscMoments mo = osc_moments(a, h);
    complexd acc{0.0, 0.0};
    for (std::size_t j = 0; j + 1 < tau.size(); ++j) {
        const double phase = a * tau[j];
        const complexd e{std::cos(phase), std::sin(phase)};
        acc += e * (f[j] * mo.m0 + (f[j + 1] - f[j]) * (mo.m1 / h));
    }
    return acc;
}

}  // namespace

SpectralPointValues oracle_spectral_point(const CorrelationGrid& corr, const ValidatedModel& m,
                                          double omega) {
    const double a = omega - m.omega_f;
    const complexd wp1 = osc_integral(corr.tau, corr.y1, +a);
    const complexd wm1 = osc_integral(corr.tau, corr.y1, -a);
    const complexd wp2 = osc_integral(corr.tau, corr.y2, +a);
    const complexd wm2 = osc_integral(corr.tau, corr.y2, -a);

    const complexd c1 = 0.5 * (wp1 + wm1);            // integral y1 cos(a tau)
    const complexd c2 = 0.5 * (wp2 + wm2);
    const complexd s1 = (wp1 - wm1) / complexd{0.0, 2.0};  // integral y1 sin(a tau)

    SpectralPointValues v;
    v.fx = (c1 + c2).real() / (2.0 * std::numbers::pi);
    v.fy = (c1 - c2).real() / (2.0 * std::numbers::pi);
    v.fas = -s1.imag() / std::numbers::pi;
    v.finc = v.fx + v.fy + v.fas;
    return v;
}

void require_decayed_tail(const CorrelationGrid& corr) {
    const std::size_t last = corr.tau.size() - 1;
    for (int i = 0; i < 3; ++i) {
        const std::vector<complexd>& y = (i == 0) ? corr.y1 : (i == 1) ? corr.y2 : corr.y3;
        const double y0 = std::abs(y[0]);
        if (y0 > 0.0 && std::abs(y[last]) > 1e-4 * y0) {
            std::ostringstream os;
            os << "correlation " << (i + 1) << " has not decayed at tau_max: |y(tau_max)| = "
               << std::abs(y[last]) << " vs |y(0)| = " << y0;
            throw TailTooShort(os.str());
        }
    }
}

SpectrumTable spectrum_from_correlations(const CorrelationGrid& corr, const ValidatedModel& m,
                                         const std::vector<double>& grid, int threads) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw InvalidArgument("frequency grid must be finite and strictly increasing");
        }
    }
    SpectrumTable t;
    t.omega = grid;
    t.fx.resize(grid.size());
    t.fy.resize(grid.size());
    t.fas.resize(grid.size());
    t.finc.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const SpectralPointValues v = oracle_spectral_point(corr, m, grid[i]);
        t.fx[i] = v.fx;
        t.fy[i] = v.fy;
        t.fas[i] = v.fas;
        t.finc[i] = v.finc;
    });
    return t;
}

SpectrumTable spectrum_numeric(const ValidatedModel& m, const std::vector<double>& grid,
                               double tau_max, const OracleOptions& opts) {
    const double needed = 30.0 / std::min(1.0, 2.0 * m.moments.n + 1.0);
    if (tau_max < needed) {
        std::ostringstream os;
        os << "tau_max = " << tau_max << " too short for spectral transforms (need >= " << needed
           << ")";
        throw InvalidArgument(os.str());
    }
    const CorrelationGrid corr = correlate(m, tau_max, opts.n_phase, opts);
    require_decayed_tail(corr);
    return spectrum_from_correlations(corr, m, grid, opts.threads);
}

}  // namespace polaremit
