#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polaremit/spectrum.hpp"
#include "polaremit/time_oracle.hpp"
#include "oracle_values.hpp"

using namespace polaremit;

namespace {

ModelParams desk_params() {
    ModelParams p;
    p.gamma = 1.0;
    p.omega0 = 200.0;
    p.omega_f = 200.0;
    p.omega_s = 200.0;
    p.rabi = 20.0;
    p.delta_a = 4.0;
    p.r = 0.5;
    p.theta = std::numbers::pi / 3.0;
    return p;
}

double drive_dt(const ValidatedModel& vm, int steps_per_period) {
    return 2.0 * std::numbers::pi / vm.omega_f / steps_per_period;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

TEST_CASE("integrate_bloch") {
    SUBCASE("step must resolve the drive") {
        const ValidatedModel vm = validate(desk_params());
        CHECK_THROWS_AS(integrate_bloch(vm, 1.0, drive_dt(vm, 10), BlochVector{}), StepTooLarge);
    }

    SUBCASE("pure spontaneous decay") {
        ModelParams p = desk_params();
        p.rabi = 0.0;
        p.delta_a = 0.0;
        p.r = 0.0;
        const ValidatedModel vm = validate(p);
        BlochVector init;
        init.s_z = 0.5;
        const BlochTrajectory tr = integrate_bloch(vm, 5.0, drive_dt(vm, 32), init);
        const double got = tr.s_z.back();
        CHECK(std::abs(got - oracle::kDecayAt5) <= 1e-8 * std::abs(oracle::kDecayAt5));
        CHECK(tr.max_im_sz < 1e-12);
    }

    SUBCASE("squeezed bath shifts the undriven fixed point") {
        ModelParams p = desk_params();
        p.rabi = 0.0;
        p.delta_a = 0.0;
        p.r = 1.0;
        p.theta = 0.0;
        const ValidatedModel vm = validate(p);
        BlochVector init;
        init.s_minus = complexd{0.3, -0.1};
        init.s_plus = std::conj(init.s_minus);
        init.s_z = 0.2;
        const BlochTrajectory tr = integrate_bloch(vm, 40.0, drive_dt(vm, 32), init);
        CHECK(tr.s_z.back() == doctest::Approx(oracle::kSz_r1_no_drive).epsilon(1e-7));
    }

    SUBCASE("conjugation symmetry holds along the trajectory") {
        const ValidatedModel vm = validate(desk_params());
        BlochVector init;
        init.s_z = -0.5;
        const BlochTrajectory tr = integrate_bloch(vm, 10.0, drive_dt(vm, 32), init);
        for (std::size_t k = 0; k < tr.times.size(); k += 50) {
            CHECK(std::abs(tr.s_plus[k] - std::conj(tr.s_minus[k])) < 1e-9);
            CHECK(std::abs(tr.s_z[k]) <= 0.5 + 1e-9);
            CHECK(std::abs(tr.s_minus[k]) <= 0.5 + 1e-9);
        }
    }

    SUBCASE("step halving shows fourth-order convergence") {
        const ValidatedModel vm = validate(desk_params());
        BlochVector init;
        init.s_z = -0.5;
        const double dt = drive_dt(vm, 200);
        auto endpoint = [&](double h) {
            const BlochTrajectory tr = integrate_bloch(vm, 2.0, h, init);
            return Eigen::Vector3cd(tr.s_minus.back(), tr.s_plus.back(),
                                    complexd{tr.s_z.back(), 0.0});
        };
        const auto a = endpoint(dt);
        const auto b = endpoint(dt / 2.0);
        const auto c = endpoint(dt / 4.0);
        const double e1 = (a - b).cwiseAbs().maxCoeff();
        const double e2 = (b - c).cwiseAbs().maxCoeff();
        CHECK(e1 <= 1e-8);
        const double ratio = e1 / e2;
        CHECK(ratio > 8.0);
        CHECK(ratio < 32.0);
    }

    SUBCASE("settled trajectory matches the harmonic steady state") {
        const ValidatedModel vm = validate(desk_params());
        const int L = auto_truncation(vm, 1e-10);
        const HarmonicState st = solve_steady(vm, L);

        BlochVector init;
        init.s_z = -0.5;
        const double dt = drive_dt(vm, 64);
        const double t_end = 30.0;
        const BlochTrajectory tr = integrate_bloch(vm, t_end, dt, init);

        // period average over the last drive period vs the l = 0 amplitudes
        const std::size_t per_steps = 64;
        complexd avg1{0, 0}, avg2{0, 0};
        double avg3 = 0.0;
        const std::size_t n = tr.times.size();
        for (std::size_t k = n - per_steps; k < n; ++k) {
            avg1 += tr.s_minus[k];
            avg2 += tr.s_plus[k];
            avg3 += tr.s_z[k];
        }
        avg1 /= static_cast<double>(per_steps);
        avg2 /= static_cast<double>(per_steps);
        avg3 /= static_cast<double>(per_steps);
        CHECK(std::abs(avg1 - st.amp(1, 0)) < 1e-5);
        CHECK(std::abs(avg2 - st.amp(2, 0)) < 1e-5);
        CHECK(std::abs(avg3 - st.amp(3, 0).real()) < 1e-5);

        // pointwise reconstruction after settling
        const BlochVector rec = reconstruct_bloch(st, vm, tr.times[n - 1]);
        CHECK(std::abs(rec.s_minus - tr.s_minus[n - 1]) < 1e-5);
        CHECK(std::abs(rec.s_z - tr.s_z[n - 1]) < 1e-5);
    }
}

TEST_CASE("correlate") {
    SUBCASE("ground-state atom has identically zero correlations") {
        ModelParams p = desk_params();
        p.rabi = 0.0;
        p.delta_a = 0.0;
        p.r = 0.0;
        const ValidatedModel vm = validate(p);
        const CorrelationGrid corr = correlate(vm, 40.0, 8);
        for (std::size_t j = 0; j < corr.tau.size(); j += 100) {
            CHECK(std::abs(corr.y1[j]) < 1e-12);
            CHECK(std::abs(corr.y2[j]) < 1e-12);
            CHECK(std::abs(corr.y3[j]) < 1e-12);
        }
    }

    SUBCASE("initial values match the convolution assembly") {
        const ValidatedModel vm = validate(desk_params());
        const CorrelationGrid corr = correlate(vm, 35.0, 16);
        const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
        const CorrelationRHS rhs = correlation_rhs(st);
        CHECK(std::abs(corr.y1[0] - rhs.b(1, 0)) < 1e-6);
        CHECK(std::abs(corr.y2[0] - rhs.b(2, 0)) < 1e-6);
        CHECK(std::abs(corr.y3[0] - rhs.b(3, 0)) < 1e-6);
        CHECK(std::abs(corr.y1[0].imag()) < 1e-9);
    }

    SUBCASE("correlations decay") {
        const ValidatedModel vm = validate(desk_params());
        const CorrelationGrid corr = correlate(vm, 35.0, 8);
        const std::size_t last = corr.tau.size() - 1;
        CHECK(std::abs(corr.y1[last]) <= 1e-6 * std::abs(corr.y1[0]));
    }

    SUBCASE("regression flow is linear in the initial values") {
        const ValidatedModel vm = validate(desk_params());
        const double dt = drive_dt(vm, 32);
        const Eigen::Vector3cd y0(complexd{0.31, -0.02}, complexd{-0.11, 0.27},
                                  complexd{0.05, 0.0});
        const auto a = propagate_regression(vm, 3.7, y0, 10.0, dt);
        // a power-of-two scale commutes with every floating-point operation
        const auto b = propagate_regression(vm, 3.7, (2.0 * y0).eval(), 10.0, dt);
        for (std::size_t j = 0; j < a.size(); j += 100) {
            CHECK((b[j] - 2.0 * a[j]).cwiseAbs().maxCoeff() == 0.0);
        }
        const auto c = propagate_regression(vm, 3.7, (0.37 * y0).eval(), 10.0, dt);
        for (std::size_t j = 0; j < a.size(); j += 100) {
            CHECK((c[j] - 0.37 * a[j]).cwiseAbs().maxCoeff() < 5e-13);
        }
    }

    SUBCASE("repeated runs are bit-identical across thread counts") {
        const ValidatedModel vm = validate(desk_params());
        OracleOptions par;
        par.threads = 8;
        const CorrelationGrid a = correlate(vm, 32.0, 8);
        const CorrelationGrid b = correlate(vm, 32.0, 8, par);
        for (std::size_t j = 0; j < a.tau.size(); j += 500) {
            CHECK(a.y1[j] == b.y1[j]);
            CHECK(a.y3[j] == b.y3[j]);
        }
    }

    SUBCASE("doubling the number of phases changes nothing measurable") {
        const ValidatedModel vm = validate(desk_params());
        const CorrelationGrid a = correlate(vm, 32.0, 16);
        const CorrelationGrid b = correlate(vm, 32.0, 32);
        double diff = 0.0;
        for (std::size_t j = 0; j < std::min(a.tau.size(), b.tau.size()); j += 10) {
            diff = std::max(diff, std::abs(a.y1[j] - b.y1[j]));
        }
        CHECK(diff <= 1e-8);
    }

    SUBCASE("too few phases are rejected") {
        const ValidatedModel vm = validate(desk_params());
        CHECK_THROWS_AS(correlate(vm, 32.0, 4), InvalidArgument);
    }

    SUBCASE("undamped settling trips NotSettled") {
        const ValidatedModel vm = validate(desk_params());
        OracleOptions opts;
        opts.settle_max = 0.5;  // give up almost immediately
        CHECK_THROWS_AS(correlate(vm, 32.0, 8, opts), NotSettled);
    }
}

TEST_CASE("spectrum_numeric") {
    SUBCASE("ground state gives the all-zero table") {
        ModelParams p = desk_params();
        p.rabi = 0.0;
        p.delta_a = 0.0;
        p.r = 0.0;
        const ValidatedModel vm = validate(p);
        const SpectrumTable t = spectrum_numeric(vm, linspace(0.0, 40.0, 33), 40.0);
        for (double v : t.finc) CHECK(std::abs(v) < 1e-12);
    }

    SUBCASE("asymmetric part vanishes at the drive frequency") {
        const ValidatedModel vm = validate(desk_params());
        const SpectrumTable t = spectrum_numeric(vm, {199.0, 200.0, 201.0}, 40.0);
        CHECK(std::abs(t.fas[1]) < 1e-14);
    }

    SUBCASE("tau_max below the transform floor is rejected") {
        const ValidatedModel vm = validate(desk_params());
        CHECK_THROWS_AS(spectrum_numeric(vm, linspace(0.0, 40.0, 17), 1.0), InvalidArgument);
    }

    SUBCASE("agrees with the resolvent path on the desk-scale point") {
        const ValidatedModel vm = validate(desk_params());
        const std::vector<double> grid = linspace(0.0, 40.0, 81);
        const SpectrumTable orc = spectrum_numeric(vm, grid, 40.0);

        const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
        const SpectrumTable res = spectrum(vm, st, grid);

        double peak = 0.0;
        for (double v : orc.finc) peak = std::max(peak, std::abs(v));
        REQUIRE(peak > 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(res.finc[i] - orc.finc[i]) <= 0.02 * peak);
            CHECK(std::abs(res.fx[i] - orc.fx[i]) <= 0.02 * peak);
            CHECK(std::abs(res.fy[i] - orc.fy[i]) <= 0.02 * peak);
            CHECK(std::abs(res.fas[i] - orc.fas[i]) <= 0.02 * peak);
        }
    }
}

TEST_CASE("full-scale drive: trajectory average matches the harmonic solution") {
    ModelParams p;
    p.gamma = 1.0;
    p.omega0 = p.omega_f = p.omega_s = 5000.0;
    p.rabi = 100.0;
    p.delta_a = 10.0;
    const ValidatedModel vm = validate(p);
    const int L = auto_truncation(vm, 1e-10);
    const HarmonicState st = solve_steady(vm, L);

    const int spp = 64;
    const double dt = drive_dt(vm, spp);
    BlochVector init;
    init.s_z = -0.5;
    const BlochTrajectory tr = integrate_bloch(vm, 30.0, dt, init);

    const std::size_t n = tr.times.size();
    complexd avg1{0, 0};
    double avg3 = 0.0;
    for (std::size_t k = n - spp; k < n; ++k) {
        avg1 += tr.s_minus[k];
        avg3 += tr.s_z[k];
    }
    avg1 /= static_cast<double>(spp);
    avg3 /= static_cast<double>(spp);
    CHECK(std::abs(avg1 - st.amp(1, 0)) < 1e-6);
    CHECK(std::abs(avg3 - st.amp(3, 0).real()) < 1e-6);

    // pointwise reconstruction after settling
    const BlochVector rec = reconstruct_bloch(st, vm, tr.times[n - 1]);
    CHECK(std::abs(rec.s_minus - tr.s_minus[n - 1]) < 1e-5);
    CHECK(std::abs(rec.s_z - tr.s_z[n - 1]) < 1e-5);
}

TEST_CASE("steady population tracks theta the same way in both paths") {
    ModelParams p = desk_params();
    p.delta_a = 0.0;
    p.rabi = 15.0;
    p.r = 0.8;
    for (double th : {0.0, 1.2, 3.1, 5.0}) {
        p.theta = th;
        const ValidatedModel vm = validate(p);
        const HarmonicState st = solve_steady(vm, 0);
        BlochVector init;
        init.s_z = -0.5;
        const BlochTrajectory tr =
            integrate_bloch(vm, 40.0, 2.0 * std::numbers::pi / vm.omega_f / 32.0, init);
        CHECK(std::abs(tr.s_z.back() - st.amp(3, 0).real()) < 1e-6);
    }
}
