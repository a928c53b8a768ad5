// End-to-end acceptance suite.  Each numbered check prints one line; the
// binary exits nonzero if any check fails.  Wall-clock budgets are asserted
// where the check is meant to stay cheap.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polaremit/config.hpp"
#include "polaremit/runner.hpp"
#include "polaremit/spectrum.hpp"
#include "polaremit/time_oracle.hpp"

using namespace polaremit;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

ModelParams paper_point(double rabi, double delta_a, double r, double theta,
                        double omega = 5000.0) {
    ModelParams p;
    p.gamma = 1.0;
    p.omega0 = omega;
    p.omega_f = omega;
    p.omega_s = omega;
    p.rabi = rabi;
    p.delta_a = delta_a;
    p.r = r;
    p.theta = theta;
    return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// ---------------------------------------------------------------------------

void criterion_1_analytic_fixed_point() {
    Timer timer;
    bool ok = true;
    std::ostringstream detail;
    for (double r : {0.0, 0.5, 1.0}) {
        ModelParams p = paper_point(0.0, 10.0, r, 0.0);
        const ValidatedModel vm = validate(p);
        const int L = auto_truncation(vm, 1e-10);
        const HarmonicState st = solve_steady(vm, L);
        const double expected = -0.5 / (2.0 * vm.moments.n + 1.0);
        if (std::abs(st.amp(3, 0) - complexd{expected, 0.0}) > 1e-12) ok = false;
        for (int l = -L; l <= L; ++l) {
            if (std::abs(st.amp(1, l)) > 1e-12 || std::abs(st.amp(2, l)) > 1e-12) ok = false;
            if (l != 0 && std::abs(st.amp(3, l)) > 1e-12) ok = false;
        }
        detail << "r=" << r << ": X3=" << fmt(st.amp(3, 0).real()) << "  ";
    }
    const double t = timer.s();
    if (t >= 1.0) ok = false;
    detail << "t=" << fmt(t) << "s";
    report(1, "analytic fixed point at zero drive", ok, detail.str());
}

void criterion_2_resonance_closed_form() {
    bool ok = true;
    std::ostringstream detail;
    for (double w : {1.0, 10.0, 100.0}) {
        const ValidatedModel vm = validate(paper_point(w, 0.0, 0.0, 0.0));
        const HarmonicState st = solve_steady(vm, 0);
        const double x3 = -1.0 / (2.0 * (1.0 + 2.0 * w * w));
        const double x1 = 2.0 * w * x3;
        if (std::abs(st.amp(3, 0) - complexd{x3, 0.0}) > 1e-10 * std::abs(x3)) ok = false;
        if (std::abs(st.amp(1, 0) - complexd{x1, 0.0}) > 1e-10 * std::abs(x1)) ok = false;
        detail << "W=" << w << ": rel_err="
               << fmt(std::abs(st.amp(3, 0).real() - x3) / std::abs(x3)) << "  ";
    }
    report(2, "closed-form resonance steady state", ok, detail.str());
}

void criterion_3_hermiticity() {
    std::mt19937 rng(20250810);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool ok = true;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        ModelParams p = paper_point(200.0 * u(rng), 20.0 * u(rng), 1.5 * u(rng),
                                    2.0 * std::numbers::pi * u(rng));
        p.omega0 = p.omega_f - (-5.0 + 10.0 * u(rng));
        const ValidatedModel vm = validate(p);
        const int L = auto_truncation(vm, 1e-10);
        const double res = solve_steady(vm, L).hermiticity_residual();
        worst = std::max(worst, res);
        if (res > 1e-10) ok = false;
    }
    report(3, "Hermiticity symmetry over 50 random draws", ok, "worst=" + fmt(worst));
}

void criterion_4_sum_rule() {
    bool ok = true;
    std::ostringstream detail;
    for (const char* name : {"desk_validate", "fig1"}) {
        Timer timer;
        const RunConfig cfg = load_preset(name);
        const ValidatedModel vm = validate(cfg.model);
        const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
        const double integral = integrate_spectrum(vm, st);
        const double expected = correlation_rhs(st).b(1, 0).real();
        const double rel = std::abs(integral - expected) / expected;
        const double t = timer.s();
        if (rel > 0.01 || t >= 30.0) ok = false;
        detail << name << ": rel_err=" << fmt(rel) << " t=" << fmt(t) << "s  ";
    }
    report(4, "sum rule (integrated F_inc = gamma Re b1[0])", ok, detail.str());
}

struct TripletMetrics {
    PeakMetrics left, center, right;
};

TripletMetrics triplet(const SpectrumTable& t, double wf) {
    TripletMetrics m;
    m.left = peak_metrics(t, SpectrumColumn::finc, wf - 30.0, wf - 10.0);
    m.center = peak_metrics(t, SpectrumColumn::finc, wf - 8.0, wf + 8.0);
    m.right = peak_metrics(t, SpectrumColumn::finc, wf + 10.0, wf + 30.0);
    return m;
}

bool triplet_ok(const TripletMetrics& m, double wf, std::ostringstream& detail,
                const char* tag) {
    bool ok = true;
    if (std::abs(m.left.center - (wf - 20.0)) > 0.2) ok = false;
    if (std::abs(m.center.center - wf) > 0.2) ok = false;
    if (std::abs(m.right.center - (wf + 20.0)) > 0.2) ok = false;
    if (std::abs(m.left.fwhm - 1.5) > 0.075) ok = false;
    if (std::abs(m.right.fwhm - 1.5) > 0.075) ok = false;
    if (std::abs(m.center.fwhm - 1.0) > 0.05) ok = false;
    detail << tag << ": centers " << fmt(m.left.center - wf) << "/" << fmt(m.center.center - wf)
           << "/" << fmt(m.right.center - wf) << ", fwhm " << fmt(m.left.fwhm) << "/"
           << fmt(m.center.fwhm) << "/" << fmt(m.right.fwhm) << "  ";
    return ok;
}

void criterion_5_mollow() {
    const double wf = 200.0;
    const ValidatedModel vm = validate(paper_point(20.0, 0.0, 0.0, 0.0, wf));
    const std::vector<double> grid = linspace(wf - 30.0, wf + 30.0, 2401);
    std::ostringstream detail;

    const HarmonicState st = solve_steady(vm, 0);
    const SpectrumTable res = spectrum(vm, st, grid);
    bool ok = triplet_ok(triplet(res, wf), wf, detail, "resolvent");

    OracleOptions opts;
    opts.n_phase = 8;
    const SpectrumTable orc = spectrum_numeric(vm, grid, 40.0, opts);
    ok = triplet_ok(triplet(orc, wf), wf, detail, "oracle") && ok;

    report(5, "three-peak structure at zero symmetry violation", ok, detail.str());
}

void criterion_6_fig1() {
    Timer timer;
    const RunConfig cfg = load_preset("fig1");
    const ValidatedModel vm = validate(cfg.model);
    const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
    const std::vector<double> grid = make_grid(vm, 0.0, 200.0, 400, true);
    const SpectrumTable t = spectrum(vm, st, grid);

    bool ok = true;
    std::ostringstream detail;
    const PeakMetrics pm = peak_metrics(t, SpectrumColumn::finc, 50.0, 150.0);
    if (std::abs(pm.center - 100.0) > 2.0) ok = false;
    double fx_max = -1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 90.0 && grid[i] <= 110.0) fx_max = std::max(fx_max, t.fx[i]);
    }
    if (!(fx_max < 0.0)) ok = false;
    const double time = timer.s();
    if (time >= 60.0) ok = false;
    detail << "peak at " << fmt(pm.center) << ", max F_X on [90,110] = " << fmt(fx_max)
           << ", t=" << fmt(time) << "s";
    report(6, "figure-1 reproduction: low-frequency peak and negative F_X", ok, detail.str());
}

void criterion_7_r_trends() {
    const std::vector<double> rs{0.0, 0.2, 0.5, 0.8, 1.0};
    std::vector<double> heights, fwhms, fxs;
    for (double r : rs) {
        const ValidatedModel vm = validate(paper_point(100.0, 10.0, r, 0.0));
        const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
        const std::vector<double> grid = make_grid(vm, 50.0, 150.0, 401, true);
        const SpectrumTable t = spectrum(vm, st, grid);
        const PeakMetrics pm = peak_metrics(t, SpectrumColumn::finc, 50.0, 150.0);
        heights.push_back(pm.height);
        fwhms.push_back(pm.fwhm);
        fxs.push_back(quadrature_at(vm, st, vm.rabi));
    }
    bool h_dec = true, w_inc = true, fx_dec = true;
    for (std::size_t i = 1; i < rs.size(); ++i) {
        if (!(heights[i] < heights[i - 1])) h_dec = false;
        if (!(fwhms[i] > fwhms[i - 1])) w_inc = false;
        if (!(fxs[i] < fxs[i - 1])) fx_dec = false;
    }
    std::ostringstream detail;
    detail << "height ";
    for (double h : heights) detail << fmt(h) << " ";
    detail << "| fwhm ";
    for (double w : fwhms) detail << fmt(w) << " ";
    detail << "| F_X(W) ";
    for (double f : fxs) detail << fmt(f) << " ";
    detail << "| height strictly down: " << (h_dec ? "yes" : "no")
           << ", fwhm strictly up: " << (w_inc ? "yes" : "no")
           << ", F_X strictly down: " << (fx_dec ? "yes" : "no");
    report(7, "squeezing-degree trends of the low-frequency peak", h_dec && w_inc && fx_dec,
           detail.str());
}

void criterion_8_theta_domain() {
    bool ok = true;
    std::ostringstream detail;

    auto fx_at_peak = [](double r, double theta) {
        const ValidatedModel vm = validate(paper_point(100.0, 10.0, r, theta));
        const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
        return quadrature_at(vm, st, vm.rabi);
    };

    {
        double mx = -1e300;
        const double at_zero = fx_at_peak(1.0, 0.0);
        bool any_nonneg = false;
        for (int k = 0; k < 64; ++k) {
            const double v = fx_at_peak(1.0, 2.0 * std::numbers::pi * k / 64.0);
            mx = std::max(mx, v);
            if (v >= 0.0) any_nonneg = true;
        }
        if (!(at_zero < 0.0) || !any_nonneg) ok = false;
        detail << "r=1.0: F_X(theta=0)=" << fmt(at_zero) << ", max over theta=" << fmt(mx) << "  ";
    }
    {
        double mx = -1e300;
        bool all_neg = true;
        for (int k = 0; k < 64; ++k) {
            const double v = fx_at_peak(0.2, 2.0 * std::numbers::pi * k / 64.0);
            mx = std::max(mx, v);
            if (!(v < 0.0)) all_neg = false;
        }
        if (!all_neg) ok = false;
        detail << "r=0.2: max over theta=" << fmt(mx);
    }
    report(8, "squeezing-phase domain of vanishing squeezing", ok, detail.str());
}

void criterion_9_oracle_equivalence() {
    Timer timer;
    const RunConfig cfg = load_preset("desk_validate");
    const ValidatedModel vm = validate(cfg.model);
    const std::vector<double> grid = linspace(0.0, 40.0, 200);

    const HarmonicState st = solve_steady(vm, auto_truncation(vm, 1e-10));
    const SpectrumTable res = spectrum(vm, st, grid);
    OracleOptions opts;
    opts.n_phase = cfg.oracle.n_phase;
    opts.steps_per_period = cfg.oracle.steps_per_period;
    const SpectrumTable orc = spectrum_numeric(vm, grid, cfg.oracle.tau_max, opts);

    double peak = 0.0;
    for (double v : orc.finc) peak = std::max(peak, std::abs(v));
    double dx = 0.0, dy = 0.0, das = 0.0, dinc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dx = std::max(dx, std::abs(res.fx[i] - orc.fx[i]));
        dy = std::max(dy, std::abs(res.fy[i] - orc.fy[i]));
        das = std::max(das, std::abs(res.fas[i] - orc.fas[i]));
        dinc = std::max(dinc, std::abs(res.finc[i] - orc.finc[i]));
    }
    const double t = timer.s();
    const bool ok =
        dx <= 0.02 * peak && dy <= 0.02 * peak && das <= 0.02 * peak && dinc <= 0.02 * peak &&
        t < 300.0;
    std::ostringstream detail;
    detail << "max dev / peak: F_X " << fmt(dx / peak) << ", F_Y " << fmt(dy / peak) << ", F_as "
           << fmt(das / peak) << ", F_inc " << fmt(dinc / peak) << ", t=" << fmt(t) << "s";
    report(9, "resolvent path matches the direct time-domain oracle", ok, detail.str());
}

void criterion_10_truncation_stability() {
    const RunConfig cfg = load_preset("fig1");
    const ValidatedModel vm = validate(cfg.model);
    const int L = auto_truncation(vm, 1e-10);
    const std::vector<double> grid = make_grid(vm, 0.0, 200.0, 400, true);
    const SpectrumTable a = spectrum(vm, solve_steady(vm, L), grid);
    const SpectrumTable b = spectrum(vm, solve_steady(vm, L + 1), grid);
    double peak = 0.0;
    for (double v : a.finc) peak = std::max(peak, std::abs(v));
    double dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dev = std::max(dev, std::abs(a.finc[i] - b.finc[i]));
    }
    const bool ok = dev <= 1e-8 * peak;
    report(10, "spectrum stable under one extra harmonic", ok,
           "L=" + std::to_string(L) + ", max dev / peak = " + fmt(dev / peak));
}

void criterion_11_determinism() {
    std::mt19937_64 rng(std::random_device{}());
    const fs::path dir =
        fs::temp_directory_path() / ("polaremit_acc_" + std::to_string(rng()));
    fs::create_directories(dir);

    auto run_cli = [&](const std::string& args) {
        const std::string cmd = std::string(POLAREMIT_BIN) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };

    const fs::path d1 = dir / "t1";
    const fs::path d8 = dir / "t8";
    bool ok = run_cli("spectrum --preset fig1 --threads 1 --out " + d1.string()) &&
              run_cli("spectrum --preset fig1 --threads 8 --out " + d8.string());
    std::string detail = "cli runs " + std::string(ok ? "ok" : "failed");
    if (ok) {
        const std::string a = slurp(d1 / "fig1_spectrum.csv");
        const std::string b = slurp(d8 / "fig1_spectrum.csv");
        ok = !a.empty() && a == b;
        detail = "csv bytes " + std::to_string(a.size()) + (ok ? ", identical" : ", DIFFER");
    }
    fs::remove_all(dir);
    report(11, "byte-identical output across thread counts", ok, detail);
}

}  // namespace

int main() {
    std::cout << "acceptance suite\n================\n";
    criterion_1_analytic_fixed_point();
    criterion_2_resonance_closed_form();
    criterion_3_hermiticity();
    criterion_4_sum_rule();
    criterion_5_mollow();
    criterion_6_fig1();
    criterion_7_r_trends();
    criterion_8_theta_domain();
    criterion_9_oracle_equivalence();
    criterion_10_truncation_stability();
    criterion_11_determinism();

    std::cout << "================\n";
    if (failures == 0) {
        std::cout << "all acceptance criteria passed\n";
        return 0;
    }
    std::cout << failures << " criterion(s) failed\n";
    return 1;
}
