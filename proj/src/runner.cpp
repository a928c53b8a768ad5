#include "polaremit/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polaremit/errors.hpp"
#include "polaremit/spectrum.hpp"
#include "polaremit/time_oracle.hpp"
#include "polaremit/version.hpp"

namespace polaremit {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct Prepared {
    ValidatedModel vm;
    int truncation = 0;
    HarmonicState state{0};
    double window_lo = 0.0;
    double window_hi = 0.0;
};

// steady mode never touches the window, so an empty one is only rejected by
// the grid-consuming runners
void require_window(const Prepared& p) {
    if (!(p.window_lo < p.window_hi)) {
        throw InvalidValue("spectrum window is empty; set grid.omegaMin/omegaMax explicitly");
    }
}

Prepared prepare(const RunConfig& cfg, const ModelParams& params) {
    Prepared p{validate(params)};
    if (p.vm.rwa_warning) {
        std::cerr << "warning: omega_f < 10 gamma, rotating-frame description is marginal\n";
    }
    p.truncation = cfg.truncation.automatic
                       ? auto_truncation(p.vm, cfg.truncation.tol, cfg.truncation.cap)
                       : cfg.truncation.fixed_l;
    p.state = solve_steady(p.vm, p.truncation);

    if (cfg.grid.full_window) {
        p.window_lo = p.vm.omega_f - 2.0 * p.vm.rabi;
        p.window_hi = p.vm.omega_f + 2.0 * p.vm.rabi;
    } else if (cfg.grid.omega_min) {
        p.window_lo = *cfg.grid.omega_min;
        p.window_hi = *cfg.grid.omega_max;
    } else {
        p.window_lo = 0.0;
        p.window_hi = 2.0 * p.vm.rabi;
    }
    return p;
}

fs::path output_path(const RunConfig& cfg, const std::string& suffix) {
    fs::path dir(cfg.output.directory);
    if (!dir.empty()) fs::create_directories(dir);
    return dir / (cfg.output.stem + suffix);
}

json model_json(const ModelParams& m) {
    return json{{"gamma", m.gamma},   {"omega0", m.omega0}, {"omegaF", m.omega_f},
                {"omegaS", m.omega_s}, {"rabi", m.rabi},     {"deltaA", m.delta_a},
                {"r", m.r},            {"theta", m.theta}};
}

json derived_json(const ValidatedModel& vm) {
    return json{{"delta", vm.delta},
                {"n", vm.moments.n},
                {"m_re", vm.moments.m.real()},
                {"m_im", vm.moments.m.imag()}};
}

std::optional<PeakMetrics> finc_peak(const SpectrumTable& table, const ValidatedModel& vm,
                                     double lo, double hi) {
    const double w_lo = std::max(lo, 0.5 * vm.rabi);
    const double w_hi = std::min(hi, 1.5 * vm.rabi);
    if (!(w_lo < w_hi)) return std::nullopt;
    try {
        return peak_metrics(table, SpectrumColumn::finc, w_lo, w_hi);
    } catch (const SimulationError&) {
        return std::nullopt;
    }
}

json peak_json(const std::optional<PeakMetrics>& pm) {
    if (!pm) return nullptr;
    return json{{"center", pm->center}, {"height", pm->height}, {"fwhm", pm->fwhm}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw SimulationError("short write to " + path.string());
}

void write_meta(const RunConfig& cfg, const Prepared& p, const json& extra, double wall_s,
                RunResult& result) {
    json meta;
    meta["version"] = kVersion;
    meta["mode"] = to_string(cfg.mode);
    meta["model"] = model_json(cfg.model);
    meta["gamma_input"] = cfg.model.gamma;
    meta["derived"] = derived_json(p.vm);
    meta["truncation_L"] = p.truncation;
    meta["grid"] = json{{"omega_min", p.window_lo},
                        {"omega_max", p.window_hi},
                        {"base_points", cfg.grid.points},
                        {"refine", cfg.grid.refine}};
    meta["threads"] = cfg.threads;
    meta["wall_time_s"] = wall_s;
    for (const auto& [k, v] : extra.items()) meta[k] = v;

    const fs::path path = output_path(cfg, "_meta.json");
    write_text(path, meta.dump(2) + "\n");
    result.files_written.push_back(path.string());
}

std::string spectrum_csv(const SpectrumTable& t) {
    std::ostringstream os;
    os << "omega,F_X,F_Y,F_as,F_inc\n";
    for (std::size_t i = 0; i < t.omega.size(); ++i) {
        os << format_double(t.omega[i]) << ',' << format_double(t.fx[i]) << ','
           << format_double(t.fy[i]) << ',' << format_double(t.fas[i]) << ','
           << format_double(t.finc[i]) << '\n';
    }
    return os.str();
}

}  // namespace

RunResult run_spectrum(const RunConfig& cfg) {
    Timer timer;
    RunResult result;
    const Prepared p = prepare(cfg, cfg.model);
    require_window(p);

    const std::vector<double> grid =
        make_grid(p.vm, p.window_lo, p.window_hi, cfg.grid.points, cfg.grid.refine);
    SpectrumOptions opts;
    opts.threads = cfg.threads;
    const SpectrumTable table = spectrum(p.vm, p.state, grid, opts);

    const fs::path csv = output_path(cfg, "_spectrum.csv");
    write_text(csv, spectrum_csv(table));
    result.files_written.push_back(csv.string());

    const auto pm = finc_peak(table, p.vm, p.window_lo, p.window_hi);
    json extra;
    extra["grid_points_total"] = table.omega.size();
    extra["peak_finc"] = peak_json(pm);
    extra["hermiticity_monitor"] = table.hermiticity_monitor;
    write_meta(cfg, p, extra, timer.seconds(), result);
    return result;
}

RunResult run_steady(const RunConfig& cfg) {
    Timer timer;
    RunResult result;
    const Prepared p = prepare(cfg, cfg.model);

    std::ostringstream os;
    os << "l,component,re,im\n";
    for (int l = -p.truncation; l <= p.truncation; ++l) {
        for (int i = 1; i <= 3; ++i) {
            const complexd a = p.state.amp(i, l);
            os << l << ',' << i << ',' << format_double(a.real()) << ','
               << format_double(a.imag()) << '\n';
        }
    }
    const fs::path csv = output_path(cfg, "_harmonics.csv");
    write_text(csv, os.str());
    result.files_written.push_back(csv.string());

    json extra;
    extra["hermiticity_residual"] = p.state.hermiticity_residual();
    write_meta(cfg, p, extra, timer.seconds(), result);
    return result;
}

RunResult run_sweep(const RunConfig& cfg) {
    Timer timer;
    RunResult result;
    if (cfg.sweep.values.empty()) throw InvalidValue("sweep mode requires sweep.values");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream os;
    os << "param,value,FX_at_peak,peak_center,peak_height,peak_fwhm\n";

    bool any_failed = false;
    std::optional<Prepared> last;
    for (double value : cfg.sweep.values) {
        ModelParams params = cfg.model;
        if (cfg.sweep.parameter == "r") {
            params.r = value;
        } else {
            params.theta = value;
        }

        double fxp = nan, center = nan, height = nan, fwhm = nan;
        try {
            const Prepared p = prepare(cfg, params);
            require_window(p);
            const std::vector<double> grid =
                make_grid(p.vm, p.window_lo, p.window_hi, cfg.grid.points, cfg.grid.refine);
            SpectrumOptions opts;
            opts.threads = cfg.threads;
            const SpectrumTable table = spectrum(p.vm, p.state, grid, opts);
            fxp = quadrature_at(p.vm, p.state, p.vm.rabi);
            if (const auto pm = finc_peak(table, p.vm, p.window_lo, p.window_hi)) {
                center = pm->center;
                height = pm->height;
                fwhm = pm->fwhm;
            }
            last = p;
        } catch (const SimulationError& e) {
            // record-and-continue: one bad point must not lose the sweep
            std::cerr << "sweep point " << cfg.sweep.parameter << "=" << value
                      << " failed: " << e.what() << '\n';
            any_failed = true;
        }
        os << cfg.sweep.parameter << ',' << format_double(value) << ',' << format_double(fxp)
           << ',' << format_double(center) << ',' << format_double(height) << ','
           << format_double(fwhm) << '\n';
    }

    const fs::path csv = output_path(cfg, "_sweep.csv");
    write_text(csv, os.str());
    result.files_written.push_back(csv.string());

    if (last) {
        json extra;
        extra["sweep_parameter"] = cfg.sweep.parameter;
        extra["sweep_points"] = cfg.sweep.values.size();
        write_meta(cfg, *last, extra, timer.seconds(), result);
    }
    result.exit_code = any_failed ? 1 : 0;
    return result;
}

RunResult run_validate(const RunConfig& cfg) {
    Timer timer;
    RunResult result;
    const Prepared p = prepare(cfg, cfg.model);
    require_window(p);

    json report;
    report["version"] = kVersion;
    report["model"] = model_json(cfg.model);
    report["truncation_L"] = p.truncation;
    report["tolerance"] = cfg.validate_tolerance;
    const double sum_rule_tol = 0.01;
    report["sum_rule_tolerance"] = sum_rule_tol;

    bool pass = true;
    try {
        const std::vector<double> grid =
            make_grid(p.vm, p.window_lo, p.window_hi, cfg.grid.points, cfg.grid.refine);
        SpectrumOptions sopts;
        sopts.threads = cfg.threads;
        const SpectrumTable res = spectrum(p.vm, p.state, grid, sopts);

        OracleOptions oopts;
        oopts.n_phase = cfg.oracle.n_phase;
        oopts.steps_per_period = cfg.oracle.steps_per_period;
        oopts.threads = cfg.threads;
        // the tail guard, not a precondition, polices a short tau_max here, so
        // a misconfigured window surfaces as a validation failure
        const CorrelationGrid corr = correlate(p.vm, cfg.oracle.tau_max, cfg.oracle.n_phase, oopts);
        require_decayed_tail(corr);
        const SpectrumTable orc = spectrum_from_correlations(corr, p.vm, grid, cfg.threads);

        double peak = 0.0;
        for (double v : orc.finc) peak = std::max(peak, std::abs(v));
        if (!(peak > 0.0)) peak = 1.0;  // all-zero spectrum: deviations are absolute

        json dev;
        auto deviation = [&](const char* name, const std::vector<double>& a,
                             const std::vector<double>& b) {
            double mx = 0.0, mean = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = std::abs(a[i] - b[i]);
                mx = std::max(mx, d);
                mean += d;
            }
            mean /= a.empty() ? 1.0 : static_cast<double>(a.size());
            dev[name] = json{{"max_over_peak", mx / peak}, {"mean_over_peak", mean / peak}};
            if (mx / peak > cfg.validate_tolerance) pass = false;
        };
        deviation("F_X", res.fx, orc.fx);
        deviation("F_Y", res.fy, orc.fy);
        deviation("F_as", res.fas, orc.fas);
        deviation("F_inc", res.finc, orc.finc);
        report["oracle_peak_height"] = peak;
        report["deviation"] = dev;

        // sum rule over the full line for both paths
        const CorrelationRHS rhs = correlation_rhs(p.state);
        const double expected_res = rhs.b(1, 0).real();
        const double integral_res = integrate_spectrum(p.vm, p.state);

        auto finc_orc = [&](double w) { return oracle_spectral_point(corr, p.vm, w).finc; };
        const double span = p.vm.omega_f + 10.0 * std::max(p.vm.rabi, 1.0);
        std::vector<double> marks{0.0,
                                  p.vm.rabi,
                                  -p.vm.rabi,
                                  p.vm.omega_f,
                                  -p.vm.omega_f,
                                  p.vm.omega_f - p.vm.rabi,
                                  p.vm.omega_f + p.vm.rabi,
                                  -p.vm.omega_f + p.vm.rabi,
                                  -p.vm.omega_f - p.vm.rabi};
        const double body = adaptive_integral(finc_orc, -span, span, marks, 1e-3);
        const double tail = finc_orc(-span) * std::abs(-span - p.vm.omega_f) +
                            finc_orc(span) * std::abs(span - p.vm.omega_f);
        const double integral_orc = body + tail;
        const double expected_orc = corr.y1[0].real();

        auto sum_rule = [&](const char* name, double integral, double expected) {
            const double rel =
                std::abs(integral - expected) / std::max(std::abs(expected), 1e-300);
            report["sum_rule"][name] =
                json{{"integral", integral}, {"expected", expected}, {"rel_error", rel}};
            if (expected != 0.0 && rel > sum_rule_tol) pass = false;
        };
        sum_rule("resolvent", integral_res, expected_res);
        sum_rule("oracle", integral_orc, expected_orc);
    } catch (const SimulationError& e) {
        report["error"] = e.what();
        pass = false;
    }

    report["pass"] = pass;
    report["wall_time_s"] = timer.seconds();

    const fs::path path = output_path(cfg, "_validate.json");
    write_text(path, report.dump(2) + "\n");
    result.files_written.push_back(path.string());
    result.exit_code = pass ? 0 : 1;
    return result;
}

RunResult run(const RunConfig& cfg) {
    switch (cfg.mode) {
        case RunMode::spectrum: return run_spectrum(cfg);
        case RunMode::sweep: return run_sweep(cfg);
        case RunMode::validate: return run_validate(cfg);
        case RunMode::steady: return run_steady(cfg);
    }
    throw InvalidValue("unknown run mode");
}

}  // namespace polaremit
