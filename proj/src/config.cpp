#include "polaremit/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polaremit/errors.hpp"

namespace polaremit {

using json = nlohmann::json;

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::spectrum: return "spectrum";
        case RunMode::sweep: return "sweep";
        case RunMode::validate: return "validate";
        case RunMode::steady: return "steady";
    }
    return "spectrum";
}

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& known) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            throw UnknownKey("unknown key \"" + (path.empty() ? key : path + "." + key) + "\"");
        }
    }
}

std::string key_path(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
}

double need_number(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) {
        throw InvalidValue("missing required key \"" + key_path(path, key) + "\"");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw InvalidValue("key \"" + key_path(path, key) + "\" must be a number");
    }
    return v.get<double>();
}

double opt_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw InvalidValue("key \"" + key_path(path, key) + "\" must be a number");
    }
    return v.get<double>();
}

int opt_int(const json& obj, const std::string& path, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw InvalidValue("key \"" + key_path(path, key) + "\" must be an integer");
    }
    return v.get<int>();
}

bool opt_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
        throw InvalidValue("key \"" + key_path(path, key) + "\" must be a boolean");
    }
    return v.get<bool>();
}

std::string opt_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw InvalidValue("key \"" + key_path(path, key) + "\" must be a string");
    }
    return v.get<std::string>();
}

RunMode parse_mode(const std::string& s) {
    if (s == "spectrum") return RunMode::spectrum;
    if (s == "sweep") return RunMode::sweep;
    if (s == "validate") return RunMode::validate;
    if (s == "steady") return RunMode::steady;
    throw InvalidValue("mode must be one of spectrum, sweep, validate, steady; got \"" + s + "\"");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                          /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw InvalidValue("configuration root must be an object");

    reject_unknown(doc, "", {"model", "mode", "grid", "sweep", "truncation", "oracle", "validate",
                             "output", "threads"});

    RunConfig cfg;

    if (!doc.contains("model") || !doc.at("model").is_object()) {
        throw InvalidValue("missing required \"model\" block");
    }
    {
        const json& mj = doc.at("model");
        reject_unknown(mj, "model",
                       {"gamma", "omega0", "omegaF", "omegaS", "rabi", "deltaA", "r", "theta"});
        cfg.model.gamma = need_number(mj, "model", "gamma");
        cfg.model.omega0 = need_number(mj, "model", "omega0");
        cfg.model.omega_f = need_number(mj, "model", "omegaF");
        cfg.model.omega_s = need_number(mj, "model", "omegaS");
        cfg.model.rabi = opt_number(mj, "model", "rabi", 0.0);
        cfg.model.delta_a = opt_number(mj, "model", "deltaA", 0.0);
        cfg.model.r = opt_number(mj, "model", "r", 0.0);
        cfg.model.theta = opt_number(mj, "model", "theta", 0.0);
    }

    if (doc.contains("mode")) {
        if (!doc.at("mode").is_string()) throw InvalidValue("key \"mode\" must be a string");
        cfg.mode = parse_mode(doc.at("mode").get<std::string>());
    }

    if (doc.contains("grid")) {
        const json& gj = doc.at("grid");
        if (!gj.is_object()) throw InvalidValue("\"grid\" must be an object");
        reject_unknown(gj, "grid", {"omegaMin", "omegaMax", "points", "refine", "fullWindow"});
        if (gj.contains("omegaMin")) cfg.grid.omega_min = need_number(gj, "grid", "omegaMin");
        if (gj.contains("omegaMax")) cfg.grid.omega_max = need_number(gj, "grid", "omegaMax");
        cfg.grid.points = opt_int(gj, "grid", "points", cfg.grid.points);
        cfg.grid.refine = opt_bool(gj, "grid", "refine", cfg.grid.refine);
        cfg.grid.full_window = opt_bool(gj, "grid", "fullWindow", cfg.grid.full_window);
        if (cfg.grid.omega_min.has_value() != cfg.grid.omega_max.has_value()) {
            throw InvalidValue("grid.omegaMin and grid.omegaMax must be given together");
        }
        if (cfg.grid.omega_min && !(*cfg.grid.omega_min < *cfg.grid.omega_max)) {
            throw InvalidValue("grid window must satisfy omegaMin < omegaMax");
        }
        if (cfg.grid.points < 16) throw InvalidValue("grid.points must be >= 16");
    }

    if (doc.contains("sweep")) {
        const json& sj = doc.at("sweep");
        if (!sj.is_object()) throw InvalidValue("\"sweep\" must be an object");
        reject_unknown(sj, "sweep", {"parameter", "values"});
        cfg.sweep.parameter = opt_string(sj, "sweep", "parameter", "");
        if (cfg.sweep.parameter != "r" && cfg.sweep.parameter != "theta") {
            throw InvalidValue("sweep.parameter must be \"r\" or \"theta\"");
        }
        if (!sj.contains("values") || !sj.at("values").is_array()) {
            throw InvalidValue("sweep.values must be an array of numbers");
        }
        for (const json& v : sj.at("values")) {
            if (!v.is_number()) throw InvalidValue("sweep.values must contain only numbers");
            cfg.sweep.values.push_back(v.get<double>());
        }
    }

    if (doc.contains("truncation")) {
        const json& tj = doc.at("truncation");
        if (!tj.is_object()) throw InvalidValue("\"truncation\" must be an object");
        reject_unknown(tj, "truncation", {"mode", "tol", "cap", "L"});
        const std::string mode = opt_string(tj, "truncation", "mode", "auto");
        if (mode == "auto") {
            cfg.truncation.automatic = true;
        } else if (mode == "fixed") {
            cfg.truncation.automatic = false;
        } else {
            throw InvalidValue("truncation.mode must be \"auto\" or \"fixed\"");
        }
        cfg.truncation.tol = opt_number(tj, "truncation", "tol", cfg.truncation.tol);
        cfg.truncation.cap = opt_int(tj, "truncation", "cap", cfg.truncation.cap);
        cfg.truncation.fixed_l = opt_int(tj, "truncation", "L", cfg.truncation.fixed_l);
        if (!(cfg.truncation.tol > 0.0)) throw InvalidValue("truncation.tol must be > 0");
        if (cfg.truncation.cap < 0) throw InvalidValue("truncation.cap must be >= 0");
        if (cfg.truncation.fixed_l < 0) throw InvalidValue("truncation.L must be >= 0");
        if (!cfg.truncation.automatic && !tj.contains("L")) {
            throw InvalidValue("truncation.mode \"fixed\" requires truncation.L");
        }
    }

    if (doc.contains("oracle")) {
        const json& oj = doc.at("oracle");
        if (!oj.is_object()) throw InvalidValue("\"oracle\" must be an object");
        reject_unknown(oj, "oracle", {"tauMax", "nPhase", "stepsPerPeriod"});
        cfg.oracle.tau_max = opt_number(oj, "oracle", "tauMax", cfg.oracle.tau_max);
        cfg.oracle.n_phase = opt_int(oj, "oracle", "nPhase", cfg.oracle.n_phase);
        cfg.oracle.steps_per_period =
            opt_int(oj, "oracle", "stepsPerPeriod", cfg.oracle.steps_per_period);
        if (!(cfg.oracle.tau_max > 0.0)) throw InvalidValue("oracle.tauMax must be > 0");
        if (cfg.oracle.n_phase < 8) throw InvalidValue("oracle.nPhase must be >= 8");
        if (cfg.oracle.steps_per_period < 20) {
            throw InvalidValue("oracle.stepsPerPeriod must be >= 20");
        }
    }

    if (doc.contains("validate")) {
        const json& vj = doc.at("validate");
        if (!vj.is_object()) throw InvalidValue("\"validate\" must be an object");
        reject_unknown(vj, "validate", {"tolerance"});
        cfg.validate_tolerance = opt_number(vj, "validate", "tolerance", cfg.validate_tolerance);
        if (!(cfg.validate_tolerance > 0.0)) throw InvalidValue("validate.tolerance must be > 0");
    }

    if (doc.contains("output")) {
        const json& oj = doc.at("output");
        if (!oj.is_object()) throw InvalidValue("\"output\" must be an object");
        reject_unknown(oj, "output", {"directory", "stem"});
        cfg.output.directory = opt_string(oj, "output", "directory", cfg.output.directory);
        cfg.output.stem = opt_string(oj, "output", "stem", cfg.output.stem);
        if (cfg.output.stem.empty() || cfg.output.stem.find('/') != std::string::npos) {
            throw InvalidValue("output.stem must be a nonempty name without path separators");
        }
    }

    cfg.threads = opt_int(doc, "", "threads", cfg.threads);
    if (cfg.threads < 1) throw InvalidValue("threads must be >= 1");

    if (cfg.mode == RunMode::sweep && cfg.sweep.values.empty()) {
        throw InvalidValue("sweep mode requires a nonempty sweep.values list");
    }
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    json doc;
    doc["model"] = {{"gamma", cfg.model.gamma},   {"omega0", cfg.model.omega0},
                    {"omegaF", cfg.model.omega_f}, {"omegaS", cfg.model.omega_s},
                    {"rabi", cfg.model.rabi},      {"deltaA", cfg.model.delta_a},
                    {"r", cfg.model.r},            {"theta", cfg.model.theta}};
    doc["mode"] = to_string(cfg.mode);
    json gj;
    if (cfg.grid.omega_min) gj["omegaMin"] = *cfg.grid.omega_min;
    if (cfg.grid.omega_max) gj["omegaMax"] = *cfg.grid.omega_max;
    gj["points"] = cfg.grid.points;
    gj["refine"] = cfg.grid.refine;
    gj["fullWindow"] = cfg.grid.full_window;
    doc["grid"] = gj;
    if (!cfg.sweep.values.empty()) {
        doc["sweep"] = {{"parameter", cfg.sweep.parameter}, {"values", cfg.sweep.values}};
    }
    json tj;
    tj["mode"] = cfg.truncation.automatic ? "auto" : "fixed";
    tj["tol"] = cfg.truncation.tol;
    tj["cap"] = cfg.truncation.cap;
    if (!cfg.truncation.automatic) tj["L"] = cfg.truncation.fixed_l;
    doc["truncation"] = tj;
    doc["oracle"] = {{"tauMax", cfg.oracle.tau_max},
                     {"nPhase", cfg.oracle.n_phase},
                     {"stepsPerPeriod", cfg.oracle.steps_per_period}};
    doc["validate"] = {{"tolerance", cfg.validate_tolerance}};
    doc["output"] = {{"directory", cfg.output.directory}, {"stem", cfg.output.stem}};
    doc["threads"] = cfg.threads;
    return doc.dump(2) + "\n";
}

namespace {

ModelParams figure_model(double r, double theta) {
    ModelParams p;
    p.gamma = 1.0;
    p.omega0 = 5000.0;
    p.omega_f = 5000.0;
    p.omega_s = 5000.0;
    p.rabi = 100.0;
    p.delta_a = 10.0;
    p.r = r;
    p.theta = theta;
    return p;
}

RunConfig figure_spectrum(const std::string& stem, double r) {
    RunConfig cfg;
    cfg.model = figure_model(r, 0.0);
    cfg.mode = RunMode::spectrum;
    cfg.grid.omega_min = 0.0;
    cfg.grid.omega_max = 200.0;
    cfg.grid.points = 400;
    cfg.grid.refine = true;
    cfg.output.stem = stem;
    return cfg;
}

RunConfig theta_sweep(const std::string& stem, double r) {
    RunConfig cfg = figure_spectrum(stem, r);
    cfg.mode = RunMode::sweep;
    cfg.sweep.parameter = "theta";
    for (int k = 0; k < 64; ++k) {
        cfg.sweep.values.push_back(2.0 * std::numbers::pi * k / 64.0);
    }
    return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig1", "fig2", "fig3", "fig4r02", "fig4r05", "fig4r08", "fig4r10", "desk_validate"};
}

bool is_preset(const std::string& name) {
    for (const auto& n : preset_names()) {
        if (n == name) return true;
    }
    return false;
}

RunConfig load_preset(const std::string& name) {
    if (name == "fig1") return figure_spectrum("fig1", 0.0);
    if (name == "fig2") return figure_spectrum("fig2", 1.0);
    if (name == "fig3") {
        RunConfig cfg = figure_spectrum("fig3", 0.0);
        cfg.mode = RunMode::sweep;
        cfg.sweep.parameter = "r";
        cfg.sweep.values = {0.0, 0.2, 0.5, 0.8, 1.0};
        return cfg;
    }
    if (name == "fig4r02") return theta_sweep("fig4r02", 0.2);
    if (name == "fig4r05") return theta_sweep("fig4r05", 0.5);
    if (name == "fig4r08") return theta_sweep("fig4r08", 0.8);
    if (name == "fig4r10") return theta_sweep("fig4r10", 1.0);
    if (name == "desk_validate") {
        RunConfig cfg;
        cfg.model.gamma = 1.0;
        cfg.model.omega0 = 200.0;
        cfg.model.omega_f = 200.0;
        cfg.model.omega_s = 200.0;
        cfg.model.rabi = 20.0;
        cfg.model.delta_a = 4.0;
        cfg.model.r = 0.5;
        cfg.model.theta = std::numbers::pi / 3.0;
        cfg.mode = RunMode::validate;
        cfg.grid.omega_min = 0.0;
        cfg.grid.omega_max = 40.0;
        cfg.grid.points = 200;
        cfg.grid.refine = false;
        cfg.oracle.tau_max = 40.0;
        cfg.oracle.n_phase = 16;
        cfg.oracle.steps_per_period = 32;
        cfg.validate_tolerance = 0.02;
        cfg.output.stem = "desk_validate";
        return cfg;
    }
    throw InvalidValue("unknown preset \"" + name + "\"");
}

}  // namespace polaremit
