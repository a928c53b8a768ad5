// polaremit: steady-state Floquet harmonics and low-frequency fluorescence /
// squeezing spectra of a driven two-level emitter with broken inversion
// symmetry in a broadband squeezed vacuum, plus a brute-force time-domain
// cross-check.
#include <clocale>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "polaremit/config.hpp"
#include "polaremit/errors.hpp"
#include "polaremit/runner.hpp"
#include "polaremit/version.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw polaremit::InvalidValue("cannot open config file \"" + path + "\"");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string truncation;
    int threads = 0;
    bool full_window = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file (JSON, comments allowed)");
    cmd->add_option("--preset", opts.preset, "bundled preset name (see `polaremit presets`)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides output.directory)");
    cmd->add_option("--truncation", opts.truncation,
                    "harmonic truncation: \"auto\" or an explicit L");
    cmd->add_option("--threads", opts.threads, "worker threads for grid/sweep evaluation");
    cmd->add_flag("--full-window", opts.full_window,
                  "evaluate around the drive frequency (omega_f -+ 2 Omega_R) instead of the "
                  "low-frequency window");
}

polaremit::RunConfig build_config(const CommonOpts& opts, polaremit::RunMode mode) {
    using namespace polaremit;
    if (opts.config_path.empty() == opts.preset.empty()) {
        throw InvalidValue("exactly one of --config or --preset is required");
    }
    RunConfig cfg = opts.preset.empty() ? parse_config(read_file(opts.config_path))
                                        : load_preset(opts.preset);
    cfg.mode = mode;
    if (!opts.out_dir.empty()) cfg.output.directory = opts.out_dir;
    if (!opts.truncation.empty()) {
        if (opts.truncation == "auto") {
            cfg.truncation.automatic = true;
        } else {
            try {
                std::size_t used = 0;
                const int l = std::stoi(opts.truncation, &used);
                if (used != opts.truncation.size() || l < 0) throw std::invalid_argument("");
                cfg.truncation.automatic = false;
                cfg.truncation.fixed_l = l;
            } catch (const std::exception&) {
                throw InvalidValue("--truncation expects \"auto\" or a nonnegative integer");
            }
        }
    }
    if (opts.threads > 0) cfg.threads = opts.threads;
    if (opts.full_window) cfg.grid.full_window = true;
    if (cfg.mode == RunMode::sweep && cfg.sweep.values.empty()) {
        throw InvalidValue("sweep mode requires a sweep block in the configuration");
    }
    return cfg;
}

int dispatch(const CommonOpts& opts, polaremit::RunMode mode) {
    using namespace polaremit;
    RunConfig cfg;
    try {
        cfg = build_config(opts, mode);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const RunResult res = run(cfg);
        for (const auto& f : res.files_written) std::cout << "wrote " << f << '\n';
        return res.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"low-frequency fluorescence and squeezing spectra of a polar two-level emitter"};
    app.set_version_flag("--version", polaremit::kVersion);
    app.require_subcommand(1);

    CommonOpts spectrum_opts, sweep_opts, validate_opts, steady_opts;
    auto* spectrum_cmd =
        app.add_subcommand("spectrum", "steady state + spectrum table on a frequency grid");
    add_common(spectrum_cmd, spectrum_opts);
    auto* sweep_cmd = app.add_subcommand("sweep", "spectrum metrics across an r or theta sweep");
    add_common(sweep_cmd, sweep_opts);
    auto* validate_cmd =
        app.add_subcommand("validate", "cross-check the harmonic solver against direct integration");
    add_common(validate_cmd, validate_opts);
    auto* steady_cmd = app.add_subcommand("steady", "steady-state harmonic amplitudes only");
    add_common(steady_cmd, steady_opts);

    std::string dump_dir;
    auto* presets_cmd = app.add_subcommand("presets", "list bundled presets");
    presets_cmd->add_option("--dump", dump_dir, "write the preset files into a directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (presets_cmd->parsed()) {
        for (const auto& name : polaremit::preset_names()) {
            std::cout << name << '\n';
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                const auto path = std::filesystem::path(dump_dir) / (name + ".json");
                std::ofstream out(path, std::ios::binary);
                out << polaremit::config_to_json(polaremit::load_preset(name));
            }
        }
        return 0;
    }
    if (spectrum_cmd->parsed()) return dispatch(spectrum_opts, polaremit::RunMode::spectrum);
    if (sweep_cmd->parsed()) return dispatch(sweep_opts, polaremit::RunMode::sweep);
    if (validate_cmd->parsed()) return dispatch(validate_opts, polaremit::RunMode::validate);
    if (steady_cmd->parsed()) return dispatch(steady_opts, polaremit::RunMode::steady);
    return 2;
}
