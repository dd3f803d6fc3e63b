#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "zeno/sweep.hpp"

namespace zeno::app {

/// Exit codes of the `zeno` command.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNonConvergence = 3,
    kBlowUp = 4,
    kBoundaryContamination = 5,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "ZENO_OUTPUT_DIR";

/// Every knob of a batch run. Lists hold one value for `ground`/`evolve`.
struct RunConfig {
    double g = 0.1;
    double v_h = 0.0005;
    /// Empty means "per-width default grid" for sweeps.
    std::vector<double> gammas;
    std::vector<double> widths{0.1};
    std::vector<double> centers{0.0};

    double half_width = 204.8;
    std::size_t n_points = 65536;
    double dt = 1e-3;
    double t_final = 1.75;
    double tol = 1e-8;
    int max_iter = 100000;

    std::filesystem::path out_dir = ".";
    std::size_t snapshot_stride = 10;
    bool record_density = false;
    unsigned threads = 0;

    /// Throws ParameterError on any out-of-range value.
    void validate() const;
    SimulationSetup setup(double width, double center) const;
};

/// Applies one `key=value` assignment. Keys are the long flag names without
/// dashes (g, vh, gamma, width, xd, L, n, dt, t_final, tol, max_iter, out,
/// snapshot_stride, record_density, threads). Lists are comma separated or a
/// `start:step:stop` range. Throws ParameterError on unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads a flat key=value file ('#' starts a comment). Manifest-only keys
/// (version, command, status, error) are accepted and ignored.
void load_config(RunConfig& cfg, std::istream& in);
void load_config(RunConfig& cfg, const std::filesystem::path& file);

/// Parses "a,b,c" or "start:step:stop".
std::vector<double> parse_list(const std::string& text);

/// Fixed-width CSV number: 12 significant digits.
std::string format_number(double value);

/// key=value dump of `cfg` that load_config reads back exactly.
void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::filesystem::path& file, const std::string& status = "ok",
                    const std::string& error = {});

std::string loss_curve_filename(double width, double center);

/// Subcommands. Each writes its files under cfg.out_dir and returns an exit code;
/// diagnostics go to `log`.
int run_ground(const RunConfig& cfg, std::ostream& log);
int run_evolve(const RunConfig& cfg, std::ostream& log);
int run_sweep(const RunConfig& cfg, std::ostream& log);
int run_zeno_scan(const RunConfig& cfg, std::ostream& log);

/// Dispatches by subcommand name ("ground", "evolve", "sweep", "zeno-scan").
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

/// Rate |dP_rem/dt| at t_final above which `evolve` warns that losses have not saturated.
inline constexpr double kSaturationRate = 1e-4;

}  // namespace zeno::app
