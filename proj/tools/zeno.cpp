// Command-line front end: zeno <ground|evolve|sweep|zeno-scan> [--config FILE] [flags]

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zeno/app.hpp"
#include "zeno/errors.hpp"
#include "zeno/version.hpp"

namespace {

struct Flag {
    const char* name;  // config key
    const char* help;
};

constexpr Flag kFlags[] = {
    {"gamma", "dissipation intensity; list 'a,b,c' or range 'start:step:stop'"},
    {"width", "beam width w (list for zeno-scan)"},
    {"xd", "beam impinging point x_d (list for zeno-scan)"},
    {"g", "interaction strength"},
    {"vh", "trap curvature v_h"},
    {"L", "box half-width"},
    {"n", "number of grid points"},
    {"dt", "time step"},
    {"t-final", "evolution horizon"},
    {"tol", "ground-state residual tolerance"},
    {"max-iter", "ground-state iteration cap"},
    {"out", "output directory (default $ZENO_OUTPUT_DIR or .)"},
    {"stride", "record every N-th step"},
    {"record-density", "write density.csv (true/false)"},
    {"threads", "worker threads for sweeps (0 = all cores)"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Dissipative Gross-Pitaevskii simulator for the spatial quantum Zeno effect"};
    cli.set_version_flag("--version", zeno::kVersion);
    cli.require_subcommand(1);
    cli.fallthrough();

    std::string config_file;
    cli.add_option("--config", config_file, "key=value config file (flags override it)");

    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    for (const auto& f : kFlags) {
        options[f.name] = cli.add_option(std::string("--") + f.name, values[f.name], f.help);
    }

    const char* commands[][2] = {
        {"ground", "solve for the stationary condensate"},
        {"evolve", "integrate one dissipative evolution"},
        {"sweep", "final loss versus gamma for one beam"},
        {"zeno-scan", "loss curves over widths and impinging points plus collapse report"},
    };
    for (const auto& c : commands) cli.add_subcommand(c[0], c[1]);

    CLI11_PARSE(cli, argc, argv);

    zeno::app::RunConfig cfg;
    if (const char* env = std::getenv(zeno::app::kOutputDirEnv); env && *env) cfg.out_dir = env;
    try {
        if (!config_file.empty()) zeno::app::load_config(cfg, config_file);
        for (const auto& [name, opt] : options) {
            if (opt->count() > 0) zeno::app::apply_setting(cfg, name, values[name]);
        }
    } catch (const zeno::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return zeno::app::kConfigError;
    }

    const std::string command = cli.get_subcommands().front()->get_name();
    return zeno::app::run_command(command, cfg, std::cerr);
}
