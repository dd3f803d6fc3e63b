#include "zeno/app.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "zeno/errors.hpp"
#include "zeno/ground_state.hpp"
#include "zeno/version.hpp"

namespace zeno::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw ParameterError("invalid number for '" + key + "': '" + text + "'");
    }
    return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw ParameterError("invalid integer for '" + key + "': '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ParameterError("invalid boolean for '" + key + "': '" + text + "'");
}

/// Shortest text that parses back to the same double.
std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += exact(v[i]);
    }
    return out;
}

std::ofstream open_output(const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw Error("cannot open '" + file.string() + "' for writing");
    return os;
}

int exit_code_for(const std::exception_ptr& e, std::ostream& log) {
    try {
        std::rethrow_exception(e);
    } catch (const ConvergenceError& err) {
        log << "error: " << err.what() << " (last residual " << err.last_residual() << ")\n";
        return kNonConvergence;
    } catch (const BoundaryContaminationError& err) {
        log << "error: " << err.what() << '\n';
        return kBoundaryContamination;
    } catch (const BlowUpError& err) {
        log << "error: " << err.what() << '\n';
        return kBlowUp;
    } catch (const InvalidStateError& err) {
        log << "error: " << err.what() << '\n';
        return kBlowUp;
    } catch (const ParameterError& err) {
        log << "config error: " << err.what() << '\n';
        return kConfigError;
    } catch (const PreconditionError& err) {
        log << "config error: " << err.what() << '\n';
        return kConfigError;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << '\n';
        return 1;
    }
}

std::string error_message(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& err) {
        return err.what();
    }
}

/// Runs `body`, mapping exceptions to exit codes. After validation has
/// passed, failures are recorded in the manifest with status=failed.
template <typename Body>
int guarded(const RunConfig& cfg, const std::string& command, std::ostream& log, Body&& body) {
    try {
        cfg.validate();
    } catch (...) {
        return exit_code_for(std::current_exception(), log);
    }
    try {
        std::filesystem::create_directories(cfg.out_dir);
        body();
        write_manifest(cfg, command, cfg.out_dir / "manifest.txt");
        return kOk;
    } catch (...) {
        const auto err = std::current_exception();
        try {
            write_manifest(cfg, command, cfg.out_dir / "manifest.txt", "failed", error_message(err));
        } catch (...) {
        }
        return exit_code_for(err, log);
    }
}

void write_loss_curve(const LossCurve& curve, const std::filesystem::path& file) {
    auto os = open_output(file);
    os << "gamma,final_loss\n";
    for (std::size_t i = 0; i < curve.gamma.size(); ++i) {
        os << format_number(curve.gamma[i]) << ',' << format_number(curve.final_loss[i]) << '\n';
    }
}

void require_single(const std::vector<double>& v, const char* what) {
    if (v.size() != 1) throw ParameterError(std::string("this command takes exactly one ") + what);
}

void warn_if_unsaturated(double rate, std::ostream& log) {
    if (std::abs(rate) > kSaturationRate) {
        log << "warning: loss not saturated at t_final (|dP_rem/dt| = " << rate << " > "
            << kSaturationRate << ")\n";
    }
}

}  // namespace

void RunConfig::validate() const {
    if (!(g >= 0.0)) throw ParameterError("g must be >= 0");
    (void)TrapPotential(v_h);
    const auto grid = make_grid(half_width, n_points);
    for (const double w : widths) {
        (void)gamma_values(DissipationProfile(0.0, w, 0.0), *grid);
    }
    for (const double xd : centers) {
        if (!std::isfinite(xd) || std::abs(xd) >= half_width) {
            throw ParameterError("impinging point x_d must lie inside the box");
        }
    }
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        (void)DissipationProfile(gammas[i], 1.0, 0.0);
        if (i > 0 && !(gammas[i] > gammas[i - 1])) {
            throw ParameterError("gamma list must be strictly increasing");
        }
    }
    if (widths.empty() || centers.empty()) throw ParameterError("width and x_d lists must be non-empty");
    if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
    if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
    EvolutionConfig ec;
    ec.dt = dt;
    ec.t_final = t_final;
    ec.snapshot_stride = snapshot_stride;
    ec.validate();
}

SimulationSetup RunConfig::setup(double width, double center) const {
    SimulationSetup s;
    s.g = g;
    s.v_h = v_h;
    s.width = width;
    s.center = center;
    s.half_width = half_width;
    s.n_points = n_points;
    s.ground_tol = tol;
    s.ground_max_iter = max_iter;
    s.evolution.dt = dt;
    s.evolution.t_final = t_final;
    s.evolution.snapshot_stride = snapshot_stride;
    s.evolution.record_density = record_density;
    return s;
}

std::vector<double> parse_list(const std::string& text) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.empty()) return out;
    if (t.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(parse_double("range", item));
        if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
            throw ParameterError("range must be start:step:stop with step > 0, got '" + text + "'");
        }
        const auto count = static_cast<long long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
        for (long long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
        return out;
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double("list", item));
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
    std::string key = trim(raw_key);
    for (auto& c : key) {
        if (c == '-') c = '_';
    }
    if (key == "g") cfg.g = parse_double(key, value);
    else if (key == "vh") cfg.v_h = parse_double(key, value);
    else if (key == "gamma") cfg.gammas = parse_list(value);
    else if (key == "width") cfg.widths = parse_list(value);
    else if (key == "xd") cfg.centers = parse_list(value);
    else if (key == "L") cfg.half_width = parse_double(key, value);
    else if (key == "n") {
        const auto n = parse_integer(key, value);
        if (n < 0) throw ParameterError("n must be positive");
        cfg.n_points = static_cast<std::size_t>(n);
    } else if (key == "dt") cfg.dt = parse_double(key, value);
    else if (key == "t_final") cfg.t_final = parse_double(key, value);
    else if (key == "tol") cfg.tol = parse_double(key, value);
    else if (key == "max_iter") cfg.max_iter = static_cast<int>(parse_integer(key, value));
    else if (key == "out") cfg.out_dir = trim(value);
    else if (key == "snapshot_stride" || key == "stride") {
        const auto s = parse_integer(key, value);
        if (s < 1) throw ParameterError("snapshot_stride must be >= 1");
        cfg.snapshot_stride = static_cast<std::size_t>(s);
    } else if (key == "record_density") cfg.record_density = parse_bool(key, value);
    else if (key == "threads") {
        const auto t = parse_integer(key, value);
        if (t < 0) throw ParameterError("threads must be >= 0");
        cfg.threads = static_cast<unsigned>(t);
    } else if (key == "version" || key == "command" || key == "status" || key == "error") {
        // manifest bookkeeping
    } else {
        throw ParameterError("unknown config key '" + raw_key + "'");
    }
}

void load_config(RunConfig& cfg, std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line " + std::to_string(line_no) + " is not key=value");
        }
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void load_config(RunConfig& cfg, const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParameterError("cannot read config file '" + file.string() + "'");
    load_config(cfg, in);
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::filesystem::path& file, const std::string& status,
                    const std::string& error) {
    auto os = open_output(file);
    os << "# zeno run manifest; feed back with --config to reproduce\n";
    os << "version=" << kVersion << '\n';
    os << "command=" << command << '\n';
    os << "status=" << status << '\n';
    if (!error.empty()) {
        std::string flat = error;
        for (auto& c : flat) {
            if (c == '\n' || c == '#') c = ' ';
        }
        os << "error=" << flat << '\n';
    }
    os << "g=" << exact(cfg.g) << '\n';
    os << "vh=" << exact(cfg.v_h) << '\n';
    os << "gamma=" << join(cfg.gammas) << '\n';
    os << "width=" << join(cfg.widths) << '\n';
    os << "xd=" << join(cfg.centers) << '\n';
    os << "L=" << exact(cfg.half_width) << '\n';
    os << "n=" << cfg.n_points << '\n';
    os << "dt=" << exact(cfg.dt) << '\n';
    os << "t_final=" << exact(cfg.t_final) << '\n';
    os << "tol=" << exact(cfg.tol) << '\n';
    os << "max_iter=" << cfg.max_iter << '\n';
    os << "out=" << cfg.out_dir.string() << '\n';
    os << "snapshot_stride=" << cfg.snapshot_stride << '\n';
    os << "record_density=" << (cfg.record_density ? "true" : "false") << '\n';
    os << "threads=" << cfg.threads << '\n';
}

std::string loss_curve_filename(double width, double center) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "loss_curve_%g_%g.csv", width, center);
    return buf;
}

int run_ground(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, "ground", log, [&] {
        const auto grid = make_grid(cfg.half_width, cfg.n_points);
        const TrapPotential trap(cfg.v_h);
        const auto result = solve_ground_state(grid, cfg.g, trap, cfg.tol, cfg.max_iter);
        const auto e = energy_components(result.psi0, cfg.g, trap);

        auto os = open_output(cfg.out_dir / "ground_state.csv");
        os << "x,re_psi,im_psi,density\n";
        const auto x = grid->x();
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const Complex z = result.psi0[i];
            os << format_number(x[i]) << ',' << format_number(z.real()) << ','
               << format_number(z.imag()) << ',' << format_number(std::norm(z)) << '\n';
        }
        auto meta = open_output(cfg.out_dir / "ground_state_meta.csv");
        meta << "mu,residual,iterations,E_kin,E_trap,E_int\n";
        meta << format_number(result.mu) << ',' << format_number(result.residual) << ','
             << result.iterations << ',' << format_number(e.kinetic) << ','
             << format_number(e.trap) << ',' << format_number(e.interaction) << '\n';
        log << "mu = " << format_number(result.mu) << " after " << result.iterations
            << " iterations (residual " << result.residual << ")\n";
    });
}

int run_evolve(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, "evolve", log, [&] {
        require_single(cfg.gammas, "gamma");
        require_single(cfg.widths, "width");
        require_single(cfg.centers, "x_d");
        const auto setup = cfg.setup(cfg.widths[0], cfg.centers[0]);
        const auto grid = setup.make_grid();
        const TrapPotential trap(cfg.v_h);
        const DissipationProfile beam(cfg.gammas[0], cfg.widths[0], cfg.centers[0]);
        const auto ground = solve_ground_state(grid, cfg.g, trap, cfg.tol, cfg.max_iter);
        const auto traj = evolve(ground.psi0, setup.evolution, cfg.g, trap, beam);

        auto os = open_output(cfg.out_dir / "trajectory.csv");
        os << "t,p_rem\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            os << format_number(traj.times[i]) << ',' << format_number(traj.p_rem[i]) << '\n';
        }
        if (cfg.record_density) {
            auto ds = open_output(cfg.out_dir / "density.csv");
            ds << "t,x,rho\n";
            const auto x = grid->x();
            for (std::size_t s = 0; s < traj.density.size(); ++s) {
                const std::string t = format_number(traj.times[s]);
                for (std::size_t i = 0; i < x.size(); ++i) {
                    ds << t << ',' << format_number(x[i]) << ',' << format_number(traj.density[s][i]) << '\n';
                }
            }
        }
        if (traj.dt != cfg.dt) log << "note: dt refined to " << traj.dt << '\n';
        log << "P_rem(t_final) = " << format_number(traj.final_p_rem()) << '\n';
        warn_if_unsaturated(traj.final_loss_rate, log);
    });
}

int run_sweep(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, "sweep", log, [&] {
        require_single(cfg.widths, "width");
        require_single(cfg.centers, "x_d");
        const double w = cfg.widths[0];
        const double xd = cfg.centers[0];
        const auto gammas = cfg.gammas.empty() ? default_gamma_grid(w) : cfg.gammas;
        const auto curve = sweep_gamma(cfg.setup(w, xd), gammas, SweepOptions{cfg.threads});
        write_loss_curve(curve, cfg.out_dir / loss_curve_filename(w, xd));
        if (curve.gamma.size() >= 3) {
            const auto star = critical_gamma(curve);
            log << "gamma* = " << (star ? format_number(*star) : std::string("none")) << '\n';
        }
        warn_if_unsaturated(curve.max_final_loss_rate, log);
    });
}

int run_zeno_scan(const RunConfig& cfg, std::ostream& log) {
    return guarded(cfg, "zeno-scan", log, [&] {
        const auto setup = cfg.setup(cfg.widths.front(), cfg.centers.front());
        const auto scans = zeno_scan(setup, cfg.widths, cfg.centers, cfg.gammas, SweepOptions{cfg.threads});

        auto report = open_output(cfg.out_dir / "collapse_report.csv");
        report << "w,x_d,scale,residual,gamma_star\n";
        for (const auto& scan : scans) {
            for (std::size_t c = 0; c < scan.curves.size(); ++c) {
                const auto& curve = scan.curves[c];
                const auto& row = scan.report.curves[c];
                write_loss_curve(curve, cfg.out_dir / loss_curve_filename(scan.width, curve.meta.center));
                report << format_number(scan.width) << ',' << format_number(curve.meta.center) << ','
                       << format_number(row.scale) << ',' << format_number(row.residual) << ','
                       << (row.gamma_star ? format_number(*row.gamma_star) : std::string()) << '\n';
                log << "w=" << scan.width << " x_d=" << curve.meta.center
                    << " scale=" << format_number(row.scale) << " residual=" << format_number(row.residual)
                    << " gamma*=" << (row.gamma_star ? format_number(*row.gamma_star) : std::string("none"))
                    << (row.resolved ? "" : " (below resolution)") << '\n';
            }
        }
    });
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
    if (command == "ground") return run_ground(cfg, log);
    if (command == "evolve") return run_evolve(cfg, log);
    if (command == "sweep") return run_sweep(cfg, log);
    if (command == "zeno-scan") return run_zeno_scan(cfg, log);
    log << "unknown command '" << command << "'\n";
    return kConfigError;
}

}  // namespace zeno::app
