#include "zeno/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "zeno/errors.hpp"

namespace zeno {

GridPtr SimulationSetup::make_grid() const { return zeno::make_grid(half_width, n_points); }

bool LossCurveMetadata::comparable(const LossCurveMetadata& o) const {
    return width == o.width && g == o.g && v_h == o.v_h && half_width == o.half_width &&
           n_points == o.n_points && dt == o.dt && t_final == o.t_final;
}

double LossCurve::peak_loss() const {
    return final_loss.empty() ? 0.0 : *std::max_element(final_loss.begin(), final_loss.end());
}

namespace {

std::string tag(double width, double center, double gamma) {
    std::ostringstream os;
    os << "w=" << width << " x_d=" << center << " gamma=" << gamma;
    return os.str();
}

/// Runs `task(i)` for i in [0, n) on a pool of threads. Each index writes its
/// own slot, so results do not depend on scheduling. The lowest-index failure
/// is rethrown after all workers finish.
template <typename Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n && !failed; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void check_gammas(std::span<const double> gammas) {
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] >= 0.0) || !std::isfinite(gammas[i])) {
            throw ParameterError("gamma values must be finite and >= 0");
        }
        if (i > 0 && !(gammas[i] > gammas[i - 1])) {
            throw ParameterError("gamma values must be strictly increasing");
        }
    }
}

LossCurveMetadata metadata_for(const SimulationSetup& s) {
    return {s.width, s.center, s.g, s.v_h, s.half_width, s.n_points, s.evolution.dt,
            s.evolution.t_final};
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

LossCurve sweep_gamma(const SimulationSetup& setup, std::span<const double> gammas,
                      const SweepOptions& options) {
    const auto grid = setup.make_grid();
    const TrapPotential trap(setup.v_h);
    const auto ground = solve_ground_state(grid, setup.g, trap, setup.ground_tol, setup.ground_max_iter);
    return sweep_gamma(setup, ground.psi0, gammas, options);
}

LossCurve sweep_gamma(const SimulationSetup& setup, const WaveFunction& psi0,
                      std::span<const double> gammas, const SweepOptions& options) {
    check_gammas(gammas);
    const TrapPotential trap(setup.v_h);
    const DissipationProfile beam(0.0, setup.width, setup.center);
    // Fail on an unresolved beam before launching any work.
    (void)gamma_values(beam, psi0.grid());

    LossCurve curve;
    curve.gamma.assign(gammas.begin(), gammas.end());
    curve.final_loss.assign(gammas.size(), 0.0);
    curve.meta = metadata_for(setup);
    std::vector<double> dt_used(gammas.size(), 0.0);
    std::vector<double> end_rate(gammas.size(), 0.0);

    parallel_for(gammas.size(), options.threads, [&](std::size_t i) {
        try {
            const auto traj = evolve(psi0, setup.evolution, setup.g, trap, beam.with_gamma(gammas[i]));
            curve.final_loss[i] = std::clamp(traj.final_loss(), 0.0, 1.0);
            dt_used[i] = traj.dt;
            end_rate[i] = traj.final_loss_rate;
        } catch (const Error&) {
            rethrow_with_context(tag(setup.width, setup.center, gammas[i]));
        }
    });
    if (!dt_used.empty()) {
        curve.max_dt_used = *std::max_element(dt_used.begin(), dt_used.end());
        curve.max_final_loss_rate = *std::max_element(end_rate.begin(), end_rate.end());
    }
    return curve;
}

std::optional<double> critical_gamma(const LossCurve& curve, double noise_floor) {
    const auto& loss = curve.final_loss;
    if (loss.size() < 3 || curve.gamma.size() != loss.size()) {
        throw PreconditionError("critical_gamma needs at least 3 points");
    }
    // max_element returns the first maximum, which is the smallest gamma on ties.
    const auto peak = static_cast<std::size_t>(
        std::distance(loss.begin(), std::max_element(loss.begin(), loss.end())));
    if (peak == 0 || peak + 1 == loss.size()) return std::nullopt;
    if (loss[peak] - loss[peak - 1] > noise_floor && loss[peak] - loss[peak + 1] > noise_floor) {
        return curve.gamma[peak];
    }
    return std::nullopt;
}

CollapseReport collapse_check(std::span<const LossCurve> curves) {
    if (curves.empty()) throw PreconditionError("collapse_check needs at least one curve");
    const LossCurve& ref = curves.front();
    for (const auto& c : curves) {
        if (c.gamma != ref.gamma || c.final_loss.size() != ref.gamma.size()) {
            throw PreconditionError("collapse_check requires identical gamma grids");
        }
        if (!c.meta.comparable(ref.meta)) {
            throw PreconditionError("collapse_check requires curves differing only in x_d");
        }
    }

    CollapseReport report;
    const double ref_sq = dot(ref.final_loss, ref.final_loss);
    for (const auto& c : curves) {
        CurveCollapse cc;
        const double cc_sq = dot(c.final_loss, c.final_loss);
        if (cc_sq == 0.0) {
            if (ref_sq != 0.0) throw PreconditionError("cannot rescale an identically zero curve");
            cc.scale = 1.0;
        } else {
            cc.scale = dot(ref.final_loss, c.final_loss) / cc_sq;
        }
        double diff_sq = 0.0;
        for (std::size_t i = 0; i < c.final_loss.size(); ++i) {
            const double d = ref.final_loss[i] - cc.scale * c.final_loss[i];
            diff_sq += d * d;
        }
        cc.residual = ref_sq > 0.0 ? std::sqrt(diff_sq / ref_sq) : 0.0;
        cc.peak_loss = c.peak_loss();
        cc.resolved = cc.peak_loss >= 10.0 * kLossNoiseFloor;
        if (c.final_loss.size() >= 3) cc.gamma_star = critical_gamma(c);
        report.curves.push_back(cc);
    }
    return report;
}

std::vector<double> default_gamma_grid(double width) {
    std::vector<double> out;
    if (width <= 0.5) {
        for (int i = 0; i <= 40; ++i) out.push_back(static_cast<double>(i));
    } else {
        for (int i = 0; i <= 40; ++i) out.push_back(0.5 * static_cast<double>(i));
    }
    return out;
}

std::vector<WidthScan> zeno_scan(const SimulationSetup& setup, std::span<const double> widths,
                                 std::span<const double> centers, std::span<const double> gammas,
                                 const SweepOptions& options) {
    if (widths.empty() || centers.empty()) {
        throw ParameterError("zeno scan needs at least one width and one impinging point");
    }
    const auto grid = setup.make_grid();
    const TrapPotential trap(setup.v_h);
    const auto ground = solve_ground_state(grid, setup.g, trap, setup.ground_tol, setup.ground_max_iter);

    std::vector<WidthScan> scans;
    for (const double w : widths) {
        WidthScan scan;
        scan.width = w;
        const auto grid_for_w = gammas.empty() ? default_gamma_grid(w)
                                               : std::vector<double>(gammas.begin(), gammas.end());
        for (const double xd : centers) {
            SimulationSetup s = setup;
            s.width = w;
            s.center = xd;
            scan.curves.push_back(sweep_gamma(s, ground.psi0, grid_for_w, options));
        }
        scan.report = collapse_check(scan.curves);
        scans.push_back(std::move(scan));
    }
    return scans;
}

}  // namespace zeno
