#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zeno/evolution.hpp"
#include "zeno/ground_state.hpp"

namespace zeno {

/// Everything except the beam intensity that defines one simulation.
struct SimulationSetup {
    double g = 0.1;
    double v_h = 0.0005;
    double width = 0.1;
    double center = 0.0;
    double half_width = 204.8;
    std::size_t n_points = 65536;
    double ground_tol = 1e-8;
    int ground_max_iter = 100000;
    EvolutionConfig evolution;

    GridPtr make_grid() const;
};

struct LossCurveMetadata {
    double width = 0.0;
    double center = 0.0;
    double g = 0.0;
    double v_h = 0.0;
    double half_width = 0.0;
    std::size_t n_points = 0;
    double dt = 0.0;
    double t_final = 0.0;

    /// True when every field except `center` matches.
    bool comparable(const LossCurveMetadata& other) const;
};

/// Final loss 1 - P_rem(t_final) as a function of gamma.
struct LossCurve {
    std::vector<double> gamma;
    std::vector<double> final_loss;
    /// Largest time step actually used across the sweep (after refinement).
    double max_dt_used = 0.0;
    /// Largest |dP_rem/dt| at t_final across the sweep.
    double max_final_loss_rate = 0.0;
    LossCurveMetadata meta;

    double peak_loss() const;
};

struct SweepOptions {
    /// Worker threads; 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Loss curve for one beam geometry. The ground state is solved once and
/// reused for every gamma. Errors are rethrown tagged with the offending gamma.
LossCurve sweep_gamma(const SimulationSetup& setup, std::span<const double> gammas,
                      const SweepOptions& options = {});

/// Same, starting from an already solved ground state on `setup`'s grid.
LossCurve sweep_gamma(const SimulationSetup& setup, const WaveFunction& psi0,
                      std::span<const double> gammas, const SweepOptions& options = {});

/// Numerical noise floor of final-loss differences.
inline constexpr double kLossNoiseFloor = 1e-4;

/// Gamma at the global maximum of the final loss if it is interior and
/// exceeds both neighbours by more than `noise_floor`; nullopt otherwise.
/// Throws PreconditionError for fewer than 3 points.
std::optional<double> critical_gamma(const LossCurve& curve, double noise_floor = kLossNoiseFloor);

struct CurveCollapse {
    /// s minimizing ||c_ref - s c||_2.
    double scale = 1.0;
    /// ||c_ref - s c||_2 / ||c_ref||_2.
    double residual = 0.0;
    std::optional<double> gamma_star;
    double peak_loss = 0.0;
    /// False when the peak loss is below 10x the noise floor; such curves are
    /// reported but not held to the collapse criterion.
    bool resolved = true;
};

struct CollapseReport {
    std::size_t reference = 0;
    std::vector<CurveCollapse> curves;
};

/// Compares each curve against the first by optimal scaling.
///
/// Throws PreconditionError if the curves do not share gamma grids and
/// numerical parameters, or if a non-reference curve is identically zero
/// while the reference is not.
CollapseReport collapse_check(std::span<const LossCurve> curves);

/// Gamma grid used when none is given: 0, 1, ..., 40 for w <= 0.5 and
/// 0, 0.5, ..., 20 for wider beams.
std::vector<double> default_gamma_grid(double width);

/// Curves for every impinging point at one width, with their collapse report.
struct WidthScan {
    double width = 0.0;
    std::vector<LossCurve> curves;
    CollapseReport report;
};

/// Sweeps every (width, center) pair. `gammas` empty selects
/// default_gamma_grid per width. The ground state is shared by all runs.
std::vector<WidthScan> zeno_scan(const SimulationSetup& setup, std::span<const double> widths,
                                 std::span<const double> centers, std::span<const double> gammas,
                                 const SweepOptions& options = {});

}  // namespace zeno
