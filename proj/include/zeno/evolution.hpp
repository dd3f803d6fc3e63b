#pragma once

#include <cstddef>
#include <vector>

#include "zeno/grid.hpp"
#include "zeno/potentials.hpp"

namespace zeno {

struct EvolutionConfig {
    double dt = 1e-3;
    double t_final = 1.75;
    /// Record a sample every `snapshot_stride` steps (and always at the last step).
    std::size_t snapshot_stride = 1;
    bool record_density = false;

    /// Halve dt until every step passes the midpoint loss-rate check.
    bool refine_dt = true;
    int max_halvings = 8;
    double rate_tolerance = 0.01;

    /// Evolution fails if |psi(+-L)|^2 exceeds this at a sampled time.
    double edge_density_limit = 1e-6;

    /// Throws ParameterError unless dt > 0, t_final >= dt, stride >= 1.
    void validate() const;
    std::size_t steps() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> p_rem;
    /// One row per sample when record_density is set.
    std::vector<std::vector<double>> density;

    /// Time step actually used after refinement.
    double dt = 0.0;
    /// Largest relative mismatch between the per-step norm loss and the
    /// midpoint decay rate 2 int Gamma |psi|^2 over the whole run.
    double max_rate_mismatch = 0.0;
    /// Loss rate -dP_rem/dt during the final step.
    double final_loss_rate = 0.0;
    /// Largest |psi(+-L)|^2 seen at any sample.
    double max_edge_density = 0.0;

    double final_p_rem() const { return p_rem.back(); }
    double final_loss() const { return 1.0 - p_rem.back(); }
};

/// Strang-split spectral integrator for
///
///   i psi_t = -1/2 psi'' + (V + g|psi|^2) psi - i Gamma psi.
///
/// A step is kinetic(dt/2) . local(dt) . kinetic(dt/2). The local substep is
/// solved exactly: |psi|^2 decays as exp(-2 Gamma t) and the nonlinear phase
/// integrates that decay. Consecutive kinetic half steps are fused, so the
/// internal state lives in momentum space between steps.
class SplitStepPropagator {
public:
    /// `potential` and `loss_rate` are sampled on `grid`.
    SplitStepPropagator(GridPtr grid, double g, std::vector<double> potential,
                        std::vector<double> loss_rate, double dt);
    SplitStepPropagator(GridPtr grid, double g, const TrapPotential& trap,
                        const DissipationProfile& beam, double dt);

    struct StepStats {
        /// Norm entering and leaving the local substep (equal to the norm at
        /// the start and end of the step since the kinetic factor is unitary).
        double norm_before;
        double norm_after;
        /// Norm removed by the loss term, summed without cancellation.
        double lost;
        /// 2 int Gamma |psi|^2 evaluated halfway through the local substep.
        double midpoint_rate;
    };

    void reset(const WaveFunction& psi);
    /// Advances one step; throws BlowUpError on non-finite values.
    StepStats advance();

    WaveFunction state() const;
    double time() const noexcept { return static_cast<double>(steps_) * dt_; }
    std::size_t steps_taken() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }

private:
    GridPtr grid_;
    double g_;
    double dt_;
    ComplexVector local_factor_;           // exp(-Gamma dt - i V dt)
    std::vector<double> half_decay_;       // exp(-Gamma dt / 2)
    std::vector<double> nonlinear_time_;   // int_0^dt exp(-2 Gamma s) ds
    std::vector<double> lost_fraction_;    // 1 - exp(-2 Gamma dt)
    std::vector<double> loss_rate_;
    ComplexVector half_kick_;
    ComplexVector full_kick_;
    mutable Fft fft_;
    mutable ComplexVector spectrum_;
    ComplexVector work_;
    std::size_t steps_ = 0;
    bool has_state_ = false;
};

/// One Strang step of the dissipative GPE.
WaveFunction step(const WaveFunction& psi, double dt, double g, const TrapPotential& trap,
                  const DissipationProfile& beam);

/// Integrates from psi0 for round(t_final/dt) steps, recording P_rem.
///
/// Throws PreconditionError unless psi0 is normalized within 1e-6, BlowUpError
/// on non-finite values, BoundaryContaminationError if the density at the box
/// edge exceeds cfg.edge_density_limit at a sample.
Trajectory evolve(const WaveFunction& psi0, const EvolutionConfig& cfg, double g,
                  const TrapPotential& trap, const DissipationProfile& beam);

/// 2 int Gamma(x) |psi(x)|^2 dx, the instantaneous norm-loss rate.
double decay_rate_check(const WaveFunction& psi, const DissipationProfile& beam);

/// max |psi(x) - psi(-x)| over mirrored grid pairs (x = -L has no partner).
double mirror_asymmetry(std::span<const double> field);

}  // namespace zeno
