#include "zeno/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

// Plain complex product; avoids the NaN-recovery path of operator*.
void multiply(ComplexVector& data, const ComplexVector& factor) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double a = data[i].real();
        const double b = data[i].imag();
        const double c = factor[i].real();
        const double d = factor[i].imag();
        data[i] = Complex{a * c - b * d, a * d + b * c};
    }
}

}  // namespace

void EvolutionConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be > 0");
    if (!(t_final >= dt) || !std::isfinite(t_final)) throw ParameterError("t_final must be >= dt");
    if (snapshot_stride < 1) throw ParameterError("snapshot stride must be >= 1");
    if (max_halvings < 0) throw ParameterError("max_halvings must be >= 0");
    if (!(rate_tolerance > 0.0)) throw ParameterError("rate tolerance must be > 0");
}

std::size_t EvolutionConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

SplitStepPropagator::SplitStepPropagator(GridPtr grid, double g, std::vector<double> potential,
                                         std::vector<double> loss_rate, double dt)
    : grid_(std::move(grid)), g_(g), dt_(dt), loss_rate_(std::move(loss_rate)),
      fft_(grid_->size()) {
    const std::size_t n = grid_->size();
    if (potential.size() != n || loss_rate_.size() != n) {
        throw ParameterError("potential and loss-rate samples must match the grid");
    }
    if (!(dt > 0.0)) throw ParameterError("dt must be > 0");

    local_factor_.resize(n);
    half_decay_.resize(n);
    nonlinear_time_.resize(n);
    lost_fraction_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rate = loss_rate_[i];
        if (!(rate >= 0.0)) throw ParameterError("loss rate must be >= 0");
        local_factor_[i] = std::polar(std::exp(-rate * dt), -potential[i] * dt);
        half_decay_[i] = std::exp(-0.5 * rate * dt);
        lost_fraction_[i] = -std::expm1(-2.0 * rate * dt);
        nonlinear_time_[i] = rate > 0.0 ? -std::expm1(-2.0 * rate * dt) / (2.0 * rate) : dt;
    }

    // The kick factors carry the 1/n of the inverse transform.
    const auto k = grid_->k();
    const double inv_n = 1.0 / static_cast<double>(n);
    half_kick_.resize(n);
    full_kick_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = 0.5 * k[i] * k[i];
        half_kick_[i] = std::polar(inv_n, -0.5 * e * dt);
        full_kick_[i] = std::polar(inv_n, -e * dt);
    }
    spectrum_.resize(n);
    work_.resize(n);
}

SplitStepPropagator::SplitStepPropagator(GridPtr grid, double g, const TrapPotential& trap,
                                         const DissipationProfile& beam, double dt)
    : SplitStepPropagator(grid, g, trap_values(trap, *grid), gamma_values(beam, *grid), dt) {}

void SplitStepPropagator::reset(const WaveFunction& psi) {
    if (psi.size() != grid_->size()) throw ParameterError("wave function does not match grid");
    if (!psi.is_finite()) throw InvalidStateError("initial wave function is not finite");
    std::copy(psi.values().begin(), psi.values().end(), work_.begin());
    fft_.forward(work_);
    steps_ = 0;
    has_state_ = true;
}

SplitStepPropagator::StepStats SplitStepPropagator::advance() {
    if (!has_state_) throw PreconditionError("propagator has no state; call reset() first");
    const std::size_t n = work_.size();

    // work_ holds the spectrum after the previous local substep.
    const ComplexVector& kick = steps_ == 0 ? half_kick_ : full_kick_;
    multiply(work_, kick);
    fft_.backward_unscaled(work_);

    double before = 0.0;
    double after = 0.0;
    double lost = 0.0;
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double re = work_[i].real();
        const double im = work_[i].imag();
        const double rho = re * re + im * im;
        // exp(-i theta) for the nonlinear phase; theta is tiny except in extreme runs.
        const double theta = g_ * rho * nonlinear_time_[i];
        double ct;
        double st;
        if (std::abs(theta) < 1e-3) {
            const double t2 = theta * theta;
            ct = 1.0 - t2 * (0.5 - t2 * (1.0 / 24.0 - t2 * (1.0 / 720.0)));
            st = theta * (1.0 - t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0)));
        } else {
            ct = std::cos(theta);
            st = std::sin(theta);
        }
        // local_factor_ = exp(-Gamma dt - i V dt)
        const double fr = local_factor_[i].real();
        const double fi = local_factor_[i].imag();
        const double c = fr * ct + fi * st;
        const double s = fi * ct - fr * st;
        const double out_re = re * c - im * s;
        const double out_im = re * s + im * c;
        work_[i] = Complex{out_re, out_im};
        before += rho;
        after += out_re * out_re + out_im * out_im;
        lost += rho * lost_fraction_[i];
        const double mid = half_decay_[i];
        rate += loss_rate_[i] * rho * mid * mid;
    }
    const double dx = grid_->dx();
    ++steps_;
    if (!std::isfinite(after)) {
        throw BlowUpError("non-finite field at step " + std::to_string(steps_), steps_);
    }
    fft_.forward(work_);
    return {before * dx, after * dx, lost * dx, 2.0 * rate * dx};
}

WaveFunction SplitStepPropagator::state() const {
    if (!has_state_) throw PreconditionError("propagator has no state");
    std::copy(work_.begin(), work_.end(), spectrum_.begin());
    if (steps_ > 0) {
        multiply(spectrum_, half_kick_);
        fft_.backward_unscaled(spectrum_);
    } else {
        fft_.backward(spectrum_);
    }
    return WaveFunction(grid_, ComplexVector(spectrum_.begin(), spectrum_.end()));
}

WaveFunction step(const WaveFunction& psi, double dt, double g, const TrapPotential& trap,
                  const DissipationProfile& beam) {
    SplitStepPropagator prop(psi.grid_ptr(), g, trap, beam, dt);
    prop.reset(psi);
    prop.advance();
    return prop.state();
}

double decay_rate_check(const WaveFunction& psi, const DissipationProfile& beam) {
    if (!psi.is_finite()) throw InvalidStateError("decay rate of a non-finite wave function");
    const auto x = psi.grid().x();
    double sum = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) sum += beam(x[i]) * std::norm(psi[i]);
    return 2.0 * sum * psi.grid().dx();
}

double mirror_asymmetry(std::span<const double> field) {
    // Index i sits at -L + i dx, mirrored at index n - i.
    const std::size_t n = field.size();
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) worst = std::max(worst, std::abs(field[i] - field[n - i]));
    return worst;
}

namespace {

double edge_density(const WaveFunction& psi) {
    return std::max(std::norm(psi[0]), std::norm(psi[psi.size() - 1]));
}

Trajectory run_fixed(const WaveFunction& psi0, const EvolutionConfig& cfg, double dt, double g,
                     const std::vector<double>& potential, const std::vector<double>& loss_rate) {
    EvolutionConfig local = cfg;
    local.dt = dt;
    const std::size_t n_steps = local.steps();

    SplitStepPropagator prop(psi0.grid_ptr(), g, potential, loss_rate, dt);
    prop.reset(psi0);

    Trajectory traj;
    traj.dt = dt;
    traj.times.push_back(0.0);
    traj.p_rem.push_back(norm(psi0));
    traj.max_edge_density = edge_density(psi0);
    if (cfg.record_density) traj.density.push_back(density(psi0));

    for (std::size_t s = 1; s <= n_steps; ++s) {
        const auto stats = prop.advance();
        if (stats.midpoint_rate > 0.0) {
            const double loss_rate = stats.lost / dt;
            const double mismatch = std::abs(loss_rate - stats.midpoint_rate) / stats.midpoint_rate;
            traj.max_rate_mismatch = std::max(traj.max_rate_mismatch, mismatch);
        }
        if (s == n_steps) traj.final_loss_rate = stats.lost / dt;

        if (s % cfg.snapshot_stride != 0 && s != n_steps) continue;
        const double t = static_cast<double>(s) * dt;
        traj.times.push_back(t);
        traj.p_rem.push_back(stats.norm_after);

        const WaveFunction psi = prop.state();
        const double edge = edge_density(psi);
        traj.max_edge_density = std::max(traj.max_edge_density, edge);
        if (edge > cfg.edge_density_limit) {
            throw BoundaryContaminationError("density " + std::to_string(edge) +
                                                 " at the box edge at t = " + std::to_string(t),
                                             t, edge);
        }
        if (cfg.record_density) traj.density.push_back(density(psi));
    }
    return traj;
}

}  // namespace

Trajectory evolve(const WaveFunction& psi0, const EvolutionConfig& cfg, double g,
                  const TrapPotential& trap, const DissipationProfile& beam) {
    cfg.validate();
    const double n0 = norm(psi0);
    if (std::abs(n0 - 1.0) > 1e-6) {
        throw PreconditionError("evolve expects a normalized initial state, norm = " +
                                std::to_string(n0));
    }
    const Grid& grid = psi0.grid();
    const auto potential = trap_values(trap, grid);
    const auto loss_rate = gamma_values(beam, grid);

    EvolutionConfig current = cfg;
    Trajectory traj = run_fixed(psi0, current, current.dt, g, potential, loss_rate);
    for (int h = 0; cfg.refine_dt && h < cfg.max_halvings &&
                    traj.max_rate_mismatch > cfg.rate_tolerance;
         ++h) {
        // Halve dt and double the stride so samples land on the same times.
        current.dt *= 0.5;
        current.snapshot_stride *= 2;
        traj = run_fixed(psi0, current, current.dt, g, potential, loss_rate);
    }
    return traj;
}

}  // namespace zeno
