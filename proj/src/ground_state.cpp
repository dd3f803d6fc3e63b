#include "zeno/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

// Energy increases smaller than this (relative) are treated as round-off.
constexpr double kEnergySlack = 1e-13;
constexpr double kMinStep = 1e-12;

/// Applies H[psi] = -1/2 d^2 + V + g|psi|^2 on a fixed grid.
class MeanFieldHamiltonian {
public:
    MeanFieldHamiltonian(const Grid& grid, double g, const TrapPotential& trap)
        : grid_(grid), g_(g), potential_(trap_values(trap, grid)), fft_(grid.size()),
          scratch_(grid.size()) {}

    struct Evaluation {
        double energy;
        double mu;
        double residual;
    };

    /// Fills `h_psi` with H psi and returns the energy, Rayleigh quotient and residual.
    Evaluation apply(std::span<const Complex> psi, ComplexVector& h_psi, double mu_override = NAN) {
        const auto k = grid_.k();
        const double dx = grid_.dx();
        const std::size_t n = psi.size();

        std::copy(psi.begin(), psi.end(), scratch_.begin());
        fft_.forward(scratch_);
        double kin = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = 0.5 * k[i] * k[i];
            kin += t * std::norm(scratch_[i]);
            scratch_[i] *= t;
        }
        kin *= dx / static_cast<double>(n);
        fft_.backward(scratch_);

        h_psi.resize(n);
        double e_pot = 0.0;
        double e_int = 0.0;
        double expect = 0.0;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rho = std::norm(psi[i]);
            h_psi[i] = scratch_[i] + (potential_[i] + g_ * rho) * psi[i];
            e_pot += potential_[i] * rho;
            e_int += rho * rho;
            expect += (std::conj(psi[i]) * h_psi[i]).real();
            norm2 += rho;
        }
        const double mu = std::isnan(mu_override) ? expect / norm2 : mu_override;
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) res2 += std::norm(h_psi[i] - mu * psi[i]);

        return {kin + (e_pot + 0.5 * g_ * e_int) * dx, mu, std::sqrt(res2 * dx)};
    }

    /// out = (1/step - 1/2 d^2)^{-1} r
    void precondition(std::span<const Complex> r, double step, ComplexVector& out) {
        const auto k = grid_.k();
        out.assign(r.begin(), r.end());
        fft_.forward(out);
        const double shift = 1.0 / step;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] /= shift + 0.5 * k[i] * k[i];
        fft_.backward(out);
    }

private:
    const Grid& grid_;
    double g_;
    std::vector<double> potential_;
    Fft fft_;
    ComplexVector scratch_;
};

void normalize(ComplexVector& psi, double dx) {
    double s = 0.0;
    for (const auto& z : psi) s += std::norm(z);
    const double scale = 1.0 / std::sqrt(s * dx);
    for (auto& z : psi) z *= scale;
}

void fix_phase(ComplexVector& psi) {
    const auto peak = std::max_element(psi.begin(), psi.end(), [](const Complex& a, const Complex& b) {
        return std::norm(a) < std::norm(b);
    });
    if (peak == psi.end() || std::abs(*peak) == 0.0) return;
    const Complex rotation = std::conj(*peak) / std::abs(*peak);
    for (auto& z : psi) z *= rotation;
    // Remove the residual imaginary part of the pivot left by rounding.
    *peak = Complex{peak->real(), 0.0};
}

}  // namespace

WaveFunction oscillator_ground_state(const GridPtr& grid, const TrapPotential& trap, double center) {
    const double a = std::pow(2.0 * trap.curvature(), -0.25);
    const double amp = std::pow(std::numbers::pi * a * a, -0.25);
    ComplexVector values(grid->size());
    const auto x = grid->x();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double u = (x[i] - center) / a;
        values[i] = amp * std::exp(-0.5 * u * u);
    }
    normalize(values, grid->dx());
    return WaveFunction(grid, std::move(values));
}

GroundStateResult solve_ground_state(const GridPtr& grid, double g, const TrapPotential& trap,
                                     const GroundStateOptions& options) {
    if (!(g >= 0.0)) throw ParameterError("interaction g must be >= 0, got " + std::to_string(g));
    if (!(options.tol > 0.0)) throw ParameterError("ground-state tolerance must be > 0");
    if (!(options.initial_step > 0.0)) throw ParameterError("imaginary-time step must be > 0");

    const double dx = grid->dx();
    MeanFieldHamiltonian hamiltonian(*grid, g, trap);

    WaveFunction start = oscillator_ground_state(grid, trap);
    ComplexVector psi(start.values().begin(), start.values().end());
    ComplexVector h_psi;
    ComplexVector trial;
    ComplexVector h_trial;
    ComplexVector update;

    auto eval = hamiltonian.apply(psi, h_psi);
    double step = options.initial_step;
    int iter = 0;

    while (eval.residual > options.tol) {
        if (iter >= options.max_iter) {
            throw ConvergenceError("ground state did not converge in " + std::to_string(iter) +
                                       " iterations (residual " + std::to_string(eval.residual) + ")",
                                   eval.residual, iter);
        }
        for (std::size_t i = 0; i < psi.size(); ++i) h_psi[i] -= eval.mu * psi[i];
        hamiltonian.precondition(h_psi, step, update);

        while (true) {
            trial.resize(psi.size());
            for (std::size_t i = 0; i < psi.size(); ++i) trial[i] = psi[i] - update[i];
            normalize(trial, dx);
            const auto trial_eval = hamiltonian.apply(trial, h_trial);
            if (!std::isfinite(trial_eval.energy)) {
                throw ConvergenceError("ground-state iteration produced non-finite energy",
                                       eval.residual, iter);
            }
            if (trial_eval.energy <= eval.energy + kEnergySlack * std::abs(eval.energy)) {
                psi.swap(trial);
                h_psi.swap(h_trial);
                eval = trial_eval;
                break;
            }
            step *= 0.5;
            if (step < kMinStep) {
                throw ConvergenceError("imaginary-time step underflow", eval.residual, iter);
            }
            hamiltonian.precondition(h_psi, step, update);
        }
        ++iter;
        if (options.on_iteration) options.on_iteration({iter, eval.energy, eval.mu, eval.residual, step});
    }

    fix_phase(psi);
    WaveFunction psi0(grid, std::move(psi));
    return {std::move(psi0), eval.mu, eval.residual, iter};
}

GroundStateResult solve_ground_state(const GridPtr& grid, double g, const TrapPotential& trap,
                                     double tol, int max_iter) {
    GroundStateOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    return solve_ground_state(grid, g, trap, options);
}

double gpe_residual(const WaveFunction& psi, double mu, double g, const TrapPotential& trap) {
    if (!psi.is_finite()) throw InvalidStateError("residual of a non-finite wave function");
    MeanFieldHamiltonian hamiltonian(psi.grid(), g, trap);
    ComplexVector h_psi;
    return hamiltonian.apply(psi.values(), h_psi, mu).residual;
}

}  // namespace zeno
