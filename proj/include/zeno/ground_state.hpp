#pragma once

#include <functional>

#include "zeno/grid.hpp"
#include "zeno/potentials.hpp"

namespace zeno {

struct GroundStateProgress {
    int iteration;
    double energy;
    double mu;
    double residual;
    double step;
};

struct GroundStateOptions {
    double tol = 1e-8;
    int max_iter = 100000;
    /// Initial imaginary-time step; halved whenever a step would raise the energy.
    double initial_step = 0.1;
    /// Called once per accepted iterate.
    std::function<void(const GroundStateProgress&)> on_iteration;
};

struct GroundStateResult {
    WaveFunction psi0;
    double mu;
    double residual;
    int iterations;
};

/// Ground state of -1/2 psi'' + V psi + g |psi|^2 psi = mu psi with unit norm.
///
/// Normalized imaginary-time gradient flow, semi-implicit in the kinetic term:
///
///   (1/dtau - 1/2 d^2)(psi* - psi) = -(H[psi] - mu[psi]) psi,  psi <- psi* / |psi*|
///
/// whose fixed points satisfy the stationary equation exactly for any step.
/// Starts from the non-interacting Gaussian; the output phase is fixed so the
/// largest-magnitude amplitude is real positive.
///
/// Throws ConvergenceError (carrying the last residual) if the residual does
/// not drop below `tol` within `max_iter` iterations.
GroundStateResult solve_ground_state(const GridPtr& grid, double g, const TrapPotential& trap,
                                     const GroundStateOptions& options = {});

GroundStateResult solve_ground_state(const GridPtr& grid, double g, const TrapPotential& trap,
                                     double tol, int max_iter);

/// sqrt(dx) * || (-1/2 d^2 + V + g|psi|^2 - mu) psi ||_2.
double gpe_residual(const WaveFunction& psi, double mu, double g, const TrapPotential& trap);

/// Normalized Gaussian of the non-interacting oscillator, width (2 v_h)^(-1/4).
WaveFunction oscillator_ground_state(const GridPtr& grid, const TrapPotential& trap,
                                     double center = 0.0);

}  // namespace zeno
