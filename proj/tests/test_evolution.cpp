#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "zeno/errors.hpp"
#include "zeno/evolution.hpp"
#include "zeno/ground_state.hpp"

using namespace zeno;

namespace {

const TrapPotential kTrap(0.0005);
const DissipationProfile kNoBeam(0.0, 2.0, 0.0);

double center_of_mass(const WaveFunction& psi) {
    const auto x = psi.grid().x();
    double m = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) m += x[i] * std::norm(psi[i]);
    return m * psi.grid().dx() / norm(psi);
}

}  // namespace

TEST_CASE("free plane wave acquires the exact phase") {
    auto grid = make_grid(12.8, 256);
    const std::size_t n = grid->size();
    const double k0 = 7.0 * std::numbers::pi / grid->half_width();
    const double dt = 1e-2;
    SplitStepPropagator prop(grid, 0.0, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), dt);

    WaveFunction psi(grid);
    const auto x = grid->x();
    for (std::size_t i = 0; i < n; ++i) psi[i] = std::polar(1.0, k0 * x[i]);
    prop.reset(psi);
    for (int s = 1; s <= 5; ++s) {
        prop.advance();
        const auto out = prop.state();
        const Complex phase = std::polar(1.0, -0.5 * k0 * k0 * dt * s);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(out[i] - psi[i] * phase));
        CHECK(worst < 1e-10 * s);
    }
}

TEST_CASE("uniform state follows the exact local solution") {
    // k = 0 only: the kinetic factor is the identity, so
    // rho(t) = rho0 exp(-2 Gamma t) and phase(t) = -g rho0 (1 - exp(-2 Gamma t)) / (2 Gamma).
    auto grid = make_grid(4.0, 64);
    const std::size_t n = grid->size();
    for (const double g : {0.1, 2000.0}) {
        for (const double gamma : {0.0, 3.0}) {
            const double dt = 1e-2;
            const int steps = 7;
            SplitStepPropagator prop(grid, g, std::vector<double>(n, 0.0), std::vector<double>(n, gamma), dt);
            prop.reset(WaveFunction(grid, ComplexVector(n, Complex{0.5, 0.0})));
            for (int s = 0; s < steps; ++s) prop.advance();
            const double t = steps * dt;
            const double rho0 = 0.25;
            const double integrated = gamma > 0.0 ? -std::expm1(-2.0 * gamma * t) / (2.0 * gamma) : t;
            const Complex expected = std::polar(0.5 * std::exp(-gamma * t), -g * rho0 * integrated);
            const auto psi = prop.state();
            for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(psi[i] - expected) < 1e-12);
        }
    }
}

TEST_CASE("single step helper agrees with the propagator") {
    auto grid = make_grid(25.6, 1024);
    const auto psi0 = solve_ground_state(grid, 0.1, kTrap).psi0;
    const DissipationProfile beam(3.0, 0.5, 1.0);
    const auto a = step(psi0, 1e-3, 0.1, kTrap, beam);

    SplitStepPropagator prop(grid, 0.1, kTrap, beam, 1e-3);
    prop.reset(psi0);
    const auto stats = prop.advance();
    const auto b = prop.state();
    for (std::size_t i = 0; i < grid->size(); ++i) REQUIRE(a[i] == b[i]);
    CHECK(norm(b) == doctest::Approx(stats.norm_after).epsilon(1e-12));
    CHECK(stats.norm_before == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stats.lost == doctest::Approx(stats.norm_before - stats.norm_after).epsilon(1e-9));
}

TEST_CASE("ground state is stationary without dissipation") {
    auto grid = make_grid(25.6, 2048);
    const auto gs = solve_ground_state(grid, 0.1, kTrap);
    const auto rho0 = density(gs.psi0);

    SplitStepPropagator prop(grid, 0.1, kTrap, kNoBeam, 1e-3);
    prop.reset(gs.psi0);
    double drift = 0.0;
    for (int s = 1; s <= 10000; ++s) {
        prop.advance();
        if (s % 1000 != 0) continue;
        const auto rho = density(prop.state());
        for (std::size_t i = 0; i < rho.size(); ++i) drift = std::max(drift, std::abs(rho[i] - rho0[i]));
    }
    CHECK(drift < 1e-6);

    // The global phase rotates at the chemical potential.
    const auto psi = prop.state();
    const std::size_t c = grid->nearest_index(0.0);
    const double phase = std::arg(psi[c] / gs.psi0[c]);
    const double expected = std::remainder(-gs.mu * 10.0, 2.0 * std::numbers::pi);
    CHECK(std::abs(std::remainder(phase - expected, 2.0 * std::numbers::pi)) < 1e-5);
}

TEST_CASE("displaced oscillator returns after one period") {
    auto grid = make_grid(51.2, 2048);
    const double period = 2.0 * std::numbers::pi / kTrap.frequency();
    CHECK(period == doctest::Approx(198.7).epsilon(1e-3));
    const auto psi0 = oscillator_ground_state(grid, kTrap, 2.0);
    CHECK(center_of_mass(psi0) == doctest::Approx(2.0).epsilon(1e-8));

    const int steps = 20000;
    SplitStepPropagator prop(grid, 0.0, kTrap, kNoBeam, period / steps);
    prop.reset(psi0);
    for (int s = 0; s < steps / 2; ++s) prop.advance();
    CHECK(center_of_mass(prop.state()) == doctest::Approx(-2.0).epsilon(1e-3));
    for (int s = 0; s < steps / 2; ++s) prop.advance();
    CHECK(std::abs(center_of_mass(prop.state()) - 2.0) < 1e-3);
}

TEST_CASE("decay rate quadrature") {
    auto grid = make_grid(25.6, 8192);
    WaveFunction uniform(grid, ComplexVector(grid->size(), Complex{std::sqrt(0.3), 0.0}));
    CHECK(decay_rate_check(uniform, kNoBeam) == 0.0);
    const DissipationProfile beam(23.4, 0.1, 0.0);
    const double expected = 2.0 * 0.3 * 23.4 * 0.1 * std::sqrt(std::numbers::pi);
    CHECK(decay_rate_check(uniform, beam) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("evolution without dissipation conserves the norm") {
    auto grid = make_grid(25.6, 1024);
    const auto psi0 = solve_ground_state(grid, 0.1, kTrap).psi0;
    EvolutionConfig cfg;
    cfg.t_final = 5.0;
    cfg.snapshot_stride = 100;
    const auto traj = evolve(psi0, cfg, 0.1, kTrap, kNoBeam);
    REQUIRE(traj.times.size() == 51);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double bound = 1e-8 * std::max(1.0, traj.times[i] / cfg.dt);
        REQUIRE(std::abs(traj.p_rem[i] - 1.0) < bound);
    }
    CHECK(std::abs(traj.final_p_rem() - 1.0) < 1e-6);
    CHECK(traj.max_rate_mismatch == 0.0);
    CHECK(traj.dt == cfg.dt);
}

TEST_CASE("hole burning under a strong narrow beam") {
    auto grid = make_grid(25.6, 8192);
    const auto psi0 = solve_ground_state(grid, 0.1, kTrap).psi0;
    const DissipationProfile beam(23.4, 0.1, 0.0);
    EvolutionConfig cfg;
    cfg.t_final = 1.0;
    cfg.snapshot_stride = 50;
    cfg.record_density = true;
    const auto traj = evolve(psi0, cfg, 0.1, kTrap, beam);

    CHECK(traj.p_rem.front() == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t i = 1; i < traj.p_rem.size(); ++i) {
        REQUIRE(traj.p_rem[i] < traj.p_rem[i - 1]);
        REQUIRE(traj.p_rem[i] >= 0.0);
    }
    CHECK(traj.max_rate_mismatch < 0.01);
    CHECK(traj.dt == cfg.dt);
    REQUIRE(traj.density.size() == traj.times.size());

    const std::size_t c = grid->nearest_index(0.0);
    const std::size_t side = grid->nearest_index(1.0);
    const auto& last = traj.density.back();
    CHECK(last[c] < 0.1 * traj.density.front()[c]);
    CHECK(last[c] < 0.1 * last[side]);
    for (const auto& rho : traj.density) REQUIRE(mirror_asymmetry(rho) < 1e-6);
}

TEST_CASE("weak dissipation follows the perturbative rate") {
    auto grid = make_grid(25.6, 8192);
    const auto psi0 = solve_ground_state(grid, 0.1, kTrap).psi0;
    const DissipationProfile beam(0.1, 0.1, 0.0);
    const double rate0 = decay_rate_check(psi0, beam);
    CHECK(rate0 > 0.0);

    EvolutionConfig cfg;
    cfg.t_final = 0.01;
    const auto traj = evolve(psi0, cfg, 0.1, kTrap, beam);
    const double measured = (traj.p_rem.front() - traj.final_p_rem()) / traj.times.back();
    CHECK(measured == doctest::Approx(rate0).epsilon(0.05));
}

TEST_CASE("very strong dissipation triggers time-step refinement") {
    auto grid = make_grid(25.6, 2048);
    const auto psi0 = solve_ground_state(grid, 0.1, kTrap).psi0;
    const DissipationProfile beam(2000.0, 0.5, 0.0);
    EvolutionConfig cfg;
    cfg.t_final = 0.02;
    cfg.snapshot_stride = 5;
    const auto traj = evolve(psi0, cfg, 0.1, kTrap, beam);
    CHECK(traj.dt < cfg.dt);
    CHECK(traj.max_rate_mismatch <= cfg.rate_tolerance);
    // Samples stay on the coarse time grid.
    REQUIRE(traj.times.size() == 5);
    CHECK(traj.times.back() == doctest::Approx(0.02).epsilon(1e-12));

    cfg.refine_dt = false;
    const auto coarse = evolve(psi0, cfg, 0.1, kTrap, beam);
    CHECK(coarse.dt == cfg.dt);
    CHECK(coarse.max_rate_mismatch > cfg.rate_tolerance);
}

TEST_CASE("non-finite fields raise a blow-up error") {
    auto grid = make_grid(10.0, 64);
    std::vector<double> potential(64, 0.0);
    potential[10] = std::numeric_limits<double>::infinity();
    SplitStepPropagator prop(grid, 0.0, potential, std::vector<double>(64, 0.0), 1e-3);
    prop.reset(WaveFunction(grid, ComplexVector(64, Complex{0.1, 0.0})));
    try {
        prop.advance();
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.step() == 1);
    }
}

TEST_CASE("density at the box edge is an error") {
    auto grid = make_grid(25.6, 1024);
    const auto psi0 = oscillator_ground_state(grid, kTrap, 20.0);
    EvolutionConfig cfg;
    cfg.t_final = 0.01;
    try {
        evolve(psi0, cfg, 0.0, kTrap, kNoBeam);
        FAIL("expected BoundaryContaminationError");
    } catch (const BoundaryContaminationError& e) {
        CHECK(e.edge_density() > 1e-6);
        CHECK(e.time() > 0.0);
    }
}

TEST_CASE("sample count") {
    auto grid = make_grid(25.6, 256);
    const auto psi0 = oscillator_ground_state(grid, kTrap);
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 100.0;
    cfg.snapshot_stride = 10;
    CHECK(cfg.steps() == 100000);
    const auto traj = evolve(psi0, cfg, 0.0, kTrap, kNoBeam);
    CHECK(traj.times.size() == 10001);
    CHECK(traj.times.back() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(std::abs(traj.final_p_rem() - 1.0) < 1e-6);
}

TEST_CASE("evolution preconditions") {
    auto grid = make_grid(25.6, 256);
    auto psi0 = oscillator_ground_state(grid, kTrap);
    EvolutionConfig cfg;
    cfg.t_final = 0.01;

    auto scaled = psi0;
    for (auto& z : scaled.values()) z *= 1.001;
    CHECK_THROWS_AS(evolve(scaled, cfg, 0.1, kTrap, kNoBeam), PreconditionError);

    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.dt = 1e-3;
    cfg.t_final = 1e-4;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.t_final = 1.0;
    cfg.snapshot_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
