#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zeno/errors.hpp"
#include "zeno/potentials.hpp"

using namespace zeno;

TEST_CASE("harmonic trap values") {
    const TrapPotential trap(0.0005);
    const Grid grid(25.6, 8192);
    const auto v = trap_values(trap, grid);
    CHECK(v[grid.nearest_index(0.0)] == 0.0);
    CHECK(v[grid.nearest_index(10.0)] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(v[grid.nearest_index(-10.0)] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(trap(10.0) == trap(-10.0));

    CHECK_THROWS_AS(TrapPotential(0.0), ParameterError);
    CHECK_THROWS_AS(TrapPotential(-1e-3), ParameterError);
}

TEST_CASE("beam parameter validation") {
    CHECK_THROWS_AS(DissipationProfile(1.0, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(DissipationProfile(1.0, -0.1, 0.0), ParameterError);
    CHECK_THROWS_AS(DissipationProfile(-1.0, 0.1, 0.0), ParameterError);
    CHECK_NOTHROW(DissipationProfile(0.0, 0.1, 0.0));
}

TEST_CASE("gaussian loss profile") {
    const Grid grid(25.6, 8192);
    const DissipationProfile beam(23.4, 0.1, 0.0);
    const auto gamma = gamma_values(beam, grid);
    const auto x = grid.x();

    CHECK(gamma[grid.nearest_index(0.0)] == 23.4);
    CHECK(beam(0.1) == doctest::Approx(23.4 / std::numbers::e).epsilon(1e-14));
    CHECK(beam(-0.1) == doctest::Approx(23.4 / std::numbers::e).epsilon(1e-14));

    double integral = 0.0;
    double peak = 0.0;
    for (const double g : gamma) {
        integral += g;
        peak = std::max(peak, g);
        CHECK(g >= 0.0);
    }
    integral *= grid.dx();
    CHECK(peak <= 23.4);
    // gamma w sqrt(pi) = 4.1475...
    CHECK(integral == doctest::Approx(23.4 * 0.1 * std::sqrt(std::numbers::pi)).epsilon(1e-10));
    CHECK(integral == doctest::Approx(4.147).epsilon(1e-3));

    // Non-increasing away from the centre on both sides.
    const std::size_t c = grid.nearest_index(0.0);
    for (std::size_t i = c + 1; i < gamma.size(); ++i) REQUIRE(gamma[i] <= gamma[i - 1]);
    for (std::size_t i = c; i > 0; --i) REQUIRE(gamma[i - 1] <= gamma[i]);
    (void)x;
}

TEST_CASE("loss profile is translation covariant on the grid") {
    const Grid grid(25.6, 8192);
    const auto base = gamma_values(DissipationProfile(5.0, 0.1, 0.0), grid);
    for (const int shift : {1, 17, -160, 800}) {
        const double xd = shift * grid.dx();
        const auto moved = gamma_values(DissipationProfile(5.0, 0.1, xd), grid);
        const std::size_t lo = 2000;
        const std::size_t hi = grid.size() - 2000;
        for (std::size_t i = lo; i < hi; ++i) {
            REQUIRE(moved[i + shift] == doctest::Approx(base[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("under-resolved beams are rejected") {
    const Grid grid(25.6, 8192);
    CHECK_NOTHROW(gamma_values(DissipationProfile(1.0, 0.025, 0.0), grid));
    CHECK_THROWS_AS(gamma_values(DissipationProfile(1.0, 0.02, 0.0), grid), ParameterError);
    const Grid coarse(25.6, 2048);
    CHECK_THROWS_AS(gamma_values(DissipationProfile(1.0, 0.025, 0.0), coarse), ParameterError);
}
