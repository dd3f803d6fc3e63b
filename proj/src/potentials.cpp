#include "zeno/potentials.hpp"

#include <cmath>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

TrapPotential::TrapPotential(double curvature) : curvature_(curvature) {
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
        throw ParameterError("trap curvature v_h must be positive, got " + std::to_string(curvature));
    }
}

double TrapPotential::frequency() const noexcept { return std::sqrt(2.0 * curvature_); }

DissipationProfile::DissipationProfile(double gamma, double width, double center)
    : gamma_(gamma), width_(width), center_(center) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ParameterError("dissipation intensity gamma must be >= 0, got " + std::to_string(gamma));
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw ParameterError("beam width w must be > 0, got " + std::to_string(width));
    }
    if (!std::isfinite(center)) throw ParameterError("beam center must be finite");
}

double DissipationProfile::operator()(double x) const noexcept {
    const double u = (x - center_) / width_;
    return gamma_ * std::exp(-u * u);
}

std::vector<double> trap_values(const TrapPotential& trap, const Grid& grid) {
    std::vector<double> v(grid.size());
    const auto x = grid.x();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = trap(x[i]);
    return v;
}

std::vector<double> gamma_values(const DissipationProfile& beam, const Grid& grid) {
    // Relative slack so that w = 4 dx exactly (e.g. 0.025 on dx = 0.00625) is accepted.
    if (beam.width() < kMinPointsPerWidth * grid.dx() * (1.0 - 1e-12)) {
        throw ParameterError("beam width " + std::to_string(beam.width()) +
                             " is resolved by fewer than 4 grid points (dx = " +
                             std::to_string(grid.dx()) + ")");
    }
    std::vector<double> out(grid.size());
    const auto x = grid.x();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = beam(x[i]);
    return out;
}

}  // namespace zeno
