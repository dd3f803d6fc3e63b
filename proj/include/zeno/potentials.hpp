#pragma once

#include <vector>

#include "zeno/grid.hpp"

namespace zeno {

/// Harmonic trap V(x) = v_h x^2.
class TrapPotential {
public:
    /// Throws ParameterError unless curvature > 0.
    explicit TrapPotential(double curvature);

    double curvature() const noexcept { return curvature_; }
    /// Oscillator frequency sqrt(2 v_h) for unit mass.
    double frequency() const noexcept;
    double operator()(double x) const noexcept { return curvature_ * x * x; }

private:
    double curvature_;
};

/// Gaussian loss rate Gamma(x) = gamma * exp(-((x - x_d) / w)^2) of the depleting beam.
class DissipationProfile {
public:
    /// Throws ParameterError unless gamma >= 0 and width > 0.
    DissipationProfile(double gamma, double width, double center);

    /// The same beam with a different intensity.
    DissipationProfile with_gamma(double gamma) const { return {gamma, width_, center_}; }

    double gamma() const noexcept { return gamma_; }
    double width() const noexcept { return width_; }
    double center() const noexcept { return center_; }

    double operator()(double x) const noexcept;

private:
    double gamma_;
    double width_;
    double center_;
};

/// Minimum number of grid spacings per beam width accepted by gamma_values.
inline constexpr double kMinPointsPerWidth = 4.0;

std::vector<double> trap_values(const TrapPotential& trap, const Grid& grid);

/// Pointwise samples of Gamma(x). Throws ParameterError when the beam is
/// narrower than kMinPointsPerWidth grid spacings.
std::vector<double> gamma_values(const DissipationProfile& beam, const Grid& grid);

}  // namespace zeno
