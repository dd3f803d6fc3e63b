#include "zeno/grid.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "zeno/errors.hpp"
#include "zeno/potentials.hpp"

namespace zeno {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Grid::Grid(double half_width, std::size_t n_points) : half_width_(half_width) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw ParameterError("grid half-width must be positive and finite, got " +
                             std::to_string(half_width));
    }
    if (n_points < kMinPoints || n_points % 2 != 0) {
        throw ParameterError("grid needs an even number of points >= 16, got " +
                             std::to_string(n_points));
    }
    dx_ = 2.0 * half_width / static_cast<double>(n_points);
    x_.resize(n_points);
    k_.resize(n_points);
    const double dk = std::numbers::pi / half_width;
    const auto n = static_cast<std::ptrdiff_t>(n_points);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        x_[i] = -half_width + static_cast<double>(i) * dx_;
        const std::ptrdiff_t m = i < n / 2 ? i : i - n;
        k_[i] = static_cast<double>(m) * dk;
    }
}

std::size_t Grid::nearest_index(double position) const noexcept {
    const double s = std::round((position + half_width_) / dx_);
    if (s <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(s), size() - 1);
}

GridPtr make_grid(double half_width, std::size_t n_points) {
    return std::make_shared<const Grid>(half_width, n_points);
}

WaveFunction::WaveFunction(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw ParameterError("wave function needs a grid");
    values_.assign(grid_->size(), Complex{0.0, 0.0});
}

WaveFunction::WaveFunction(GridPtr grid, ComplexVector amplitudes)
    : grid_(std::move(grid)), values_(std::move(amplitudes)) {
    if (!grid_) throw ParameterError("wave function needs a grid");
    if (values_.size() != grid_->size()) {
        throw ParameterError("amplitude count " + std::to_string(values_.size()) +
                             " does not match grid size " + std::to_string(grid_->size()));
    }
    if (!is_finite()) throw InvalidStateError("wave function has non-finite amplitudes");
}

bool WaveFunction::is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

struct Fft::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    int alignment = 0;
};

Fft::Fft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
    ComplexVector scratch(n);
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    plans_->forward = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_->alignment = fftw_alignment_of(reinterpret_cast<double*>(scratch.data()));
    if (!plans_->forward || !plans_->backward) throw Error("FFTW planning failed");
}

Fft::~Fft() {
    std::lock_guard lock(planner_mutex());
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

void Fft::execute(bool forward, std::span<Complex> data) {
    if (data.size() != n_) throw ParameterError("FFT length mismatch");
    fftw_plan plan = forward ? plans_->forward : plans_->backward;
    if (fftw_alignment_of(reinterpret_cast<double*>(data.data())) == plans_->alignment) {
        fftw_execute_dft(plan, as_fftw(data.data()), as_fftw(data.data()));
        return;
    }
    ComplexVector tmp(data.begin(), data.end());
    fftw_execute_dft(plan, as_fftw(tmp.data()), as_fftw(tmp.data()));
    std::copy(tmp.begin(), tmp.end(), data.begin());
}

void Fft::forward(std::span<Complex> data) { execute(true, data); }

void Fft::backward_unscaled(std::span<Complex> data) { execute(false, data); }

void Fft::backward(std::span<Complex> data) {
    execute(false, data);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& z : data) z *= scale;
}

double norm(const WaveFunction& psi) {
    if (!psi.is_finite()) throw InvalidStateError("norm of a non-finite wave function");
    double sum = 0.0;
    for (const auto& z : psi.values()) sum += std::norm(z);
    return sum * psi.grid().dx();
}

std::vector<double> density(const WaveFunction& psi) {
    if (!psi.is_finite()) throw InvalidStateError("density of a non-finite wave function");
    std::vector<double> rho(psi.size());
    std::transform(psi.values().begin(), psi.values().end(), rho.begin(),
                   [](const Complex& z) { return std::norm(z); });
    return rho;
}

ComplexVector second_derivative(const WaveFunction& psi) {
    const auto k = psi.grid().k();
    ComplexVector out(psi.values().begin(), psi.values().end());
    Fft fft(out.size());
    fft.forward(out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -k[i] * k[i];
    fft.backward(out);
    return out;
}

EnergyComponents energy_components(const WaveFunction& psi, double g, const TrapPotential& trap) {
    const double n = norm(psi);
    if (std::abs(n - 1.0) > 1e-6) {
        throw PreconditionError("energy_components expects a normalized field, norm = " +
                                std::to_string(n));
    }
    const Grid& grid = psi.grid();
    const double dx = grid.dx();
    const auto x = grid.x();
    const auto k = grid.k();

    ComplexVector spectrum(psi.values().begin(), psi.values().end());
    Fft fft(spectrum.size());
    fft.forward(spectrum);
    double kin = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) kin += k[i] * k[i] * std::norm(spectrum[i]);

    EnergyComponents e;
    e.kinetic = 0.5 * kin * dx / static_cast<double>(spectrum.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double rho = std::norm(psi[i]);
        e.trap += trap(x[i]) * rho;
        e.interaction += rho * rho;
    }
    e.trap *= dx;
    e.interaction *= 0.5 * g * dx;
    return e;
}

}  // namespace zeno
