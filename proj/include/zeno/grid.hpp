#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace zeno {

using Complex = std::complex<double>;

/// Allocator returning storage aligned for SIMD FFT kernels.
template <typename T, std::size_t Alignment = 64>
struct AlignedAllocator {
    using value_type = T;

    AlignedAllocator() noexcept = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U, Alignment>&) noexcept {}

    template <typename U>
    struct rebind {
        using other = AlignedAllocator<U, Alignment>;
    };

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Alignment}));
    }
    void deallocate(T* p, std::size_t) noexcept {
        ::operator delete(p, std::align_val_t{Alignment});
    }

    template <typename U>
    bool operator==(const AlignedAllocator<U, Alignment>&) const noexcept { return true; }
};

using ComplexVector = std::vector<Complex, AlignedAllocator<Complex>>;

/// Uniform periodic 1D grid on [-L, L).
///
/// x[i] = -L + i*dx with dx = 2L/n. Wavenumbers follow the FFT ordering
/// (0, 1, ..., n/2-1, -n/2, ..., -1) * 2*pi/(2L), so max|k| = pi/dx.
class Grid {
public:
    static constexpr std::size_t kMinPoints = 16;

    Grid(double half_width, std::size_t n_points);

    double half_width() const noexcept { return half_width_; }
    std::size_t size() const noexcept { return x_.size(); }
    double dx() const noexcept { return dx_; }

    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> k() const noexcept { return k_; }

    /// Index of the grid point closest to `position`.
    std::size_t nearest_index(double position) const noexcept;

private:
    double half_width_;
    double dx_;
    std::vector<double> x_;
    std::vector<double> k_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double half_width, std::size_t n_points);

/// Complex condensate amplitude sampled on a grid.
class WaveFunction {
public:
    /// Zero field.
    explicit WaveFunction(GridPtr grid);
    /// Throws ParameterError on length mismatch, InvalidStateError on NaN/Inf.
    WaveFunction(GridPtr grid, ComplexVector amplitudes);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<Complex> values() noexcept { return values_; }
    std::span<const Complex> values() const noexcept { return values_; }

    Complex& operator[](std::size_t i) noexcept { return values_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

    bool is_finite() const noexcept;

private:
    GridPtr grid_;
    ComplexVector values_;
};

/// Owning wrapper around a pair of FFTW plans of fixed length.
///
/// Plans are created with FFTW_ESTIMATE so the transform is reproducible
/// bit-for-bit across runs. `backward` includes the 1/n normalization.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<Complex> data);
    void backward(std::span<Complex> data);
    /// Inverse transform without the 1/n factor.
    void backward_unscaled(std::span<Complex> data);

private:
    struct Plans;
    void execute(bool forward, std::span<Complex> data);

    std::size_t n_;
    std::unique_ptr<Plans> plans_;
};

/// Riemann-sum quadrature sum |psi|^2 dx. Throws InvalidStateError on non-finite input.
double norm(const WaveFunction& psi);

/// Pointwise |psi|^2.
std::vector<double> density(const WaveFunction& psi);

/// Spectral second derivative d^2 psi / dx^2.
ComplexVector second_derivative(const WaveFunction& psi);

class TrapPotential;

struct EnergyComponents {
    double kinetic = 0.0;
    double trap = 0.0;
    double interaction = 0.0;

    double total() const noexcept { return kinetic + trap + interaction; }
    /// 2 E_kin - 2 E_trap + E_int; vanishes at a stationary state of a harmonic trap.
    double virial() const noexcept { return 2.0 * kinetic - 2.0 * trap + interaction; }
};

/// Kinetic, trap and interaction energies of a normalized field.
///
/// E_kin = int |psi'|^2 / 2 (spectral derivative), E_trap = int V |psi|^2,
/// E_int = (g/2) int |psi|^4. Throws PreconditionError if |norm - 1| > 1e-6.
EnergyComponents energy_components(const WaveFunction& psi, double g, const TrapPotential& trap);

}  // namespace zeno
