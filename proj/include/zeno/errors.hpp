#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zeno {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical or numerical parameter outside its declared range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An argument violates an operation's precondition (e.g. unnormalized input).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A field contains NaN or Inf where finite values are required.
class InvalidStateError : public Error {
public:
    using Error::Error;
};

/// The stationary-state iteration did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : Error(what), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

/// Non-finite values appeared during time integration.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Density reached the edge of the periodic box.
class BoundaryContaminationError : public Error {
public:
    BoundaryContaminationError(const std::string& what, double time, double edge_density)
        : Error(what), time_(time), edge_density_(edge_density) {}

    double time() const noexcept { return time_; }
    double edge_density() const noexcept { return edge_density_; }

private:
    double time_;
    double edge_density_;
};

/// Rethrows the in-flight zeno::Error as the same type with `context`
/// prepended to its message. Must be called from inside a catch block.
[[noreturn]] void rethrow_with_context(const std::string& context);

}  // namespace zeno
