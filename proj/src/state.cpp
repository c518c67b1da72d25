#include "toymodel/state.hpp"

#include <cmath>
#include <string>

namespace toymodel {

StateVector::StateVector(std::vector<Complex> amplitudes, Closure closure)
    : amps_(std::move(amplitudes)), closure_(closure)
{
    if (amps_.empty()) {
        throw InvalidStateError("state vector needs at least one site");
    }
    for (std::size_t j = 0; j < amps_.size(); ++j) {
        if (!std::isfinite(amps_[j].real()) || !std::isfinite(amps_[j].imag())) {
            throw InvalidStateError("non-finite amplitude at site " + std::to_string(j + 1));
        }
    }
}

StateVector StateVector::zeros(std::size_t n, Closure closure)
{
    return StateVector(std::vector<Complex>(n), closure);
}

Complex StateVector::neighbor(std::size_t j, int offset) const noexcept
{
    return toymodel::neighbor(amps_, closure_, j, offset);
}

std::vector<double> StateVector::to_real() const
{
    std::vector<double> packed(2 * amps_.size());
    for (std::size_t j = 0; j < amps_.size(); ++j) {
        packed[2 * j] = amps_[j].real();
        packed[2 * j + 1] = amps_[j].imag();
    }
    return packed;
}

StateVector StateVector::from_real(std::span<const double> packed, Closure closure)
{
    if (packed.size() % 2 != 0) {
        throw InvalidStateError("real-split vector must have even length");
    }
    std::vector<Complex> amps(packed.size() / 2);
    for (std::size_t j = 0; j < amps.size(); ++j) {
        amps[j] = {packed[2 * j], packed[2 * j + 1]};
    }
    return StateVector(std::move(amps), closure);
}

std::size_t neighbor_index(std::size_t n, Closure closure, std::size_t j, int offset) noexcept
{
    if (offset < 0) {
        if (j > 0) return j - 1;
        return closure == Closure::Periodic ? n - 1 : npos;
    }
    if (j + 1 < n) return j + 1;
    return closure == Closure::Periodic ? 0 : npos;
}

NormExponent::NormExponent(double s) : s_(s)
{
    if (!std::isfinite(s)) {
        throw std::invalid_argument("norm exponent must be finite");
    }
}

TimeGrid::TimeGrid(double dt, std::size_t n_steps, double t0) : dt_(dt), n_steps_(n_steps), t0_(t0)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (n_steps == 0) {
        throw std::invalid_argument("time grid needs at least one step");
    }
    if (!std::isfinite(t0)) {
        throw std::invalid_argument("initial time must be finite");
    }
}

TimeGrid TimeGrid::from_horizon(double dt, double t_max, double t0)
{
    if (!(dt > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    return TimeGrid(dt, aligned_steps(t_max, dt), t0);
}

std::size_t aligned_steps(double span, double dt)
{
    if (!(span > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("time span and step must be positive");
    }
    const double ratio = span / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw std::invalid_argument("time span " + std::to_string(span) +
                                    " is not an integer multiple of dt " + std::to_string(dt));
    }
    return static_cast<std::size_t>(rounded);
}

std::string to_string(Closure closure)
{
    return closure == Closure::Periodic ? "periodic" : "dirichlet";
}

}  // namespace toymodel
