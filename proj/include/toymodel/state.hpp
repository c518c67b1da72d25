#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toymodel {

using Complex = std::complex<double>;

/// Ghost-value convention at the ends of the lattice.
enum class Closure {
    Dirichlet,  // b_0 = b_{N+1} = 0
    Periodic    // b_0 = b_N, b_{N+1} = b_1
};

class InvalidStateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Lattice amplitudes b_1..b_N (stored 0-based) plus the closure tag.
///
/// Ghost values are never stored; they are derived from the closure on
/// every access through neighbor(). The amplitudes are fixed after
/// construction.
class StateVector {
public:
    StateVector(std::vector<Complex> amplitudes, Closure closure = Closure::Dirichlet);

    static StateVector zeros(std::size_t n, Closure closure = Closure::Dirichlet);

    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] Closure closure() const noexcept { return closure_; }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] const Complex& operator[](std::size_t j) const noexcept { return amps_[j]; }

    /// Amplitude at 0-based site j shifted by offset (-1 or +1), ghost-aware.
    [[nodiscard]] Complex neighbor(std::size_t j, int offset) const noexcept;

    /// Real-split view (Re b_1, Im b_1, Re b_2, ...), length 2N.
    [[nodiscard]] std::vector<double> to_real() const;
    static StateVector from_real(std::span<const double> packed, Closure closure);

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<Complex> amps_;
    Closure closure_;
};

/// Ghost-aware neighbor lookup on a raw amplitude span.
[[nodiscard]] inline Complex neighbor(std::span<const Complex> b, Closure closure,
                                      std::size_t j, int offset) noexcept
{
    const std::size_t n = b.size();
    if (offset < 0) {
        if (j > 0) return b[j - 1];
        return closure == Closure::Periodic ? b[n - 1] : Complex{};
    }
    if (j + 1 < n) return b[j + 1];
    return closure == Closure::Periodic ? b[0] : Complex{};
}

/// Index of the neighbor of site j, or npos when it is a Dirichlet ghost.
[[nodiscard]] std::size_t neighbor_index(std::size_t n, Closure closure, std::size_t j,
                                         int offset) noexcept;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Sobolev exponent s of the weighted h^s norm.
class NormExponent {
public:
    explicit NormExponent(double s);
    [[nodiscard]] double value() const noexcept { return s_; }
    friend auto operator<=>(const NormExponent&, const NormExponent&) = default;

private:
    double s_;
};

/// Uniform time grid t_n = t0 + n*dt.
class TimeGrid {
public:
    TimeGrid(double dt, std::size_t n_steps, double t0 = 0.0);

    /// Grid covering [t0, t0 + t_max]; t_max must be an integer multiple of dt
    /// up to a relative slack of 1e-9.
    static TimeGrid from_horizon(double dt, double t_max, double t0 = 0.0);

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double time(std::size_t n) const noexcept { return t0_ + static_cast<double>(n) * dt_; }
    [[nodiscard]] double t_max() const noexcept { return time(n_steps_); }

private:
    double dt_;
    std::size_t n_steps_;
    double t0_;
};

/// Number of steps of size dt needed to reach span; throws std::invalid_argument
/// when span is not an integer multiple of dt.
[[nodiscard]] std::size_t aligned_steps(double span, double dt);

[[nodiscard]] std::string to_string(Closure closure);

}  // namespace toymodel
