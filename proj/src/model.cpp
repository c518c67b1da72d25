#include "toymodel/model.hpp"

#include <cmath>

namespace toymodel {

void rhs_into(std::span<const Complex> b, Closure closure, std::span<Complex> out)
{
    constexpr Complex I{0.0, 1.0};
    for (std::size_t j = 0; j < b.size(); ++j) {
        const Complex left = neighbor(b, closure, j, -1);
        const Complex right = neighbor(b, closure, j, +1);
        out[j] = I * (-std::norm(b[j]) * b[j] + 2.0 * std::conj(b[j]) * (left * left + right * right));
    }
}

void hamiltonian_gradient_into(std::span<const Complex> b, Closure closure, std::span<Complex> out)
{
    for (std::size_t j = 0; j < b.size(); ++j) {
        const Complex left = neighbor(b, closure, j, -1);
        const Complex right = neighbor(b, closure, j, +1);
        out[j] = std::norm(b[j]) * b[j] - 2.0 * std::conj(b[j]) * (left * left + right * right);
    }
}

double mass_of(std::span<const Complex> b) noexcept
{
    double sum = 0.0;
    for (const Complex& z : b) sum += std::norm(z);
    return sum;
}

double energy_of(std::span<const Complex> b, Closure closure) noexcept
{
    double sum = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double modulus2 = std::norm(b[j]);
        const Complex cj = std::conj(b[j]);
        const Complex left = neighbor(b, closure, j, -1);
        sum += 0.25 * modulus2 * modulus2 - std::real(cj * cj * left * left);
    }
    return sum;
}

std::vector<Complex> rhs(const StateVector& state)
{
    std::vector<Complex> out(state.size());
    rhs_into(state.amplitudes(), state.closure(), out);
    return out;
}

double mass(const StateVector& state)
{
    return mass_of(state.amplitudes());
}

double energy(const StateVector& state)
{
    return energy_of(state.amplitudes(), state.closure());
}

std::vector<Complex> hamiltonian_gradient(const StateVector& state)
{
    std::vector<Complex> out(state.size());
    hamiltonian_gradient_into(state.amplitudes(), state.closure(), out);
    return out;
}

double hs_norm_squared(const StateVector& state, NormExponent s)
{
    const auto b = state.amplitudes();
    double sum = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        sum += std::exp2((s.value() - 1.0) * static_cast<double>(j + 1)) * std::norm(b[j]);
    }
    return sum;
}

double hs_norm(const StateVector& state, NormExponent s)
{
    return std::sqrt(hs_norm_squared(state, s));
}

}  // namespace toymodel
