#pragma once

#include "toymodel/state.hpp"

#include <span>
#include <vector>

namespace toymodel {

// Vector field of the lattice model,
//   db_j/dt = i ( -|b_j|^2 b_j + 2 conj(b_j) (b_{j-1}^2 + b_{j+1}^2) ),
// its two invariants, and the weighted h^s diagnostics.
//
// Gradient convention used throughout the library: for a real functional
// I[b] the real gradient with respect to (Re b_j, Im b_j), read back as a
// complex number, equals 2 dI/d(conj b_j).

[[nodiscard]] std::vector<Complex> rhs(const StateVector& state);

/// Mass sum_j |b_j|^2.
[[nodiscard]] double mass(const StateVector& state);

/// Hamiltonian sum_j ( |b_j|^4 / 4 - Re(conj(b_j)^2 b_{j-1}^2) ).
[[nodiscard]] double energy(const StateVector& state);

/// g_j = |b_j|^2 b_j - 2 conj(b_j)(b_{j-1}^2 + b_{j+1}^2), i.e. 2 dH/d(conj b_j).
/// The flow satisfies rhs = -i g.
[[nodiscard]] std::vector<Complex> hamiltonian_gradient(const StateVector& state);

/// sum_{j=1}^N 2^{(s-1) j} |b_j|^2
[[nodiscard]] double hs_norm_squared(const StateVector& state, NormExponent s);
[[nodiscard]] double hs_norm(const StateVector& state, NormExponent s);

// Span-level kernels. They skip StateVector validation and are used inside
// the Newton loops; out must have the same length as b.
void rhs_into(std::span<const Complex> b, Closure closure, std::span<Complex> out);
void hamiltonian_gradient_into(std::span<const Complex> b, Closure closure, std::span<Complex> out);
[[nodiscard]] double mass_of(std::span<const Complex> b) noexcept;
[[nodiscard]] double energy_of(std::span<const Complex> b, Closure closure) noexcept;

}  // namespace toymodel
