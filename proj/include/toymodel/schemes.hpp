#pragma once

#include "toymodel/block_tridiagonal.hpp"
#include "toymodel/newton.hpp"
#include "toymodel/state.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toymodel {

enum class SchemeKind { Trapezoidal, ImplicitMidpoint, Mass, Energy, RK4, Projection };

inline constexpr std::array<SchemeKind, 6> kAllSchemes{
    SchemeKind::Trapezoidal, SchemeKind::ImplicitMidpoint, SchemeKind::Mass,
    SchemeKind::Energy,      SchemeKind::RK4,              SchemeKind::Projection};

inline constexpr std::array<SchemeKind, 4> kImplicitSchemes{
    SchemeKind::Trapezoidal, SchemeKind::ImplicitMidpoint, SchemeKind::Mass, SchemeKind::Energy};

[[nodiscard]] constexpr bool is_implicit(SchemeKind s) noexcept
{
    return s != SchemeKind::RK4 && s != SchemeKind::Projection;
}

[[nodiscard]] std::string to_string(SchemeKind s);
/// Accepts trapezoidal|trap, midpoint|implicit-midpoint|implicit_midpoint, mass, energy, rk4, projection.
[[nodiscard]] std::optional<SchemeKind> parse_scheme(std::string_view name);

class UnsupportedSchemeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-site averages between two time levels.
struct NonlinearAverages {
    Complex midpoint;          // (b_n + b_{n+1}) / 2
    Complex squared_midpoint;  // ((b_n + b_{n+1}) / 2)^2
    Complex averaged_square;   // (b_n^2 + b_{n+1}^2) / 2
    double averaged_modulus;   // (|b_n|^2 + |b_{n+1}|^2) / 2
};

[[nodiscard]] NonlinearAverages nonlinear_averages(Complex current, Complex next) noexcept;

struct StepResult {
    StateVector next_state;
    SolverStats stats;
    bool accepted = true;
    /// Explicit vector-field evaluations outside the Newton solve (4 for RK4 and Projection).
    int rhs_evals = 0;
    /// Lagrange multipliers (mass, energy) of a projection step.
    std::array<double, 2> multipliers{0.0, 0.0};
};

/// R = b_cand - b_n - dt F(b_n, b_cand) for one of the four implicit schemes.
[[nodiscard]] std::vector<Complex> residual(SchemeKind scheme, const StateVector& b_n,
                                            const StateVector& b_cand, double dt);

/// Derivative of the real-split residual with respect to (Re b_cand, Im b_cand),
/// interleaved per site, as 2x2 blocks (cyclic corners when periodic).
[[nodiscard]] BlockTridiagonal jacobian(SchemeKind scheme, const StateVector& b_n,
                                        const StateVector& b_cand, double dt);

/// One step of an implicit scheme. dt must be positive. Newton failures are
/// reported through accepted = false with the last iterate in next_state.
[[nodiscard]] StepResult step_implicit(SchemeKind scheme, const StateVector& b_n, double dt,
                                       const SolverConfig& cfg = {});

/// Same update solved with step -dt; used to check time symmetry.
[[nodiscard]] StepResult step_implicit_backward(SchemeKind scheme, const StateVector& b_n, double dt,
                                                const SolverConfig& cfg = {});

/// Classical fourth-order Runge-Kutta step.
[[nodiscard]] StateVector step_rk4(const StateVector& b_n, double dt);

/// Third-order Bogacki-Shampine step (the higher-order solution of the 3(2) pair).
[[nodiscard]] StateVector step_bs3(const StateVector& b_n, double dt);

/// RK4 predictor (or cfg.projection_predictor) followed by a shift along the mass and energy gradients
/// (taken at the RK4 state) that restores mass M0 and energy H0. On failure of
/// the 2x2 multiplier solve the unprojected RK4 state is returned with
/// accepted = false.
[[nodiscard]] StepResult step_projection(const StateVector& b_n, double dt, double M0, double H0,
                                         const SolverConfig& cfg = {});

/// Dispatches to the scheme's stepper. M0/H0 are only used by Projection.
[[nodiscard]] StepResult advance(SchemeKind scheme, const StateVector& b_n, double dt,
                                 const SolverConfig& cfg, double M0, double H0);

}  // namespace toymodel
