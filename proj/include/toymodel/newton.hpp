#pragma once

#include "toymodel/block_tridiagonal.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toymodel {

enum class TerminationReason { Absolute, Relative, Step, MaxIterations };

[[nodiscard]] std::string to_string(TerminationReason reason);

/// Initial guess for the implicit step solve.
enum class Predictor {
    Previous,  // b_n itself
    RK2        // one explicit midpoint (RK2) step from b_n
};

/// Explicit predictor of the projection method.
enum class ProjectionPredictor {
    RK4,             // classical fourth-order Runge-Kutta
    BogackiShampine3 // third-order Bogacki-Shampine
};

struct SolverConfig {
    double abs_tol = 1e-50;
    double rel_tol = 1e-15;
    double step_tol = 1e-15;
    int max_iters = 50;
    bool line_search = false;
    /// Full Newton when true; chord Newton (Jacobian from the first iterate) when false.
    bool refresh_jacobian = true;
    Predictor predictor = Predictor::Previous;
    double pivot_tol = 1e-14;

    // Multiplier solve of the projection method.
    double projection_abs_tol = 1e-12;
    bool refresh_projection_gradients = false;
    ProjectionPredictor projection_predictor = ProjectionPredictor::RK4;

    /// Throws std::invalid_argument on non-positive tolerances or max_iters < 1.
    void validate() const;
};

struct SolverStats {
    int iterations = 0;
    int function_evals = 0;
    int jacobian_evals = 0;
    double final_residual_norm = 0.0;
    TerminationReason reason = TerminationReason::MaxIterations;

    [[nodiscard]] bool converged() const noexcept { return reason != TerminationReason::MaxIterations; }
};

/// Thrown when the linear solve inside Newton fails or the residual stops being finite.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, std::vector<double> last_iterate, SolverStats stats)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)), stats_(stats)
    {
    }
    [[nodiscard]] const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    [[nodiscard]] const SolverStats& stats() const noexcept { return stats_; }

private:
    std::vector<double> last_iterate_;
    SolverStats stats_;
};

/// Writes r(x) into the second argument.
using ResidualFn = std::function<void(std::span<const double>, std::span<double>)>;
using JacobianFn = std::function<BlockTridiagonal(std::span<const double>)>;

struct NewtonResult {
    std::vector<double> solution;
    SolverStats stats;
};

/// Three-criterion termination test, checked in the order absolute, relative, step.
/// step_norm/iterate_norm are ignored before the first Newton update (pass a negative step_norm).
[[nodiscard]] std::optional<TerminationReason> check_termination(double residual_norm,
                                                                 double initial_residual_norm,
                                                                 double step_norm,
                                                                 double iterate_norm,
                                                                 const SolverConfig& cfg) noexcept;

/// Newton iteration on a system with block-tridiagonal Jacobian.
///
/// Every residual call counts as one function evaluation, including the one
/// at the initial guess, so an undamped solve that stops after k updates
/// reports k + 1 evaluations. Reaching max_iters is not an error: the last
/// iterate is returned with reason MaxIterations.
[[nodiscard]] NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                                        std::vector<double> guess, const SolverConfig& cfg);

[[nodiscard]] double norm2(std::span<const double> v) noexcept;

}  // namespace toymodel
