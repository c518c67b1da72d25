#include "toymodel/newton.hpp"

#include <cmath>

namespace toymodel {

std::string to_string(TerminationReason reason)
{
    switch (reason) {
        case TerminationReason::Absolute: return "abs";
        case TerminationReason::Relative: return "rel";
        case TerminationReason::Step: return "step";
        case TerminationReason::MaxIterations: return "max_iters";
    }
    return "unknown";
}

void SolverConfig::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(step_tol > 0.0) || !(projection_abs_tol > 0.0)) {
        throw std::invalid_argument("solver tolerances must be positive");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    if (!(pivot_tol > 0.0)) {
        throw std::invalid_argument("pivot tolerance must be positive");
    }
}

double norm2(std::span<const double> v) noexcept
{
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

std::optional<TerminationReason> check_termination(double residual_norm, double initial_residual_norm,
                                                   double step_norm, double iterate_norm,
                                                   const SolverConfig& cfg) noexcept
{
    if (residual_norm <= cfg.abs_tol) return TerminationReason::Absolute;
    if (residual_norm <= cfg.rel_tol * initial_residual_norm) return TerminationReason::Relative;
    if (step_norm >= 0.0 && step_norm <= cfg.step_tol * iterate_norm) return TerminationReason::Step;
    return std::nullopt;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          std::vector<double> guess, const SolverConfig& cfg)
{
    const std::size_t n = guess.size();
    std::vector<double> x = std::move(guess);
    std::vector<double> r(n);
    std::vector<double> trial(n);
    std::vector<double> r_trial(n);
    SolverStats stats;

    residual(x, r);
    ++stats.function_evals;
    double r_norm = norm2(r);
    const double r0_norm = r_norm;
    stats.final_residual_norm = r_norm;
    if (!std::isfinite(r_norm)) {
        throw SolverFailure("non-finite residual at initial guess", x, stats);
    }
    if (auto reason = check_termination(r_norm, r0_norm, -1.0, 0.0, cfg)) {
        stats.reason = *reason;
        return {std::move(x), stats};
    }

    std::optional<BlockTridiagonal> J;
    while (stats.iterations < cfg.max_iters) {
        if (!J || cfg.refresh_jacobian) {
            J = jacobian(x);
            ++stats.jacobian_evals;
        }
        std::vector<double> neg_r(n);
        for (std::size_t i = 0; i < n; ++i) neg_r[i] = -r[i];
        std::vector<double> dx;
        try {
            dx = solve_block_tridiagonal(*J, neg_r, cfg.pivot_tol);
        } catch (const SingularMatrixError& e) {
            throw SolverFailure(e.what(), x, stats);
        }

        double lambda = 1.0;
        double trial_norm = 0.0;
        for (int backtrack = 0;; ++backtrack) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * dx[i];
            residual(trial, r_trial);
            ++stats.function_evals;
            trial_norm = norm2(r_trial);
            // Armijo-style backtracking; at most 10 halvings.
            if (!cfg.line_search || trial_norm <= (1.0 - 1e-4 * lambda) * r_norm || backtrack == 10) {
                break;
            }
            lambda *= 0.5;
        }
        ++stats.iterations;

        for (std::size_t i = 0; i < n; ++i) dx[i] *= lambda;
        std::swap(x, trial);
        std::swap(r, r_trial);
        r_norm = trial_norm;
        stats.final_residual_norm = r_norm;
        if (!std::isfinite(r_norm)) {
            throw SolverFailure("non-finite residual during Newton iteration", x, stats);
        }
        if (auto reason = check_termination(r_norm, r0_norm, norm2(dx), norm2(x), cfg)) {
            stats.reason = *reason;
            return {std::move(x), stats};
        }
    }
    stats.reason = TerminationReason::MaxIterations;
    return {std::move(x), stats};
}

}  // namespace toymodel
