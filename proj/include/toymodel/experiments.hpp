#pragma once

#include "toymodel/ensemble.hpp"
#include "toymodel/newton.hpp"
#include "toymodel/schemes.hpp"
#include "toymodel/state.hpp"

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace toymodel {

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// b_j = exp(i (j-1) pi / 4), Dirichlet.
[[nodiscard]] StateVector shock_ic(std::size_t n);

/// States at every grid time t_0..t_{n_steps}; throws NumericalFailure when an
/// implicit step fails (projection failures are tolerated).
[[nodiscard]] std::vector<StateVector> integrate_states(const StateVector& ic, SchemeKind scheme,
                                                        const TimeGrid& grid, const SolverConfig& cfg);

/// max_n ||a_n - b_n||_2 over two equally long state sequences.
[[nodiscard]] double max_pointwise_error(std::span<const StateVector> a, std::span<const StateVector> b);

/// Least-squares slope of log(error) against log(dt).
[[nodiscard]] double fitted_order(std::span<const double> dts, std::span<const double> errors);

/// Which coarse-grid times enter the max over n of the error and drift metrics.
enum class SampleWindow {
    StepStarts,  // t_0 .. t_{n_steps - 1}: the state at the start of every step
    AllTimes     // t_0 .. t_{n_steps}
};

struct ConvergenceReport {
    SchemeKind scheme;
    std::vector<double> dts;           // strictly decreasing
    std::vector<double> errors;        // max_n ||b_n - b_ref(t_n)||_2
    std::vector<double> mass_drift;    // max_n |M_n - M_0| / M_0
    std::vector<double> energy_drift;  // max_n |H_n - H_0| / |H_0|
    double order = 0.0;
};

/// Pointwise error of each scheme against a fine-step RK4 reference started
/// from the same initial condition. Every dt must be an integer multiple of
/// reference_dt and t_max a multiple of every dt (std::invalid_argument otherwise).
///
/// The default window, StepStarts, is the one under which the published
/// tables for this model are reproduced.
[[nodiscard]] std::vector<ConvergenceReport> convergence_study(std::span<const SchemeKind> schemes,
                                                               std::vector<double> dt_list,
                                                               const StateVector& ic, double t_max,
                                                               double reference_dt, const SolverConfig& cfg,
                                                               SampleWindow window = SampleWindow::StepStarts);

/// Convenience overload on the shock initial condition of size n.
[[nodiscard]] std::vector<ConvergenceReport> convergence_study(std::span<const SchemeKind> schemes,
                                                               std::vector<double> dt_list, std::size_t n,
                                                               double t_max, double reference_dt,
                                                               const SolverConfig& cfg,
                                                               SampleWindow window = SampleWindow::StepStarts);

/// ||b_a(t_max) - b_b(t_max)||_2 for RK4 runs at steps dt_a and dt_b.
[[nodiscard]] double reference_discrepancy(const StateVector& ic, double t_max, double dt_a, double dt_b);

struct CostReport {
    SchemeKind scheme;
    std::vector<double> dts;
    std::vector<double> mean_function_evals;  // Newton / multiplier solve only
    std::vector<double> mean_iterations;
    std::vector<double> rk4_evals_per_step;   // explicit stage evaluations, 0 for implicit schemes
    std::vector<std::size_t> failures;
    /// function_evals == iterations + 1 held on every step of every dt.
    bool evals_equal_iterations_plus_one = true;
};

[[nodiscard]] std::vector<CostReport> cost_study(std::span<const SchemeKind> schemes, std::span<const double> dt_list,
                                                 std::size_t n, double t_max, const SolverConfig& cfg);

/// Runs the same ensemble (same seed, so identical initial conditions) for every scheme.
[[nodiscard]] std::vector<std::pair<SchemeKind, EnsembleSeries>> long_time_bias_study(
    const EnsembleSpec& spec, std::span<const SchemeKind> schemes, const SolverConfig& cfg,
    std::size_t threads = 0);

}  // namespace toymodel
