#include "toymodel/experiments.hpp"

#include "toymodel/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace toymodel {

StateVector shock_ic(std::size_t n)
{
    if (n == 0) throw std::invalid_argument("lattice size must be positive");
    std::vector<Complex> b(n);
    for (std::size_t j = 1; j <= n; ++j) {
        b[j - 1] = std::polar(1.0, static_cast<double>(j - 1) * std::numbers::pi / 4.0);
    }
    b[0] = {1.0, 0.0};
    return StateVector(std::move(b), Closure::Dirichlet);
}

std::vector<StateVector> integrate_states(const StateVector& ic, SchemeKind scheme, const TimeGrid& grid,
                                          const SolverConfig& cfg)
{
    const double M0 = mass(ic);
    const double H0 = energy(ic);
    std::vector<StateVector> states;
    states.reserve(grid.n_steps() + 1);
    states.push_back(ic);
    for (std::size_t n = 1; n <= grid.n_steps(); ++n) {
        StepResult step = advance(scheme, states.back(), grid.dt(), cfg, M0, H0);
        if (!step.accepted && scheme != SchemeKind::Projection) {
            throw NumericalFailure(to_string(scheme) + " step failed at t = " + std::to_string(grid.time(n)));
        }
        states.push_back(std::move(step.next_state));
    }
    return states;
}

double max_pointwise_error(std::span<const StateVector> a, std::span<const StateVector> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("state sequences differ in length");
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (a[n].size() != b[n].size()) throw std::invalid_argument("states differ in size");
        double sq = 0.0;
        for (std::size_t j = 0; j < a[n].size(); ++j) sq += std::norm(a[n][j] - b[n][j]);
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

double fitted_order(std::span<const double> dts, std::span<const double> errors)
{
    if (dts.size() != errors.size() || dts.size() < 2) {
        throw std::invalid_argument("order fit needs at least two (dt, error) pairs");
    }
    const double k = static_cast<double>(dts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        const double x = std::log(dts[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

namespace {

std::vector<double> sorted_decreasing(std::vector<double> dts)
{
    if (dts.empty()) throw std::invalid_argument("dt list is empty");
    std::sort(dts.begin(), dts.end(), std::greater<>());
    if (std::adjacent_find(dts.begin(), dts.end()) != dts.end()) {
        throw std::invalid_argument("dt list contains duplicates");
    }
    return dts;
}

std::pair<double, double> max_invariant_drift(std::span<const StateVector> states)
{
    const double M0 = mass(states.front());
    const double H0 = energy(states.front());
    double dm = 0.0, dh = 0.0;
    for (const auto& s : states) {
        dm = std::max(dm, M0 != 0.0 ? std::abs(mass(s) - M0) / M0 : std::abs(mass(s)));
        dh = std::max(dh, H0 != 0.0 ? std::abs(energy(s) - H0) / std::abs(H0) : std::abs(energy(s)));
    }
    return {dm, dh};
}

}  // namespace

std::vector<ConvergenceReport> convergence_study(std::span<const SchemeKind> schemes, std::vector<double> dt_list,
                                                 const StateVector& ic, double t_max, double reference_dt,
                                                 const SolverConfig& cfg, SampleWindow window)
{
    dt_list = sorted_decreasing(std::move(dt_list));
    std::vector<std::size_t> ratios;
    for (double dt : dt_list) {
        ratios.push_back(aligned_steps(dt, reference_dt));
        (void)aligned_steps(t_max, dt);
    }
    const std::size_t stride = std::accumulate(ratios.begin(), ratios.end(), std::size_t{0},
                                               [](std::size_t a, std::size_t b) { return std::gcd(a, b); });

    // Reference trajectory, kept only at multiples of `stride` fine steps.
    const std::size_t fine_steps = aligned_steps(t_max, reference_dt);
    std::vector<StateVector> reference{ic};
    reference.reserve(fine_steps / stride + 1);
    StateVector state = ic;
    for (std::size_t n = 1; n <= fine_steps; ++n) {
        state = step_rk4(state, reference_dt);
        if (n % stride == 0) reference.push_back(state);
    }

    std::vector<ConvergenceReport> reports;
    for (SchemeKind scheme : schemes) {
        ConvergenceReport report{scheme, dt_list, {}, {}, {}, 0.0};
        for (std::size_t i = 0; i < dt_list.size(); ++i) {
            const auto grid = TimeGrid::from_horizon(dt_list[i], t_max);
            auto states = integrate_states(ic, scheme, grid, cfg);
            if (window == SampleWindow::StepStarts) states.pop_back();
            std::vector<StateVector> aligned;
            aligned.reserve(states.size());
            const std::size_t hop = ratios[i] / stride;
            for (std::size_t n = 0; n < states.size(); ++n) aligned.push_back(reference[n * hop]);
            report.errors.push_back(max_pointwise_error(states, aligned));
            const auto [dm, dh] = max_invariant_drift(states);
            report.mass_drift.push_back(dm);
            report.energy_drift.push_back(dh);
        }
        report.order = dt_list.size() >= 2 ? fitted_order(report.dts, report.errors) : std::nan("");
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<ConvergenceReport> convergence_study(std::span<const SchemeKind> schemes, std::vector<double> dt_list,
                                                 std::size_t n, double t_max, double reference_dt,
                                                 const SolverConfig& cfg, SampleWindow window)
{
    return convergence_study(schemes, std::move(dt_list), shock_ic(n), t_max, reference_dt, cfg, window);
}

double reference_discrepancy(const StateVector& ic, double t_max, double dt_a, double dt_b)
{
    auto run = [&](double dt) {
        StateVector s = ic;
        const std::size_t steps = aligned_steps(t_max, dt);
        for (std::size_t n = 0; n < steps; ++n) s = step_rk4(s, dt);
        return s;
    };
    const StateVector a = run(dt_a);
    const StateVector b = run(dt_b);
    const std::array<StateVector, 1> sa{a}, sb{b};
    return max_pointwise_error(sa, sb);
}

std::vector<CostReport> cost_study(std::span<const SchemeKind> schemes, std::span<const double> dt_list,
                                   std::size_t n, double t_max, const SolverConfig& cfg)
{
    const StateVector ic = shock_ic(n);
    const double M0 = mass(ic);
    const double H0 = energy(ic);
    std::vector<CostReport> reports;
    for (SchemeKind scheme : schemes) {
        CostReport report{scheme, {}, {}, {}, {}, {}, true};
        for (double dt : dt_list) {
            const auto grid = TimeGrid::from_horizon(dt, t_max);
            StateVector state = ic;
            long long evals = 0, iters = 0, explicit_evals = 0;
            std::size_t failures = 0;
            for (std::size_t k = 1; k <= grid.n_steps(); ++k) {
                StepResult step = advance(scheme, state, dt, cfg, M0, H0);
                evals += step.stats.function_evals;
                iters += step.stats.iterations;
                explicit_evals += step.rhs_evals;
                if (scheme != SchemeKind::RK4 && step.stats.function_evals != step.stats.iterations + 1) {
                    report.evals_equal_iterations_plus_one = false;
                }
                if (!step.accepted) {
                    ++failures;
                    if (scheme != SchemeKind::Projection) break;
                }
                state = std::move(step.next_state);
            }
            const double steps = static_cast<double>(grid.n_steps());
            report.dts.push_back(dt);
            report.mean_function_evals.push_back(static_cast<double>(evals) / steps);
            report.mean_iterations.push_back(static_cast<double>(iters) / steps);
            report.rk4_evals_per_step.push_back(static_cast<double>(explicit_evals) / steps);
            report.failures.push_back(failures);
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<std::pair<SchemeKind, EnsembleSeries>> long_time_bias_study(const EnsembleSpec& spec,
                                                                        std::span<const SchemeKind> schemes,
                                                                        const SolverConfig& cfg,
                                                                        std::size_t threads)
{
    std::vector<std::pair<SchemeKind, EnsembleSeries>> out;
    for (SchemeKind scheme : schemes) {
        EnsembleSpec s = spec;
        s.scheme = scheme;
        out.emplace_back(scheme, run_ensemble(s, cfg, threads));
    }
    return out;
}

}  // namespace toymodel
