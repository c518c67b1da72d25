#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toymodel/experiments.hpp"
#include "toymodel/model.hpp"

#include <cmath>

using namespace toymodel;

TEST_CASE("shock initial condition")
{
    const StateVector b = shock_ic(100);
    CHECK(b[0] == Complex{1.0, 0.0});
    CHECK(b[1].real() == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(b[1].imag() == doctest::Approx(std::sqrt(2.0) / 2));
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(b[j]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mass(b) == doctest::Approx(100.0));
    CHECK_THROWS_AS((void)shock_ic(0), std::invalid_argument);
}

TEST_CASE("order fit recovers an exact power law")
{
    const std::vector<double> dts{0.1, 0.05, 0.025};
    const std::vector<double> errs{3.0 * 0.01, 3.0 * 0.0025, 3.0 * 0.000625};
    CHECK(fitted_order(dts, errs) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)fitted_order(std::vector<double>{0.1}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("self-comparison has zero error")
{
    const std::array schemes{SchemeKind::RK4};
    const auto reports = convergence_study(schemes, {0.1}, 8, 1.0, 0.1, SolverConfig{});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].errors[0] == 0.0);
    const auto states = integrate_states(shock_ic(8), SchemeKind::Mass, TimeGrid(0.1, 5), SolverConfig{});
    CHECK(max_pointwise_error(states, states) == 0.0);
}

TEST_CASE("convergence study on a small lattice")
{
    const std::array schemes{SchemeKind::Mass, SchemeKind::Energy, SchemeKind::Projection};
    const auto reports = convergence_study(schemes, {0.0125, 0.1, 0.05, 0.025}, 16, 0.5, 1.25e-3, SolverConfig{});
    for (const auto& r : reports) {
        CAPTURE(to_string(r.scheme));
        CHECK(r.dts == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
        for (std::size_t i = 1; i < r.errors.size(); ++i) CHECK(r.errors[i] < r.errors[i - 1]);
        CHECK(r.order > 1.5);
    }
    CHECK(reports[0].mass_drift.back() < 1e-13);
    CHECK(reports[1].energy_drift.back() < 1e-13);
    CHECK(reports[2].mass_drift.back() < 1e-13);
    CHECK(reports[2].energy_drift.back() < 1e-12);
}

TEST_CASE("the final time is excluded unless asked for")
{
    const std::array schemes{SchemeKind::ImplicitMidpoint};
    const auto starts = convergence_study(schemes, {0.1}, 10, 0.5, 1e-3, SolverConfig{}, SampleWindow::StepStarts);
    const auto all = convergence_study(schemes, {0.1}, 10, 0.5, 1e-3, SolverConfig{}, SampleWindow::AllTimes);
    CHECK(all[0].errors[0] >= starts[0].errors[0]);
    CHECK(all[0].energy_drift[0] >= starts[0].energy_drift[0]);
}

TEST_CASE("misaligned grids are configuration errors")
{
    const std::array schemes{SchemeKind::Mass};
    CHECK_THROWS_AS((void)convergence_study(schemes, {0.1, 0.04}, 4, 0.3, 1e-3, SolverConfig{}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)convergence_study(schemes, {0.1}, 4, 1.0, 0.03, SolverConfig{}), std::invalid_argument);
    CHECK_THROWS_AS((void)convergence_study(schemes, {0.1, 0.1}, 4, 1.0, 1e-3, SolverConfig{}),
                    std::invalid_argument);
}

TEST_CASE("reference cross-check")
{
    CHECK(reference_discrepancy(shock_ic(20), 0.2, 1e-3, 5e-4) < 1e-10);
}

TEST_CASE("cost study counters")
{
    const std::array schemes{SchemeKind::Trapezoidal, SchemeKind::RK4, SchemeKind::Projection};
    const std::array dts{0.1, 0.05};
    const auto reports = cost_study(schemes, dts, 20, 0.5, SolverConfig{});
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) {
        CHECK(r.evals_equal_iterations_plus_one);
        for (std::size_t i = 0; i < r.dts.size(); ++i) {
            CHECK(r.mean_function_evals[i] >= r.mean_iterations[i]);
            CHECK(r.failures[i] == 0);
        }
    }
    CHECK(reports[0].rk4_evals_per_step[0] == 0.0);
    CHECK(reports[0].mean_function_evals[0] == doctest::Approx(reports[0].mean_iterations[0] + 1.0));
    CHECK(reports[1].mean_function_evals[0] == 0.0);
    CHECK(reports[1].rk4_evals_per_step[0] == 4.0);
    CHECK(reports[2].rk4_evals_per_step[0] == 4.0);
}

TEST_CASE("bias study runs each scheme on identical initial conditions")
{
    EnsembleSpec spec;
    spec.samples = 3;
    spec.lattice_size = 8;
    spec.grid = TimeGrid(0.1, 20);
    spec.record_stride = 10;
    const std::array schemes{SchemeKind::Mass, SchemeKind::RK4};
    const auto results = long_time_bias_study(spec, schemes, SolverConfig{}, 1);
    REQUIRE(results.size() == 2);
    CHECK(results[0].second.mean_norms[0][0] == results[1].second.mean_norms[0][0]);
    CHECK(results[0].second.mean_abs_mass_drift.back() < 1e-14);
    CHECK(results[1].second.mean_abs_mass_drift.back() > results[0].second.mean_abs_mass_drift.back());
}
