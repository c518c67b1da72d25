#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toymodel/ensemble.hpp"
#include "toymodel/model.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace toymodel;

namespace {

EnsembleSpec small_spec(SchemeKind scheme, std::size_t samples)
{
    EnsembleSpec spec;
    spec.samples = samples;
    spec.lattice_size = 12;
    spec.scheme = scheme;
    spec.grid = TimeGrid(0.1, 40);
    spec.norm_exponents = {NormExponent{4.0}, NormExponent{2.0}};
    spec.record_stride = 5;
    return spec;
}

TrajectoryResult fake_run(double norm_scale, bool truncated = false)
{
    TrajectoryResult run{{}, StateVector::zeros(1)};
    for (int k = 0; k < 3; ++k) {
        DiagnosticsRecord r;
        r.t = k;
        r.mass = 1.0 + 0.1 * k;
        r.energy = -2.0;
        r.hs_norms[4.0] = norm_scale * (k + 1);
        run.records.push_back(r);
    }
    run.truncated = truncated;
    return run;
}

}  // namespace

TEST_CASE("counter generator is a pure function of its key")
{
    CHECK(counter_hash(1, 2, 3) == counter_hash(1, 2, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s) {
        for (std::uint64_t k = 0; k < 4; ++k) {
            for (std::uint64_t c = 0; c < 4; ++c) seen.insert(counter_hash(s, k, c));
        }
    }
    CHECK(seen.size() == 64);
    for (std::uint64_t c = 0; c < 1000; ++c) {
        const double u = counter_uniform(9, 0, c);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform moments within three standard errors")
{
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0, cos_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = counter_uniform(20170101, static_cast<std::uint64_t>(k / 40), static_cast<std::uint64_t>(k % 40));
        sum += u;
        sum_sq += u * u;
        cos_sum += std::cos(2.0 * std::numbers::pi * u);
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    // Var of the sample variance of U(0,1) is (1/80 - 1/144) / n.
    CHECK(std::abs(var - 1.0 / 12.0) < 3.0 * std::sqrt((1.0 / 80.0 - 1.0 / 144.0) / n));
    CHECK(std::abs(cos_sum / n) < 3.0 * std::sqrt(0.5 / n));
}

TEST_CASE("random-phase initial condition")
{
    const StateVector b = generate_ic(3, 10, 42);
    CHECK(b.closure() == Closure::Dirichlet);
    for (std::size_t j = 0; j < 10; ++j) {
        CHECK(std::abs(b[j]) == doctest::Approx(std::pow(4.0, -static_cast<double>(j))).epsilon(1e-15));
        CHECK(std::arg(b[j] * std::polar(1.0, -ic_phase(3, j + 1, 42))) == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK(generate_ic(3, 10, 42) == b);
    CHECK_FALSE(generate_ic(4, 10, 42) == b);
    CHECK_FALSE(generate_ic(3, 10, 43) == b);
    // A longer lattice extends, and does not reshuffle, the shorter one.
    const StateVector longer = generate_ic(3, 14, 42);
    for (std::size_t j = 0; j < 10; ++j) CHECK(longer[j] == b[j]);
}

TEST_CASE("aggregation of one and two samples")
{
    const std::vector<NormExponent> s4{NormExponent{4.0}};
    const auto one = aggregate_trajectories({fake_run(2.0)}, s4);
    CHECK(one.samples_used == 1);
    CHECK(one.mean_norms[0] == std::vector<double>{2.0, 4.0, 6.0});
    CHECK(one.norm_variances[0] == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(one.mean_abs_mass_drift[2] == doctest::Approx(0.2));
    CHECK(one.mean_abs_energy_drift[2] == 0.0);

    const auto two = aggregate_trajectories({fake_run(2.0), fake_run(4.0)}, s4);
    CHECK(two.mean_norms[0] == std::vector<double>{3.0, 6.0, 9.0});
    // unbiased: (a - b)^2 / 2
    CHECK(two.norm_variances[0][0] == doctest::Approx(2.0));
    CHECK(two.norm_variances[0][2] == doctest::Approx(18.0));
    CHECK(two.times == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("failed trajectories are excluded up to ten percent")
{
    const std::vector<NormExponent> s4{NormExponent{4.0}};
    std::vector<TrajectoryResult> runs;
    for (int k = 0; k < 9; ++k) runs.push_back(fake_run(1.0));
    runs.push_back(fake_run(100.0, true));
    const auto series = aggregate_trajectories(runs, s4);
    CHECK(series.samples_used == 9);
    CHECK(series.failed_samples == 1);
    CHECK(series.mean_norms[0][0] == 1.0);

    runs.push_back(fake_run(100.0, true));
    CHECK_THROWS_AS((void)aggregate_trajectories(runs, s4), EnsembleFailure);
}

TEST_CASE("ensemble is bitwise independent of the thread count")
{
    for (SchemeKind scheme : {SchemeKind::Mass, SchemeKind::Projection}) {
        const auto spec = small_spec(scheme, 7);
        const auto serial = run_ensemble(spec, SolverConfig{}, 1);
        CHECK(run_ensemble(spec, SolverConfig{}, 2) == serial);
        CHECK(run_ensemble(spec, SolverConfig{}, 3) == serial);
        CHECK(run_ensemble(spec, SolverConfig{}, 16) == serial);
        CHECK(serial.times.size() == 9);
        CHECK(serial.exponents == std::vector<double>{2.0, 4.0});
    }
}

TEST_CASE("ensemble mean equals the mean of individual trajectories")
{
    const auto spec = small_spec(SchemeKind::Energy, 3);
    const auto series = run_ensemble(spec, SolverConfig{}, 2);
    double expected = 0.0;
    for (std::uint64_t k = 0; k < 3; ++k) {
        const auto run = run_trajectory(generate_ic(k, spec.lattice_size, spec.seed), spec.scheme, spec.grid,
                                        SolverConfig{}, spec.norm_exponents, spec.record_stride);
        expected += run.records.back().hs_norms.at(4.0);
    }
    CHECK(series.mean_norms[1].back() == doctest::Approx(expected / 3.0).epsilon(1e-15));
    CHECK(series.mean_abs_energy_drift.back() < 1e-13);
}

TEST_CASE("invalid specs")
{
    auto spec = small_spec(SchemeKind::Mass, 0);
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec(SchemeKind::Mass, 2);
    spec.norm_exponents.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
