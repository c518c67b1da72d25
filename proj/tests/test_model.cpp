#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "toymodel/model.hpp"
#include "toymodel/state.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace toymodel;
using toymodel::testing::random_state;

namespace {

// Central differences of H along Re b_j and Im b_j; 2 dH/d(conj b_j) = dH/du + i dH/dv.
std::vector<Complex> fd_gradient(const StateVector& b, double h)
{
    std::vector<Complex> g(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        auto perturbed = [&](Complex delta) {
            std::vector<Complex> amps(b.amplitudes().begin(), b.amplitudes().end());
            amps[j] += delta;
            return energy(StateVector(amps, b.closure()));
        };
        const double du = (perturbed({h, 0}) - perturbed({-h, 0})) / (2 * h);
        const double dv = (perturbed({0, h}) - perturbed({0, -h})) / (2 * h);
        g[j] = {du, dv};
    }
    return g;
}

double norm(const std::vector<Complex>& v)
{
    double s = 0.0;
    for (auto z : v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("state vector validation and ghosts")
{
    CHECK_THROWS_AS(StateVector({}, Closure::Dirichlet), InvalidStateError);
    CHECK_THROWS_AS(StateVector({Complex{std::nan(""), 0.0}}), InvalidStateError);
    CHECK_THROWS_AS(StateVector({Complex{INFINITY, 0.0}}), InvalidStateError);

    const StateVector d({{1, 0}, {2, 0}, {3, 0}}, Closure::Dirichlet);
    CHECK(d.neighbor(0, -1) == Complex{});
    CHECK(d.neighbor(2, +1) == Complex{});
    CHECK(d.neighbor(1, -1) == Complex{1, 0});

    const StateVector p({{1, 0}, {2, 0}, {3, 0}}, Closure::Periodic);
    CHECK(p.neighbor(0, -1) == Complex{3, 0});
    CHECK(p.neighbor(2, +1) == Complex{1, 0});
    CHECK(neighbor_index(3, Closure::Dirichlet, 0, -1) == npos);
    CHECK(neighbor_index(3, Closure::Periodic, 0, -1) == 2);

    const StateVector single({{2, 1}}, Closure::Periodic);
    CHECK(single.neighbor(0, -1) == Complex{2, 1});
}

TEST_CASE("real split round trip")
{
    std::mt19937_64 rng(7);
    const StateVector b = random_state(rng, 5, Closure::Periodic);
    const auto packed = b.to_real();
    REQUIRE(packed.size() == 10);
    CHECK(packed[2] == b[1].real());
    CHECK(packed[3] == b[1].imag());
    CHECK(StateVector::from_real(packed, Closure::Periodic) == b);
}

TEST_CASE("time grid alignment")
{
    CHECK(aligned_steps(1.0, 0.1) == 10);
    CHECK(aligned_steps(1.0, 0.0125) == 80);
    CHECK(aligned_steps(0.1, 1e-4) == 1000);
    CHECK_THROWS_AS((void)aligned_steps(1.0, 0.3), std::invalid_argument);
    const auto grid = TimeGrid::from_horizon(0.05, 1.0);
    CHECK(grid.n_steps() == 20);
    CHECK(grid.time(20) == doctest::Approx(1.0));
    CHECK_THROWS((void)NormExponent(std::nan("")));
}

TEST_CASE("invariants by hand")
{
    const StateVector zero = StateVector::zeros(4);
    CHECK(mass(zero) == 0.0);
    CHECK(energy(zero) == 0.0);
    for (auto z : rhs(zero)) CHECK(z == Complex{});

    // Single site: the coupling vanishes under Dirichlet ghosts.
    const Complex b0{0.6, -0.8};
    const StateVector one({b0});
    CHECK(mass(one) == doctest::Approx(1.0));
    CHECK(energy(one) == doctest::Approx(0.25));
    const auto f = rhs(one);
    CHECK(std::abs(f[0] - Complex{0, -1} * b0) < 1e-15);

    // Two equal real sites: H = 2 * 1/4 - Re(1 * 1) = -0.5 (one bond, counted from site 2).
    const StateVector two({{1, 0}, {1, 0}});
    CHECK(energy(two) == doctest::Approx(-0.5));
    CHECK(mass(two) == doctest::Approx(2.0));
}

TEST_CASE("h^s norm")
{
    const StateVector b({{1, 0}, {0, 1}, {0.5, 0.5}});
    // weights 2^{(s-1) j}, j = 1..3
    const double s = 3.0;
    const double expected = std::sqrt(4.0 * 1 + 16.0 * 1 + 64.0 * 0.5);
    CHECK(hs_norm(b, NormExponent{s}) == doctest::Approx(expected));
    CHECK(hs_norm_squared(b, NormExponent{s}) == doctest::Approx(expected * expected));
    CHECK(hs_norm(b, NormExponent{1.0}) == doctest::Approx(std::sqrt(mass(b))));
}

TEST_CASE("hamiltonian gradient matches finite differences")
{
    std::mt19937_64 rng(2024);
    for (Closure closure : {Closure::Dirichlet, Closure::Periodic}) {
        for (int trial = 0; trial < 20; ++trial) {
            const StateVector b = random_state(rng, 6, closure);
            const auto g = hamiltonian_gradient(b);
            const auto fd = fd_gradient(b, 1e-6);
            double diff = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) diff += std::norm(g[j] - fd[j]);
            CHECK(std::sqrt(diff) <= 1e-6 * norm(g));
        }
    }
}

TEST_CASE("vector field is -i times the hamiltonian gradient")
{
    std::mt19937_64 rng(99);
    for (Closure closure : {Closure::Dirichlet, Closure::Periodic}) {
        for (int trial = 0; trial < 100; ++trial) {
            const StateVector b = random_state(rng, 1 + trial % 9, closure, 2.0);
            const auto f = rhs(b);
            const auto g = hamiltonian_gradient(b);
            for (std::size_t j = 0; j < f.size(); ++j) {
                CHECK(std::abs(f[j] - Complex{0, -1} * g[j]) <= 4e-16 * (1.0 + std::abs(g[j])));
            }
        }
    }
}

TEST_CASE("flow is tangent to both invariant level sets")
{
    std::mt19937_64 rng(5);
    for (Closure closure : {Closure::Dirichlet, Closure::Periodic}) {
        const StateVector b = random_state(rng, 12, closure);
        const auto f = rhs(b);
        const auto g = hamiltonian_gradient(b);
        double dM = 0.0, dH = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            dM += 2.0 * (std::conj(b[j]) * f[j]).real();
            dH += (std::conj(g[j]) * f[j]).real();
            scale += std::norm(g[j]);
        }
        CHECK(std::abs(dM) < 1e-13);
        CHECK(std::abs(dH) < 1e-13 * scale);
    }
}

TEST_CASE("global phase invariance")
{
    std::mt19937_64 rng(11);
    const StateVector b = random_state(rng, 8);
    const Complex phase = std::polar(1.0, 0.7);
    std::vector<Complex> rotated;
    for (auto z : b.amplitudes()) rotated.push_back(phase * z);
    const StateVector r(rotated);
    CHECK(mass(r) == doctest::Approx(mass(b)).epsilon(1e-14));
    CHECK(energy(r) == doctest::Approx(energy(b)).epsilon(1e-13));
    const auto fb = rhs(b);
    const auto fr = rhs(r);
    for (std::size_t j = 0; j < fb.size(); ++j) CHECK(std::abs(fr[j] - phase * fb[j]) < 1e-13);
}

TEST_CASE("periodic closure commutes with cyclic shifts")
{
    std::mt19937_64 rng(3);
    const StateVector b = random_state(rng, 7, Closure::Periodic);
    std::vector<Complex> shifted(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) shifted[(j + 1) % b.size()] = b[j];
    const StateVector s(shifted, Closure::Periodic);
    CHECK(energy(s) == doctest::Approx(energy(b)).epsilon(1e-13));
    const auto fb = rhs(b);
    const auto fs = rhs(s);
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(fs[(j + 1) % b.size()] - fb[j]) < 1e-14);
}
