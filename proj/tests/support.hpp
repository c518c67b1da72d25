#pragma once

#include "toymodel/state.hpp"

#include <random>
#include <vector>

namespace toymodel::testing {

/// Complex entries with real and imaginary parts uniform in [-scale, scale].
inline StateVector random_state(std::mt19937_64& rng, std::size_t n, Closure closure = Closure::Dirichlet,
                                double scale = 1.0)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<Complex> b(n);
    for (auto& z : b) z = {u(rng), u(rng)};
    return StateVector(std::move(b), closure);
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace toymodel::testing
