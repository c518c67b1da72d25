#pragma once

#include "toymodel/newton.hpp"
#include "toymodel/schemes.hpp"
#include "toymodel/state.hpp"
#include "toymodel/trajectory.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace toymodel {

/// Counter-based generator: a SplitMix64-style finalizer applied to a key
/// derived from (seed, stream, counter). Every output depends only on its key,
/// so any sample can be regenerated without its predecessors.
[[nodiscard]] std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
[[nodiscard]] double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// Random-phase initial condition b_j = 4^{-(j-1)} exp(i theta_j), theta_j ~ U(0, 2 pi),
/// with theta_j keyed by (seed, sample_index, j). Dirichlet closure.
[[nodiscard]] StateVector generate_ic(std::uint64_t sample_index, std::size_t n, std::uint64_t seed);

/// Phase theta_j (1-based j) used by generate_ic.
[[nodiscard]] double ic_phase(std::uint64_t sample_index, std::size_t j, std::uint64_t seed) noexcept;

struct EnsembleSpec {
    std::size_t samples = 100;
    std::size_t lattice_size = 40;
    SchemeKind scheme = SchemeKind::Mass;
    TimeGrid grid{0.1, 10000};
    std::vector<NormExponent> norm_exponents{NormExponent{4.0}};
    std::uint64_t seed = 20170101;
    std::size_t record_stride = 10;

    void validate() const;
};

struct EnsembleSeries {
    std::vector<double> times;
    std::vector<double> exponents;                 // ascending s
    std::vector<std::vector<double>> mean_norms;   // [exponent][time]
    std::vector<std::vector<double>> norm_variances;
    std::vector<double> mean_abs_mass_drift;       // relative to each sample's M(0)
    std::vector<double> mean_abs_energy_drift;     // relative to |H(0)|
    std::size_t samples_used = 0;
    std::size_t failed_samples = 0;
    std::size_t projection_failures = 0;

    friend bool operator==(const EnsembleSeries&, const EnsembleSeries&) = default;
};

class EnsembleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Aggregates already-computed trajectories (all on the same record times).
/// Failed (truncated) trajectories are excluded and counted; more than 10%
/// failures throws EnsembleFailure.
[[nodiscard]] EnsembleSeries aggregate_trajectories(const std::vector<TrajectoryResult>& runs,
                                                    std::span<const NormExponent> exponents);

/// Runs the spec's samples on up to `threads` worker threads (0 = hardware
/// concurrency). The reduction is ordered by sample index, so the result is
/// bitwise independent of the thread count.
[[nodiscard]] EnsembleSeries run_ensemble(const EnsembleSpec& spec, const SolverConfig& cfg,
                                          std::size_t threads = 0);

/// Same, with caller-provided initial conditions (one per sample).
[[nodiscard]] EnsembleSeries run_ensemble(const std::vector<StateVector>& initial_conditions,
                                          const EnsembleSpec& spec, const SolverConfig& cfg,
                                          std::size_t threads = 0);

}  // namespace toymodel
