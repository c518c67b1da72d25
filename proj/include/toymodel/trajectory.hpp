#pragma once

#include "toymodel/newton.hpp"
#include "toymodel/schemes.hpp"
#include "toymodel/state.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace toymodel {

enum RecordFlag : std::uint32_t {
    kFlagNone = 0,
    kFlagStepFailed = 1u << 0,        // series truncated at this record
    kFlagProjectionFailed = 1u << 1,  // unprojected RK4 state kept for this step
};

/// Solver counters of the step that produced a sample.
struct StepCounters {
    int newton_iters = 0;
    int f_evals = 0;
    friend bool operator==(const StepCounters&, const StepCounters&) = default;
};

/// One trajectory sample point.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    std::map<double, double> hs_norms;  // exponent s -> ||b||_{h^s}
    std::optional<StepCounters> solver;
    std::uint32_t flags = kFlagNone;

    friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

[[nodiscard]] DiagnosticsRecord make_record(double t, const StateVector& state,
                                            std::span<const NormExponent> exponents);

struct TrajectoryResult {
    std::vector<DiagnosticsRecord> records;
    StateVector final_state;
    bool truncated = false;
    std::size_t steps_taken = 0;
    std::size_t projection_failures = 0;
    long long total_iterations = 0;
    long long total_function_evals = 0;
};

/// Steps `scheme` across the grid, recording at t0, every record_stride steps
/// and at the final step. A failed step truncates the series; its record
/// carries kFlagStepFailed. Projection failures are counted and flagged but
/// the trajectory continues from the unprojected state.
[[nodiscard]] TrajectoryResult run_trajectory(const StateVector& ic, SchemeKind scheme, const TimeGrid& grid,
                                              const SolverConfig& cfg,
                                              std::span<const NormExponent> norm_exponents,
                                              std::size_t record_stride = 1);

}  // namespace toymodel
