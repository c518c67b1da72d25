#include "toymodel/trajectory.hpp"

#include "toymodel/model.hpp"

#include <stdexcept>

namespace toymodel {

DiagnosticsRecord make_record(double t, const StateVector& state, std::span<const NormExponent> exponents)
{
    DiagnosticsRecord rec;
    rec.t = t;
    rec.mass = mass(state);
    rec.energy = energy(state);
    for (const auto& s : exponents) rec.hs_norms[s.value()] = hs_norm(state, s);
    return rec;
}

TrajectoryResult run_trajectory(const StateVector& ic, SchemeKind scheme, const TimeGrid& grid,
                                const SolverConfig& cfg, std::span<const NormExponent> norm_exponents,
                                std::size_t record_stride)
{
    if (record_stride == 0) {
        throw std::invalid_argument("record_stride must be positive");
    }
    const double M0 = mass(ic);
    const double H0 = energy(ic);

    TrajectoryResult out{{}, ic};
    out.records.reserve(grid.n_steps() / record_stride + 2);
    out.records.push_back(make_record(grid.t0(), ic, norm_exponents));

    std::uint32_t pending_flags = kFlagNone;
    for (std::size_t n = 1; n <= grid.n_steps(); ++n) {
        const double t = grid.time(n);
        StepResult step{out.final_state, {}};
        bool blew_up = false;
        try {
            step = advance(scheme, out.final_state, grid.dt(), cfg, M0, H0);
        } catch (const InvalidStateError&) {
            blew_up = true;  // explicit stage produced non-finite values
        }
        out.total_iterations += step.stats.iterations;
        out.total_function_evals += step.stats.function_evals;

        if (blew_up || (!step.accepted && scheme != SchemeKind::Projection)) {
            DiagnosticsRecord rec = make_record(t, step.next_state, norm_exponents);
            rec.flags = pending_flags | kFlagStepFailed;
            rec.solver = StepCounters{step.stats.iterations, step.stats.function_evals};
            out.records.push_back(std::move(rec));
            out.truncated = true;
            return out;
        }
        if (!step.accepted) {
            ++out.projection_failures;
            pending_flags |= kFlagProjectionFailed;
        }
        out.final_state = std::move(step.next_state);
        out.steps_taken = n;

        if (n % record_stride == 0 || n == grid.n_steps()) {
            DiagnosticsRecord rec = make_record(t, out.final_state, norm_exponents);
            rec.flags = pending_flags;
            pending_flags = kFlagNone;
            if (scheme != SchemeKind::RK4) {
                rec.solver = StepCounters{step.stats.iterations, step.stats.function_evals};
            }
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace toymodel
