#include "toymodel/schemes.hpp"

#include "toymodel/model.hpp"

#include <cmath>

namespace toymodel {

namespace {

constexpr Complex I{0.0, 1.0};

void require_implicit(SchemeKind scheme)
{
    if (!is_implicit(scheme)) {
        throw UnsupportedSchemeError(to_string(scheme) + " has no implicit residual");
    }
}

void require_compatible(const StateVector& a, const StateVector& b)
{
    if (a.size() != b.size() || a.closure() != b.closure()) {
        throw InvalidStateError("states differ in size or closure");
    }
}

// Real-split 2x2 block of a non-holomorphic map with Wirtinger derivatives
// P = df/dz and Q = df/d(conj z).
Block2 wirtinger_block(Complex P, Complex Q) noexcept
{
    const Complex sum = P + Q;
    const Complex diff = P - Q;
    return {{sum.real(), -diff.imag(), sum.imag(), diff.real()}};
}

// Work buffers for evaluating the scheme's vector field F(b_n, b_cand).
struct SchemeKernel {
    SchemeKind scheme;
    Closure closure;
    std::span<const Complex> a;  // b_n
    std::vector<Complex> mid;
    std::vector<Complex> avg_square;
    std::vector<Complex> work;

    SchemeKernel(SchemeKind s, Closure c, std::span<const Complex> current)
        : scheme(s), closure(c), a(current), mid(a.size()), avg_square(a.size()), work(a.size())
    {
    }

    void prepare(std::span<const Complex> c)
    {
        for (std::size_t j = 0; j < a.size(); ++j) {
            const auto avg = nonlinear_averages(a[j], c[j]);
            mid[j] = avg.midpoint;
            avg_square[j] = avg.averaged_square;
        }
    }

    // out = F(a, c)
    void field(std::span<const Complex> c, std::span<Complex> out)
    {
        prepare(c);
        switch (scheme) {
            case SchemeKind::Trapezoidal:
                rhs_into(a, closure, work);
                rhs_into(c, closure, out);
                for (std::size_t j = 0; j < a.size(); ++j) out[j] = 0.5 * (work[j] + out[j]);
                break;
            case SchemeKind::ImplicitMidpoint:
                rhs_into(mid, closure, out);
                break;
            case SchemeKind::Mass:
                for (std::size_t j = 0; j < a.size(); ++j) {
                    const double avg_mod = 0.5 * (std::norm(a[j]) + std::norm(c[j]));
                    const Complex ml = neighbor(mid, closure, j, -1);
                    const Complex mr = neighbor(mid, closure, j, +1);
                    out[j] = -I * avg_mod * mid[j] + 2.0 * I * std::conj(mid[j]) * (mr * mr + ml * ml);
                }
                break;
            case SchemeKind::Energy:
                for (std::size_t j = 0; j < a.size(); ++j) {
                    const double avg_mod = 0.5 * (std::norm(a[j]) + std::norm(c[j]));
                    const Complex sl = neighbor(avg_square, closure, j, -1);
                    const Complex sr = neighbor(avg_square, closure, j, +1);
                    out[j] = -I * avg_mod * mid[j] + 2.0 * I * std::conj(mid[j]) * (sr + sl);
                }
                break;
            default:
                throw UnsupportedSchemeError(to_string(scheme) + " has no implicit residual");
        }
    }

    void residual(std::span<const Complex> c, double dt, std::span<Complex> out)
    {
        field(c, out);
        for (std::size_t j = 0; j < a.size(); ++j) out[j] = c[j] - a[j] - dt * out[j];
    }

    BlockTridiagonal jacobian(std::span<const Complex> c, double dt)
    {
        prepare(c);
        const std::size_t n = a.size();
        BlockTridiagonal J(n, closure == Closure::Periodic);
        for (std::size_t j = 0; j < n; ++j) {
            Complex d_self{};   // dF_j / d c_j
            Complex d_conj{};   // dF_j / d conj(c_j)
            Complex d_left{};   // dF_j / d c_{j-1}
            Complex d_right{};  // dF_j / d c_{j+1}
            switch (scheme) {
                case SchemeKind::Trapezoidal:
                case SchemeKind::ImplicitMidpoint: {
                    // Trapezoidal: half of d rhs(c). Midpoint: d rhs(m) * dm/dc = d rhs(m) / 2.
                    const std::span<const Complex> v =
                        scheme == SchemeKind::Trapezoidal ? c : std::span<const Complex>(mid);
                    const Complex l = neighbor(v, closure, j, -1);
                    const Complex r = neighbor(v, closure, j, +1);
                    d_self = -I * std::norm(v[j]);
                    d_conj = 0.5 * I * (-v[j] * v[j] + 2.0 * (l * l + r * r));
                    d_left = 2.0 * I * std::conj(v[j]) * l;
                    d_right = 2.0 * I * std::conj(v[j]) * r;
                    break;
                }
                case SchemeKind::Mass: {
                    const double avg_mod = 0.5 * (std::norm(a[j]) + std::norm(c[j]));
                    const Complex ml = neighbor(mid, closure, j, -1);
                    const Complex mr = neighbor(mid, closure, j, +1);
                    d_self = -0.5 * I * (std::conj(c[j]) * mid[j] + avg_mod);
                    d_conj = -0.5 * I * c[j] * mid[j] + I * (ml * ml + mr * mr);
                    d_left = 2.0 * I * std::conj(mid[j]) * ml;
                    d_right = 2.0 * I * std::conj(mid[j]) * mr;
                    break;
                }
                case SchemeKind::Energy: {
                    const double avg_mod = 0.5 * (std::norm(a[j]) + std::norm(c[j]));
                    const Complex sl = neighbor(avg_square, closure, j, -1);
                    const Complex sr = neighbor(avg_square, closure, j, +1);
                    d_self = -0.5 * I * (std::conj(c[j]) * mid[j] + avg_mod);
                    d_conj = -0.5 * I * c[j] * mid[j] + I * (sl + sr);
                    d_left = 2.0 * I * std::conj(mid[j]) * neighbor(c, closure, j, -1);
                    d_right = 2.0 * I * std::conj(mid[j]) * neighbor(c, closure, j, +1);
                    break;
                }
                default:
                    throw UnsupportedSchemeError(to_string(scheme) + " has no implicit residual");
            }
            J.diag(j) = wirtinger_block(1.0 - dt * d_self, -dt * d_conj);
            if (J.lower_column(j) != npos) J.lower(j) = wirtinger_block(-dt * d_left, 0.0);
            if (J.upper_column(j) != npos) J.upper(j) = wirtinger_block(-dt * d_right, 0.0);
        }
        return J;
    }
};

std::vector<Complex> to_complex(std::span<const double> packed)
{
    std::vector<Complex> z(packed.size() / 2);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = {packed[2 * j], packed[2 * j + 1]};
    return z;
}

void to_real(std::span<const Complex> z, std::span<double> packed)
{
    for (std::size_t j = 0; j < z.size(); ++j) {
        packed[2 * j] = z[j].real();
        packed[2 * j + 1] = z[j].imag();
    }
}

double real_inner(std::span<const Complex> x, std::span<const Complex> y) noexcept
{
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += x[j].real() * y[j].real() + x[j].imag() * y[j].imag();
    return s;
}

StateVector rk2_predict(const StateVector& b, double dt)
{
    const auto k1 = rhs(b);
    std::vector<Complex> half(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) half[j] = b[j] + 0.5 * dt * k1[j];
    std::vector<Complex> k2(b.size());
    rhs_into(half, b.closure(), k2);
    std::vector<Complex> out(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) out[j] = b[j] + dt * k2[j];
    return StateVector(std::move(out), b.closure());
}

StepResult solve_implicit(SchemeKind scheme, const StateVector& b_n, double dt, const SolverConfig& cfg)
{
    require_implicit(scheme);
    cfg.validate();
    SchemeKernel kernel(scheme, b_n.closure(), b_n.amplitudes());
    std::vector<Complex> r(b_n.size());

    const ResidualFn residual_fn = [&](std::span<const double> x, std::span<double> out) {
        const auto c = to_complex(x);
        kernel.residual(c, dt, r);
        to_real(r, out);
    };
    const JacobianFn jacobian_fn = [&](std::span<const double> x) {
        return kernel.jacobian(to_complex(x), dt);
    };

    const StateVector guess = cfg.predictor == Predictor::RK2 ? rk2_predict(b_n, dt) : b_n;
    try {
        auto result = newton_solve(residual_fn, jacobian_fn, guess.to_real(), cfg);
        StepResult step{StateVector::from_real(result.solution, b_n.closure()), result.stats};
        step.accepted = result.stats.converged();
        return step;
    } catch (const SolverFailure& failure) {
        StepResult step{b_n, failure.stats()};
        step.accepted = false;
        try {
            step.next_state = StateVector::from_real(failure.last_iterate(), b_n.closure());
        } catch (const InvalidStateError&) {
            // non-finite iterate; keep b_n
        }
        return step;
    }
}

// Multiplier solve with the directions re-evaluated at every iterate.
StepResult project_refreshed(const StateVector& rk, double M0, double H0, const SolverConfig& cfg,
                             SolverConfig proj_cfg)
{
    const Closure closure = rk.closure();
    std::vector<Complex> x(rk.amplitudes().begin(), rk.amplitudes().end());
    std::vector<Complex> dM(x.size()), dH(x.size());
    std::array<double, 2> lambda{0.0, 0.0};
    SolverStats stats;

    auto constraint = [&] {
        ++stats.function_evals;
        return std::array<double, 2>{mass_of(x) - M0, energy_of(x, closure) - H0};
    };
    auto r = constraint();
    const double r0 = std::hypot(r[0], r[1]);
    stats.final_residual_norm = r0;
    StepResult failed{rk, stats, false, 4};
    if (auto reason = check_termination(r0, r0, -1.0, 0.0, proj_cfg)) {
        stats.reason = *reason;
        return {rk, stats, true, 4};
    }
    while (stats.iterations < proj_cfg.max_iters) {
        for (std::size_t j = 0; j < x.size(); ++j) dM[j] = 2.0 * x[j];
        hamiltonian_gradient_into(x, closure, dH);
        ++stats.jacobian_evals;
        BlockTridiagonal J(1, false);
        J.diag(0) = {{real_inner(dM, dM), real_inner(dM, dH), real_inner(dH, dM), real_inner(dH, dH)}};
        std::array<double, 2> delta{};
        try {
            const auto d = solve_block_tridiagonal(J, std::array<double, 2>{-r[0], -r[1]}, cfg.pivot_tol);
            delta = {d[0], d[1]};
        } catch (const SingularMatrixError&) {
            failed.stats = stats;
            return failed;
        }
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += delta[0] * dM[j] + delta[1] * dH[j];
        lambda[0] += delta[0];
        lambda[1] += delta[1];
        ++stats.iterations;
        r = constraint();
        const double r_norm = std::hypot(r[0], r[1]);
        stats.final_residual_norm = r_norm;
        if (!std::isfinite(r_norm)) break;
        if (auto reason = check_termination(r_norm, r0, std::hypot(delta[0], delta[1]),
                                            std::hypot(lambda[0], lambda[1]), proj_cfg)) {
            stats.reason = *reason;
            StepResult ok{StateVector(std::move(x), closure), stats, true, 4};
            ok.multipliers = lambda;
            return ok;
        }
    }
    failed.stats = stats;
    return failed;
}

}  // namespace

std::string to_string(SchemeKind s)
{
    switch (s) {
        case SchemeKind::Trapezoidal: return "trapezoidal";
        case SchemeKind::ImplicitMidpoint: return "midpoint";
        case SchemeKind::Mass: return "mass";
        case SchemeKind::Energy: return "energy";
        case SchemeKind::RK4: return "rk4";
        case SchemeKind::Projection: return "projection";
    }
    return "unknown";
}

std::optional<SchemeKind> parse_scheme(std::string_view name)
{
    if (name == "trapezoidal" || name == "trap") return SchemeKind::Trapezoidal;
    if (name == "midpoint" || name == "implicit-midpoint" || name == "implicit_midpoint") {
        return SchemeKind::ImplicitMidpoint;
    }
    if (name == "mass") return SchemeKind::Mass;
    if (name == "energy") return SchemeKind::Energy;
    if (name == "rk4") return SchemeKind::RK4;
    if (name == "projection") return SchemeKind::Projection;
    return std::nullopt;
}

NonlinearAverages nonlinear_averages(Complex current, Complex next) noexcept
{
    const Complex mid = 0.5 * (current + next);
    return {mid, mid * mid, 0.5 * (current * current + next * next),
            0.5 * (std::norm(current) + std::norm(next))};
}

std::vector<Complex> residual(SchemeKind scheme, const StateVector& b_n, const StateVector& b_cand, double dt)
{
    require_implicit(scheme);
    require_compatible(b_n, b_cand);
    SchemeKernel kernel(scheme, b_n.closure(), b_n.amplitudes());
    std::vector<Complex> out(b_n.size());
    kernel.residual(b_cand.amplitudes(), dt, out);
    return out;
}

BlockTridiagonal jacobian(SchemeKind scheme, const StateVector& b_n, const StateVector& b_cand, double dt)
{
    require_implicit(scheme);
    require_compatible(b_n, b_cand);
    SchemeKernel kernel(scheme, b_n.closure(), b_n.amplitudes());
    return kernel.jacobian(b_cand.amplitudes(), dt);
}

StepResult step_implicit(SchemeKind scheme, const StateVector& b_n, double dt, const SolverConfig& cfg)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive");
    }
    return solve_implicit(scheme, b_n, dt, cfg);
}

StepResult step_implicit_backward(SchemeKind scheme, const StateVector& b_n, double dt, const SolverConfig& cfg)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive");
    }
    return solve_implicit(scheme, b_n, -dt, cfg);
}

StateVector step_rk4(const StateVector& b_n, double dt)
{
    const std::size_t n = b_n.size();
    const Closure closure = b_n.closure();
    const auto b = b_n.amplitudes();
    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), stage(n);

    rhs_into(b, closure, k1);
    for (std::size_t j = 0; j < n; ++j) stage[j] = b[j] + 0.5 * dt * k1[j];
    rhs_into(stage, closure, k2);
    for (std::size_t j = 0; j < n; ++j) stage[j] = b[j] + 0.5 * dt * k2[j];
    rhs_into(stage, closure, k3);
    for (std::size_t j = 0; j < n; ++j) stage[j] = b[j] + dt * k3[j];
    rhs_into(stage, closure, k4);
    for (std::size_t j = 0; j < n; ++j) {
        stage[j] = b[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return StateVector(std::move(stage), closure);
}

StateVector step_bs3(const StateVector& b_n, double dt)
{
    const std::size_t n = b_n.size();
    const Closure closure = b_n.closure();
    const auto b = b_n.amplitudes();
    std::vector<Complex> k1(n), k2(n), k3(n), stage(n);

    rhs_into(b, closure, k1);
    for (std::size_t j = 0; j < n; ++j) stage[j] = b[j] + 0.5 * dt * k1[j];
    rhs_into(stage, closure, k2);
    for (std::size_t j = 0; j < n; ++j) stage[j] = b[j] + 0.75 * dt * k2[j];
    rhs_into(stage, closure, k3);
    for (std::size_t j = 0; j < n; ++j) {
        stage[j] = b[j] + dt * ((2.0 / 9.0) * k1[j] + (1.0 / 3.0) * k2[j] + (4.0 / 9.0) * k3[j]);
    }
    return StateVector(std::move(stage), closure);
}

StepResult step_projection(const StateVector& b_n, double dt, double M0, double H0, const SolverConfig& cfg)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive");
    }
    cfg.validate();
    SolverConfig proj_cfg = cfg;
    proj_cfg.abs_tol = cfg.projection_abs_tol;

    const bool bs3 = cfg.projection_predictor == ProjectionPredictor::BogackiShampine3;
    StateVector rk = bs3 ? step_bs3(b_n, dt) : step_rk4(b_n, dt);
    const int predictor_evals = bs3 ? 3 : 4;
    if (cfg.refresh_projection_gradients) {
        auto step = project_refreshed(rk, M0, H0, cfg, proj_cfg);
        step.rhs_evals = predictor_evals;
        return step;
    }

    const Closure closure = rk.closure();
    const auto base = rk.amplitudes();
    const std::size_t n = base.size();
    std::vector<Complex> dM(n), dH(n);
    for (std::size_t j = 0; j < n; ++j) dM[j] = 2.0 * base[j];
    hamiltonian_gradient_into(base, closure, dH);

    std::vector<Complex> x(n), gx(n);
    auto shifted = [&](std::span<const double> lambda) {
        for (std::size_t j = 0; j < n; ++j) x[j] = base[j] + lambda[0] * dM[j] + lambda[1] * dH[j];
    };
    const ResidualFn residual_fn = [&](std::span<const double> lambda, std::span<double> out) {
        shifted(lambda);
        out[0] = mass_of(x) - M0;
        out[1] = energy_of(x, closure) - H0;
    };
    const JacobianFn jacobian_fn = [&](std::span<const double> lambda) {
        shifted(lambda);
        hamiltonian_gradient_into(x, closure, gx);
        BlockTridiagonal J(1, false);
        // d/dlambda of M and H along the frozen directions; grad M(x) = 2x.
        J.diag(0) = {{2.0 * real_inner(x, dM), 2.0 * real_inner(x, dH), real_inner(gx, dM), real_inner(gx, dH)}};
        return J;
    };

    try {
        auto result = newton_solve(residual_fn, jacobian_fn, {0.0, 0.0}, proj_cfg);
        if (!result.stats.converged()) {
            return {std::move(rk), result.stats, false, predictor_evals};
        }
        shifted(result.solution);
        StepResult step{StateVector(x, closure), result.stats, true, predictor_evals};
        step.multipliers = {result.solution[0], result.solution[1]};
        return step;
    } catch (const SolverFailure& failure) {
        return {std::move(rk), failure.stats(), false, predictor_evals};
    }
}

StepResult advance(SchemeKind scheme, const StateVector& b_n, double dt, const SolverConfig& cfg,
                   double M0, double H0)
{
    switch (scheme) {
        case SchemeKind::RK4: {
            if (!(dt > 0.0) || !std::isfinite(dt)) {
                throw std::invalid_argument("time step must be positive");
            }
            SolverStats stats;
            stats.reason = TerminationReason::Absolute;
            return {step_rk4(b_n, dt), stats, true, 4};
        }
        case SchemeKind::Projection:
            return step_projection(b_n, dt, M0, H0, cfg);
        default:
            return step_implicit(scheme, b_n, dt, cfg);
    }
}

}  // namespace toymodel
