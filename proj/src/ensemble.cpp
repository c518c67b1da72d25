#include "toymodel/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace toymodel {

namespace {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    std::uint64_t key = mix64(seed + kGolden);
    key = mix64(key ^ (stream + kGolden));
    return mix64(key ^ (counter * kGolden + 0x632be59bd9b4e019ULL));
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return static_cast<double>(counter_hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double ic_phase(std::uint64_t sample_index, std::size_t j, std::uint64_t seed) noexcept
{
    return 2.0 * std::numbers::pi * counter_uniform(seed, sample_index, j);
}

StateVector generate_ic(std::uint64_t sample_index, std::size_t n, std::uint64_t seed)
{
    std::vector<Complex> b(n);
    for (std::size_t j = 1; j <= n; ++j) {
        // 4^{-(j-1)} = 2^{-2(j-1)} is exact in binary
        const double modulus = std::ldexp(1.0, -2 * static_cast<int>(j - 1));
        b[j - 1] = std::polar(modulus, ic_phase(sample_index, j, seed));
    }
    return StateVector(std::move(b), Closure::Dirichlet);
}

void EnsembleSpec::validate() const
{
    if (samples == 0) throw std::invalid_argument("ensemble needs at least one sample");
    if (lattice_size == 0) throw std::invalid_argument("lattice size must be positive");
    if (record_stride == 0) throw std::invalid_argument("record_stride must be positive");
    if (norm_exponents.empty()) throw std::invalid_argument("at least one norm exponent is required");
}

EnsembleSeries aggregate_trajectories(const std::vector<TrajectoryResult>& runs,
                                      std::span<const NormExponent> exponents)
{
    EnsembleSeries out;
    std::vector<NormExponent> sorted(exponents.begin(), exponents.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto& s : sorted) out.exponents.push_back(s.value());

    std::vector<const TrajectoryResult*> good;
    for (const auto& run : runs) {
        out.projection_failures += run.projection_failures;
        if (run.truncated) {
            ++out.failed_samples;
        } else {
            good.push_back(&run);
        }
    }
    if (out.failed_samples * 10 > runs.size() || good.empty()) {
        throw EnsembleFailure(std::to_string(out.failed_samples) + " of " + std::to_string(runs.size()) +
                              " trajectories failed");
    }
    out.samples_used = good.size();

    const std::size_t n_times = good.front()->records.size();
    for (const auto* run : good) {
        if (run->records.size() != n_times) {
            throw std::invalid_argument("trajectories have different record counts");
        }
    }
    out.times.resize(n_times);
    out.mean_norms.assign(sorted.size(), std::vector<double>(n_times));
    out.norm_variances.assign(sorted.size(), std::vector<double>(n_times));
    out.mean_abs_mass_drift.resize(n_times);
    out.mean_abs_energy_drift.resize(n_times);

    const double count = static_cast<double>(good.size());
    for (std::size_t t = 0; t < n_times; ++t) {
        out.times[t] = good.front()->records[t].t;
        double mass_drift = 0.0;
        double energy_drift = 0.0;
        for (const auto* run : good) {
            const auto& first = run->records.front();
            const auto& rec = run->records[t];
            mass_drift += first.mass != 0.0 ? std::abs(rec.mass - first.mass) / first.mass : std::abs(rec.mass);
            energy_drift += first.energy != 0.0 ? std::abs(rec.energy - first.energy) / std::abs(first.energy)
                                                : std::abs(rec.energy);
        }
        out.mean_abs_mass_drift[t] = mass_drift / count;
        out.mean_abs_energy_drift[t] = energy_drift / count;

        for (std::size_t e = 0; e < sorted.size(); ++e) {
            const double s = sorted[e].value();
            double sum = 0.0;
            for (const auto* run : good) sum += run->records[t].hs_norms.at(s);
            const double mean = sum / count;
            double sq = 0.0;
            for (const auto* run : good) {
                const double d = run->records[t].hs_norms.at(s) - mean;
                sq += d * d;
            }
            out.mean_norms[e][t] = mean;
            out.norm_variances[e][t] = good.size() > 1 ? sq / (count - 1.0) : 0.0;
        }
    }
    return out;
}

EnsembleSeries run_ensemble(const std::vector<StateVector>& initial_conditions, const EnsembleSpec& spec,
                            const SolverConfig& cfg, std::size_t threads)
{
    spec.validate();
    cfg.validate();
    const std::size_t m = initial_conditions.size();
    if (m == 0) throw std::invalid_argument("ensemble needs at least one sample");

    std::vector<TrajectoryResult> runs(m, TrajectoryResult{{}, initial_conditions.front()});
    std::vector<std::exception_ptr> errors(m);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < m; k = next++) {
            try {
                runs[k] = run_trajectory(initial_conditions[k], spec.scheme, spec.grid, cfg, spec.norm_exponents,
                                         spec.record_stride);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, m);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return aggregate_trajectories(runs, spec.norm_exponents);
}

EnsembleSeries run_ensemble(const EnsembleSpec& spec, const SolverConfig& cfg, std::size_t threads)
{
    spec.validate();
    std::vector<StateVector> ics;
    ics.reserve(spec.samples);
    for (std::size_t k = 0; k < spec.samples; ++k) ics.push_back(generate_ic(k, spec.lattice_size, spec.seed));
    return run_ensemble(ics, spec, cfg, threads);
}

}  // namespace toymodel
