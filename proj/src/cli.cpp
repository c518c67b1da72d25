#include "toymodel/cli.hpp"

#include "toymodel/config.hpp"
#include "toymodel/ensemble.hpp"
#include "toymodel/experiments.hpp"
#include "toymodel/model.hpp"
#include "toymodel/series_io.hpp"
#include "toymodel/trajectory.hpp"

#include <cmath>
#include <sstream>

namespace toymodel {

namespace {

constexpr const char* kVersion = "1.0.0";

double relative_change(double value, double reference)
{
    const double delta = std::abs(value - reference);
    return reference != 0.0 ? delta / std::abs(reference) : delta;
}

std::string short_real(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

std::string exponent_label(double s)
{
    std::ostringstream out;
    out.precision(17);
    out << s;
    return out.str();
}

nlohmann::json metadata(const RunConfig& cfg)
{
    return {{"command", std::string(to_string(cfg.command))},
            {"config", cfg.echo()},
            {"seed", cfg.seed},
            {"version", kVersion},
            {"compiler", __VERSION__}};
}

/// Writes the primary output plus the config sidecar; returns the final path.
std::string emit(const RunConfig& cfg, const std::vector<DiagnosticsRecord>* series, const Table* table)
{
    const std::string path = resolve_output_path(cfg.resolved_output());
    const bool json = cfg.resolved_format() == OutputFormat::Json;
    if (series != nullptr) {
        write_series(*series, path, json ? SeriesFormat::Json : SeriesFormat::Csv, metadata(cfg));
    } else if (json) {
        write_text_file(path, table_to_json(*table, metadata(cfg)).dump(1) + '\n');
    } else {
        write_text_file(path, table_to_csv(*table));
    }
    write_text_file(path + ".config", cfg.echo());
    return path;
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const std::size_t n = cfg.resolved_lattice_size();
    StateVector ic = cfg.ic == "random" ? generate_ic(cfg.sample, n, cfg.seed) : shock_ic(n);
    if (cfg.closure != ic.closure()) {
        ic = StateVector(std::vector<Complex>(ic.amplitudes().begin(), ic.amplitudes().end()), cfg.closure);
    }
    const SchemeKind scheme = cfg.resolved_schemes().front();
    const auto grid = TimeGrid::from_horizon(cfg.resolved_dts().front(), cfg.resolved_t_max());
    const auto exps = cfg.exponents();
    const TrajectoryResult run = run_trajectory(ic, scheme, grid, cfg.solver, exps, cfg.resolved_record_stride());
    const std::string path = emit(cfg, &run.records, nullptr);

    const auto& first = run.records.front();
    const auto& last = run.records.back();
    out << "simulate scheme=" << to_string(scheme) << " N=" << n << " dt=" << grid.dt() << " t=" << last.t
        << " steps=" << run.steps_taken << " mass_drift=" << short_real(relative_change(last.mass, first.mass))
        << " energy_drift=" << short_real(relative_change(last.energy, first.energy));
    for (const auto& [s, v] : last.hs_norms) out << " hs_norm_" << exponent_label(s) << '=' << short_real(v);
    out << " projection_failures=" << run.projection_failures << " truncated=" << (run.truncated ? "yes" : "no")
        << " -> " << path << '\n';
    if (run.truncated) {
        err << "error: step failed at t=" << last.t << "; series truncated\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int run_converge(const RunConfig& cfg, std::ostream& out)
{
    const auto schemes = cfg.resolved_schemes();
    const std::size_t n = cfg.resolved_lattice_size();
    const auto reports = convergence_study(schemes, cfg.resolved_dts(), n, cfg.resolved_t_max(), cfg.surrogate_dt,
                                           cfg.solver, cfg.window);
    const double check =
        reference_discrepancy(shock_ic(n), cfg.resolved_t_max(), cfg.surrogate_dt, cfg.surrogate_dt / 2);

    Table table{{"scheme", "dt", "error", "mass_drift", "energy_drift", "order"}, {}};
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.dts.size(); ++i) {
            table.rows.push_back({to_string(r.scheme), format_real(r.dts[i]), format_real(r.errors[i]),
                                  format_real(r.mass_drift[i]), format_real(r.energy_drift[i]),
                                  format_real(r.order)});
        }
    }
    const std::string path = emit(cfg, nullptr, &table);
    out << "converge N=" << n << " surrogate_check=" << short_real(check) << " orders:";
    for (const auto& r : reports) out << ' ' << to_string(r.scheme) << '=' << short_real(r.order);
    out << " -> " << path << '\n';
    return kExitOk;
}

int run_cost(const RunConfig& cfg, std::ostream& out)
{
    const auto reports =
        cost_study(cfg.resolved_schemes(), cfg.resolved_dts(), cfg.resolved_lattice_size(), cfg.resolved_t_max(),
                   cfg.solver);
    Table table{{"scheme", "dt", "mean_iterations", "mean_function_evals", "explicit_evals_per_step", "failures"},
                {}};
    std::size_t failures = 0;
    bool invariant = true;
    for (const auto& r : reports) {
        invariant = invariant && r.evals_equal_iterations_plus_one;
        for (std::size_t i = 0; i < r.dts.size(); ++i) {
            failures += r.failures[i];
            table.rows.push_back({to_string(r.scheme), format_real(r.dts[i]), format_real(r.mean_iterations[i]),
                                  format_real(r.mean_function_evals[i]), format_real(r.rk4_evals_per_step[i]),
                                  std::to_string(r.failures[i])});
        }
    }
    const std::string path = emit(cfg, nullptr, &table);
    out << "cost schemes=" << reports.size() << " failures=" << failures
        << " evals_equal_iterations_plus_one=" << (invariant ? "yes" : "no") << " -> " << path << '\n';
    return kExitOk;
}

void append_series_rows(Table& table, const EnsembleSeries& series, const std::string* scheme)
{
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        std::vector<std::string> row;
        if (scheme != nullptr) row.push_back(*scheme);
        row.push_back(format_real(series.times[k]));
        for (std::size_t e = 0; e < series.exponents.size(); ++e) {
            row.push_back(format_real(series.mean_norms[e][k]));
            row.push_back(format_real(series.norm_variances[e][k]));
        }
        row.push_back(format_real(series.mean_abs_mass_drift[k]));
        row.push_back(format_real(series.mean_abs_energy_drift[k]));
        table.rows.push_back(std::move(row));
    }
}

std::vector<std::string> series_columns(const RunConfig& cfg, bool with_scheme)
{
    std::vector<std::string> cols;
    if (with_scheme) cols.push_back("scheme");
    cols.push_back("t");
    for (double s : cfg.norm_exponents) {
        cols.push_back("mean_hs_norm_" + exponent_label(s));
        cols.push_back("var_hs_norm_" + exponent_label(s));
    }
    cols.push_back("mean_mass_drift");
    cols.push_back("mean_energy_drift");
    return cols;
}

void summarize(std::ostream& out, const EnsembleSeries& s)
{
    out << " samples=" << s.samples_used << " failed=" << s.failed_samples
        << " projection_failures=" << s.projection_failures
        << " mass_drift=" << short_real(s.mean_abs_mass_drift.back())
        << " energy_drift=" << short_real(s.mean_abs_energy_drift.back());
    for (std::size_t e = 0; e < s.exponents.size(); ++e) {
        out << " hs_norm_" << exponent_label(s.exponents[e]) << '=' << short_real(s.mean_norms[e].back());
    }
}

int run_ensemble_command(const RunConfig& cfg, std::ostream& out)
{
    const EnsembleSpec spec = cfg.ensemble_spec();
    const EnsembleSeries series = run_ensemble(spec, cfg.solver, cfg.threads);
    Table table{series_columns(cfg, false), {}};
    append_series_rows(table, series, nullptr);
    const std::string path = emit(cfg, nullptr, &table);
    out << "ensemble scheme=" << to_string(spec.scheme);
    summarize(out, series);
    out << " -> " << path << '\n';
    return kExitOk;
}

int run_bias(const RunConfig& cfg, std::ostream& out)
{
    const auto schemes = cfg.resolved_schemes();
    const auto results = long_time_bias_study(cfg.ensemble_spec(), schemes, cfg.solver, cfg.threads);
    Table table{series_columns(cfg, true), {}};
    for (const auto& [scheme, series] : results) {
        const std::string name = to_string(scheme);
        append_series_rows(table, series, &name);
    }
    const std::string path = emit(cfg, nullptr, &table);
    out << "bias";
    for (const auto& [scheme, series] : results) {
        out << ' ' << to_string(scheme) << ":mass_drift=" << short_real(series.mean_abs_mass_drift.back())
            << ",energy_drift=" << short_real(series.mean_abs_energy_drift.back());
    }
    out << " -> " << path << '\n';
    return kExitOk;
}

}  // namespace

int cli_dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    if (args.empty()) {
        err << usage();
        return kExitUsage;
    }
    if (args.front() == "help" || args.front() == "--help" || args.front() == "-h") {
        out << usage();
        return kExitOk;
    }
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << usage();
        return kExitUsage;
    }

    try {
        switch (cfg.command) {
            case Command::Simulate: return run_simulate(cfg, out, err);
            case Command::Converge: return run_converge(cfg, out);
            case Command::Cost: return run_cost(cfg, out);
            case Command::Ensemble: return run_ensemble_command(cfg, out);
            case Command::Bias: return run_bias(cfg, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const EnsembleFailure& e) {
        err << "ensemble failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const InvalidStateError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitOther;
}

}  // namespace toymodel
